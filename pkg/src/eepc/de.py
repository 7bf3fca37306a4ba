"""Density evolution for GLDPC (product) and SC-GLDPC (staircase) ensembles.

The message state is chi = (delta_m, eps_m), the error and erasure
probability of VN-to-CN messages. One recursion step convolves the
multinomial mass over (D', E') neighborhoods with the decoder transition
table. Entries with E >= d_des leave the input unchanged, so the (D', E')
sum only runs over the stored E' < d_des columns and the residual mass is
folded in through the row-completeness identities:

    delta_rec = delta_c (1 - sum f T(1->0)) + eps_c sum f T(?->1)
                + c_c sum f T(0->1)
    eps_rec   = eps_c (1 - sum f (T(?->0) + T(?->1)))

The noise threshold is the smallest Es/N0 whose bit error probability
rho = delta + eps/2 is driven below 1e-10; iterations stop once rho moves
by less than 1e-12 per step. The spatially coupled recursion tracks 32
VN groups with group 0 pinned to (0, 0), a copied right boundary, and rho
averaged over groups 1..10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import xlogy

from .channel import ChannelParams, ChannelTriple, db_to_lin, transition_probs
from .transitions import TransitionTable


@dataclass(frozen=True)
class DeParams:
    rho_stagnation: float = 1e-12
    rho_converged: float = 1e-10
    max_iters: int = 20000
    bracket_db: tuple[float, float] = (-2.0, 8.0)
    bisect_db: float = 1e-3
    sc_groups: int = 32
    sc_avg_groups: int = 10


class BracketError(RuntimeError):
    """Bisection bracket does not straddle the threshold (or rho is not
    monotone in Es/N0 over the bracket)."""


@lru_cache(maxsize=None)
def _log_multinomial_grid(n: int, ecols: int) -> np.ndarray:
    """log C(n-1; D', E') for D' in [0, n), E' in [0, ecols)."""
    lf = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n + 1)))])
    D = np.arange(n)[:, None]
    E = np.arange(ecols)[None, :]
    rest = n - 1 - D - E
    out = np.where(rest >= 0, lf[n - 1] - lf[D] - lf[E] - lf[np.clip(rest, 0, n)], -np.inf)
    return out


def de_step(table: TransitionTable, chan: ChannelTriple, chi: np.ndarray) -> np.ndarray:
    """One DE recursion step; chi has shape (..., 2) and broadcasts."""
    chi = np.asarray(chi, dtype=float)
    n, ecols = table.n, table.d_des
    logc = _log_multinomial_grid(n, ecols)
    D = np.arange(n)[:, None]
    E = np.arange(ecols)[None, :]
    dm = chi[..., 0][..., None, None]
    em = chi[..., 1][..., None, None]
    cm = 1.0 - dm - em
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = logc + xlogy(D, dm) + xlogy(E, em) + xlogy(n - 1 - D - E, cm)
    f = np.exp(logf)

    s10 = np.einsum("...de,de->...", f, table.t10)
    s01 = np.einsum("...de,de->...", f, table.t01)
    sq1 = np.einsum("...de,de->...", f, table.tq1)
    sq0 = np.einsum("...de,de->...", f, table.tq0)

    dc, ec, cc = chan.delta, chan.eps, chan.correct
    delta = dc * (1.0 - s10) + ec * sq1 + cc * s01
    eps = ec * (1.0 - sq0 - sq1)
    out = np.stack([delta, eps], axis=-1)
    return np.clip(out, 0.0, 1.0)


def _rho(chi: np.ndarray) -> float:
    return float(chi[..., 0].mean() + 0.5 * chi[..., 1].mean())


def gldpc_rho(
    table: TransitionTable, chan: ChannelTriple, params: DeParams
) -> tuple[float, int]:
    """Iterate the GLDPC recursion from chi = chi_c until rho stagnates."""
    chi = np.array([chan.delta, chan.eps])
    rho_prev = _rho(chi)
    for it in range(1, params.max_iters + 1):
        chi = de_step(table, chan, chi)
        rho = _rho(chi)
        if abs(rho - rho_prev) < params.rho_stagnation:
            return rho, it
        rho_prev = rho
    return rho_prev, params.max_iters


def sc_de_step(table: TransitionTable, chan: ChannelTriple, state: np.ndarray) -> np.ndarray:
    """One SC recursion step over the truncated chain; state is (G+2, 2).

    state[0] is the pinned known boundary, state[G+1] the copied right
    boundary; groups 1..G update to the average of their two CN updates.
    """
    G = state.shape[0] - 2
    chihat = 0.5 * (state[:-1] + state[1:])  # index i -> chi-hat_{i+1}
    rec = de_step(table, chan, chihat)
    out = state.copy()
    out[1 : G + 1] = 0.5 * (rec[:-1] + rec[1:])
    out[G + 1] = out[G]
    return out


def sc_rho(
    table: TransitionTable, chan: ChannelTriple, params: DeParams
) -> tuple[float, int]:
    """Iterate the SC recursion; rho averages VN groups 1..sc_avg_groups."""
    G = params.sc_groups
    state = np.tile([chan.delta, chan.eps], (G + 2, 1))
    state[0] = 0.0
    navg = params.sc_avg_groups
    rho_prev = _rho(state[1 : navg + 1])
    for it in range(1, params.max_iters + 1):
        state = sc_de_step(table, chan, state)
        rho = _rho(state[1 : navg + 1])
        if abs(rho - rho_prev) < params.rho_stagnation:
            return rho, it
        rho_prev = rho
    return rho_prev, params.max_iters


def rho_limit(
    table: TransitionTable,
    esn0: float,
    t_quant: float,
    params: DeParams,
    ensemble: str = "product",
) -> tuple[float, int]:
    chan = transition_probs(ChannelParams(esn0, t_quant))
    if ensemble == "product":
        return gldpc_rho(table, chan, params)
    if ensemble == "staircase":
        return sc_rho(table, chan, params)
    raise ValueError(f"unknown ensemble {ensemble!r}")


def noise_threshold(
    table: TransitionTable,
    t_quant: float,
    params: DeParams,
    ensemble: str = "product",
) -> dict:
    """Binary search for the smallest converging Es/N0 (dB); returns the
    midpoint plus the residual bracket and iteration diagnostics."""

    def converges(esn0_db: float) -> tuple[bool, int]:
        rho, iters = rho_limit(table, db_to_lin(esn0_db), t_quant, params, ensemble)
        return rho < params.rho_converged, iters

    lo, hi = params.bracket_db
    total_iters = 0
    ok_lo, it = converges(lo)
    total_iters += it
    while ok_lo and lo > -12.0:
        # bracket floor sits above the threshold; widen before giving up
        lo -= 3.0
        ok_lo, it = converges(lo)
        total_iters += it
    if ok_lo:
        # every point converges down to the search floor
        return {
            "esn0_star_db": lo,
            "bracket_lo_db": lo,
            "bracket_hi_db": lo,
            "de_iterations": total_iters,
            "degenerate": True,
        }
    ok_hi, it = converges(hi)
    total_iters += it
    while not ok_hi and hi < 12.0:
        hi += 3.0
        ok_hi, it = converges(hi)
        total_iters += it
    if not ok_hi:
        raise BracketError(
            f"DE does not converge at the upper bracket {hi} dB "
            f"(T={t_quant}); widen bracket_db or check monotonicity"
        )
    while hi - lo > params.bisect_db:
        mid = 0.5 * (lo + hi)
        ok, it = converges(mid)
        total_iters += it
        if ok:
            hi = mid
        else:
            lo = mid
    return {
        "esn0_star_db": 0.5 * (lo + hi),
        "bracket_lo_db": lo,
        "bracket_hi_db": hi,
        "de_iterations": total_iters,
        "degenerate": False,
    }


def t_opt_scan(
    table: TransitionTable,
    t_grid: np.ndarray,
    params: DeParams,
    ensemble: str = "product",
    refine_tol: float = 1e-3,
    progress=None,
    precomputed: dict[float, float] | None = None,
) -> dict:
    """Threshold scan over the erasure-threshold grid plus golden refinement.

    Returns T_opt (argmin of the noise threshold over every evaluated T,
    always including T = 0), the predicted gain threshold(0) -
    threshold(T_opt) in dB, and all evaluated (T, threshold) points.
    ``precomputed`` seeds the cache (checkpoint resume).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0:
        raise ValueError("the scan grid must include T = 0")
    cache: dict[float, float] = {round(float(t), 12): v for t, v in (precomputed or {}).items()}

    def thr(t: float) -> float:
        t = round(float(t), 12)
        if t not in cache:
            cache[t] = noise_threshold(table, t, params, ensemble)["esn0_star_db"]
            if progress is not None:
                progress(t, cache[t])
        return cache[t]

    for t in t_grid:
        thr(t)
    step = float(t_grid[-1] - t_grid[-2]) if len(t_grid) > 1 else 0.01
    # extend the grid while the minimum sits on the right edge
    while True:
        ts = sorted(cache)
        i = int(np.argmin([cache[t] for t in ts]))
        if i < len(ts) - 1 or ts[-1] >= 0.9:
            break
        thr(ts[-1] + step)
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    # golden-section refinement of the (unimodal) minimum
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    while b - a > refine_tol:
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        if thr(c) < thr(d):
            b = d
        else:
            a = c
    ts = sorted(cache)
    vals = [cache[t] for t in ts]
    i = int(np.argmin(vals))
    t_opt = ts[i]
    gain = cache[0.0] - vals[i]
    return {
        "t_opt": t_opt,
        "gain_db": gain,
        "threshold_at_0_db": cache[0.0],
        "threshold_at_t_opt_db": vals[i],
        "points": [(t, cache[t]) for t in ts],
    }


def default_t_grid(t_max: float = 0.16, step: float = 0.01) -> np.ndarray:
    return np.round(np.arange(0.0, t_max + step / 2, step), 10)


def params_with(params: DeParams, **kw) -> DeParams:
    return replace(params, **kw)
