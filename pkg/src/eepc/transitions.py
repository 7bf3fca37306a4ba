"""Decoder transition probability tables T(alpha -> beta | D', E').

T gives the probability that the component decoder output carries symbol
beta at a fixed position k, conditioned on the input having symbol alpha at
k and D' errors / E' erasures on the remaining n-1 positions (all-zero
codeword transmitted). The tables are channel independent, so they are
built once per (code, decoder) and reused across every density evolution
iteration and channel point.

Only the four off-diagonal entries (0->1, 1->0, ?->1, ?->0) are stored;
diagonals follow from row completeness and the 0->? / 1->? transitions
never occur. Entries with E := E' + [alpha = ?] >= d_des are zero because
both decoders return such inputs unchanged.

All counting is done in the natural-log domain (binomial-approximate weight
tables for n = 511 reach ~1e145) and combined through logsumexp; the final
normalization by |Omega| (and 2^E for the randomized decoder) happens in
the log domain as well.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .bch import ComponentCodeSpec
from .distributions import (
    NEG_INF,
    WeightTables,
    log_binom,
    log_biweight,
    log_multinom,
)

LOG2 = math.log(2.0)
ENTRY_TOL = 1e-9  # tolerated numerical slack outside [0, 1]; beyond it the build fails


class TableBuildError(ValueError):
    pass


@dataclass
class TransitionTable:
    decoder: str  # "eaed" | "eaedplus"
    n: int
    d_des: int
    t01: np.ndarray  # T(0->1), shape (n, d_des), indexed [D', E']
    t10: np.ndarray
    tq1: np.ndarray  # T(?->1), nonzero only for E' <= d_des - 2
    tq0: np.ndarray
    meta: dict

    def prob(self, alpha, beta, dp: int, ep: int) -> float:
        """Full transition probability including diagonals and zero rules."""
        a, b = str(alpha), str(beta)
        if dp < 0 or ep < 0 or dp + ep > self.n - 1:
            return 0.0

        def off(key: str) -> float:
            arr = {"01": self.t01, "10": self.t10, "?1": self.tq1, "?0": self.tq0}[key]
            return float(arr[dp, ep]) if ep < arr.shape[1] else 0.0

        if a in "01" and b == "?":
            return 0.0
        if a == "0":
            return off("01") if b == "1" else 1.0 - off("01")
        if a == "1":
            return off("10") if b == "0" else 1.0 - off("10")
        if a == "?":
            if b == "1":
                return off("?1")
            if b == "0":
                return off("?0")
            return 1.0 - off("?0") - off("?1")
        raise ValueError(f"bad symbols {alpha!r}->{beta!r}")


def _lookup_log(arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx)
    ok = (idx >= 0) & (idx < arr.size)
    return np.where(ok, arr[np.clip(idx, 0, arr.size - 1)], NEG_INF)


def _finalize(logM: np.ndarray, log_norm: np.ndarray, what: str) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        vals = np.exp(logM - log_norm)
    vals = np.where(np.isfinite(log_norm), vals, 0.0)
    return _check_range(vals, what)


def _check_range(vals: np.ndarray, what: str) -> np.ndarray:
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if lo < -ENTRY_TOL or hi > 1.0 + ENTRY_TOL:
        raise TableBuildError(f"{what}: entry out of [0,1]: min={lo:.3e} max={hi:.3e}")
    return np.clip(vals, 0.0, 1.0)


# ---------------------------------------------------------------------------
# sphere-restricted decoder (EaED+)
# ---------------------------------------------------------------------------


def eaedplus_table(spec: ComponentCodeSpec, tables: WeightTables) -> TransitionTable:
    """Transition probabilities of the sphere-restricted decoder.

    For alpha != beta the decoder moves k to beta only if the input lies in
    the ternary sphere of a codeword with c_k = beta. Counting codewords by
    their weight b1 on the n-1 free positions and the error pattern by its
    erasures/differences on the codeword's 1-coordinates gives a triple sum
    over (delta', b_1?, b_10).
    """
    n, d_des = spec.n, spec.d_des
    D = np.arange(n)
    arrays = {}
    for alpha, beta in (("0", "1"), ("1", "0"), ("?", "1"), ("?", "0")):
        is_q = alpha == "?"
        logAk = tables.logA_fixed(int(beta))
        out = np.zeros((n, d_des))
        for ep in range(d_des - (1 if is_q else 0)):
            dmax = (d_des - ep - 1 - (1 if is_q else 0)) // 2 - (0 if is_q else 1)
            if dmax < 0:
                continue
            terms = []
            for dp in range(dmax + 1):
                for b10 in range(dp + 1):
                    for b1q in range(ep + 1):
                        b1 = D - dp + b1q + 2 * b10
                        term = _lookup_log(logAk, b1 + (beta == "1"))
                        term = term + log_multinom(b1, b1q, b10, limit=n)
                        term = term + log_multinom(n - 1 - b1, dp - b10, ep - b1q, limit=n)
                        terms.append(term)
            logM = logsumexp(np.stack(terms), axis=0)
            log_omega = log_multinom(n - 1, D, ep, limit=n)
            out[:, ep] = _finalize(logM, log_omega, f"eaedplus {alpha}->{beta} E'={ep}")
        arrays[(alpha, beta)] = out
    return _assemble("eaedplus", spec, tables, arrays)


# ---------------------------------------------------------------------------
# randomized error-and-erasure decoder (EaED)
# ---------------------------------------------------------------------------

# Coefficient naming below: an error pattern pair (e1, e2) is drawn by
# filling the E erased coordinates with a uniform vector and its complement.
# Counts are over position tuples; a subscript like b_1010 lists the symbols
# of the words in the tuple order given in each docstring.


def _bounded_sums(nvars: int, budget: int):
    """All nonneg integer tuples of length nvars with sum <= budget."""
    if nvars == 0:
        yield ()
        return
    for first in range(budget + 1):
        for rest in _bounded_sums(nvars - 1, budget - first):
            yield (first,) + rest


def _m3_terms(
    n: int,
    t: int,
    ep: int,
    mismatch_a1: bool,
    log_ak_beta: np.ndarray,
    beta_one: bool,
    D: np.ndarray,
) -> np.ndarray:
    """log |M3| per D': pairs whose first fill lands in a sphere of C_k^beta.

    Tuple order (c, e1, e2); the free coefficients describe how e1 differs
    from c (bounded by the decoding radius) and how e2's fill relates to
    them on the n-1 free positions.
    """
    budget = t - (1 if mismatch_a1 else 0)
    terms = []
    for b100, b101, b010, b011 in _bounded_sums(4, budget):
        for b110 in range(ep + 1):
            b001 = ep - b110 - b101 - b010
            if b001 < 0:
                continue
            b111 = D - b011  # both fills 1 at c's 1-coordinates
            b1 = b100 + b101 + b110 + b111
            b11 = b110 + b111
            b10 = b100 + b101
            b01 = b010 + b011
            b0 = n - 1 - b1
            b00 = b0 - b01
            b000 = b00 - b001
            valid = (b111 >= 0) & (b000 >= 0)
            term = _lookup_log(log_ak_beta, b1 + (1 if beta_one else 0))
            term = term + log_binom(b1, b11, limit=n) + log_binom(b0, b01, limit=n)
            term = (
                term
                + log_binom(b11, b111, limit=n)
                + log_binom(np.full_like(D, b10), b101, limit=n)
                + log_binom(np.full_like(D, b01), b011, limit=n)
                + log_binom(b00, b001, limit=n)
            )
            terms.append(np.where(valid, term, NEG_INF))
    return logsumexp(np.stack(terms), axis=0)


_VAR_NAMES = (
    "0001", "0010", "0011", "0100", "0101", "0110", "0111",
    "1000", "1001", "1010", "1011", "1100", "1101", "1110",
)
_E_SET = ("0001", "0010", "0101", "0110", "1001", "1010", "1101", "1110")
_C_SET = ("1000", "1010", "1100", "1110", "0001", "0011", "0101", "0111")
_D_SET = ("0100", "0101", "0010", "0011", "1100", "1101", "1010", "1011")


def _pair_configs(t: int, ep: int, c_budget: int, d_budget: int) -> dict[str, np.ndarray]:
    """Enumerate 4-word overlap configurations for the pair counts.

    Tuple order (c1, c2, e2, e1); b_wxyz counts free positions with c1=w,
    c2=x, e2=y, e1=z. Constraints: the e1<->e2 disagreements total E', the
    c1-e1 and c2-e2 distances stay within the decoding radius, and the
    both-ones count b_1111 is deferred (it is D' minus the enumerated
    both-ones coefficients).
    """
    cols: list[tuple[int, ...]] = []
    for c_vals in _bounded_sums(8, c_budget):
        cv = dict(zip(_C_SET, c_vals))
        d_used = cv["0101"] + cv["0011"] + cv["1100"] + cv["1010"]
        if d_used > d_budget:
            continue
        e_used_c = cv["0001"] + cv["0101"] + cv["1010"] + cv["1110"]
        if e_used_c > ep:
            continue
        for b0100, b0010, b1101, b1011 in _bounded_sums(4, d_budget - d_used):
            e_used = e_used_c + b0010 + b1101
            resid = ep - e_used
            if resid < 0:
                continue
            for b0110 in range(resid + 1):
                b1001 = resid - b0110
                row = {
                    **cv,
                    "0100": b0100,
                    "0010": b0010,
                    "1101": b1101,
                    "1011": b1011,
                    "0110": b0110,
                    "1001": b1001,
                }
                cols.append(tuple(row[name] for name in _VAR_NAMES))
    arr = np.array(cols, dtype=np.int64).reshape(-1, len(_VAR_NAMES))
    return {name: arr[:, i] for i, name in enumerate(_VAR_NAMES)}


def _pair_count_terms(
    n: int,
    v: dict[str, np.ndarray],
    dprime: np.ndarray,
    tables: WeightTables,
    beta1: int,
    beta2: int,
    tie_indicators: tuple[int, int] | None,
) -> np.ndarray:
    """log count per configuration (columns) x D' (rows) for M4 / M5.

    With ``tie_indicators`` set to the position-k contributions to the
    unerased distances from c1 and c2, the second codeword must win or tie
    the distance comparison; ties are weighted 1/2.
    """
    K = next(iter(v.values())).size
    Dcol = dprime[:, None]
    s1 = (v["0011"] + v["0111"] + v["1011"])[None, :]
    b1111 = Dcol - s1
    total_small = sum(v[name] for name in _VAR_NAMES)[None, :]
    b0000 = (n - 1) - total_small - b1111
    valid = (b1111 >= 0) & (b0000 >= 0)

    def c3(name: str):  # 3-index counts (c1, c2, e2); last index summed out
        if name == "111":
            return v["1110"][None, :] + b1111
        if name == "000":
            return b0000 + v["0001"][None, :]
        return (v[name + "0"] + v[name + "1"])[None, :]

    b3 = {name: c3(name) for name in ("000", "001", "010", "011", "100", "101", "110", "111")}
    b2 = {
        "00": b3["000"] + b3["001"],
        "01": b3["010"] + b3["011"],
        "10": b3["100"] + b3["101"],
        "11": b3["110"] + b3["111"],
    }

    i1, i0 = (1 if beta1 == 1 else 0), 0
    if beta1 == beta2:
        args = (b2["11"] + (beta1 == 1), b2["10"], b2["01"], b2["00"] + (beta1 == 0))
        pos_k = "11" if beta1 == 1 else "00"
    else:
        args = (b2["11"], b2["10"] + (beta1 == 1), b2["01"] + (beta1 == 0), b2["00"])
        pos_k = "10" if beta1 == 1 else "01"
    comp = {"11": args[0], "10": args[1], "01": args[2], "00": args[3]}[pos_k]
    with np.errstate(divide="ignore", invalid="ignore"):
        logB = log_biweight(tables, *args) + np.log(comp / n)

    term = logB
    for vv in ("00", "01", "10", "11"):  # ways to place e2 given (c1, c2)
        b_vv1 = b3[vv[0] + vv[1] + "1"]
        term = term + log_binom(b2[vv], b_vv1, limit=n)
    for vvv in ("000", "001", "010", "011", "100", "101", "110", "111"):
        b_vvv1 = b1111 if vvv == "111" else v[vvv + "1"][None, :]
        term = term + log_binom(b3[vvv], b_vvv1, limit=n)

    if tie_indicators is not None:
        ind1, ind2 = tie_indicators
        d_c1 = (v["1000"] + v["1100"] + v["0011"] + v["0111"])[None, :] + ind1
        d_c2 = (v["0100"] + v["1100"] + v["0011"] + v["1011"])[None, :] + ind2
        win = d_c2 < d_c1
        tie = d_c2 == d_c1
        term = np.where(win, term, np.where(tie, term - LOG2, NEG_INF))

    return np.where(valid, term, NEG_INF)


def _eaed_entry(
    spec: ComponentCodeSpec,
    tables: WeightTables,
    alpha: str,
    beta: str,
) -> np.ndarray:
    """T(alpha -> beta) for the randomized decoder, all (D', E') at once."""
    n, t, d_des = spec.n, spec.t, spec.d_des
    D = np.arange(n)
    beta_i = int(beta)
    log_ak = tables.logA_fixed(beta_i)
    is_q = alpha == "?"
    pairs = [(1, 0), (0, 1)] if is_q else [(int(alpha), int(alpha))]
    out = np.zeros((n, d_des))
    emax = d_des - 1 - (1 if is_q else 0)
    for ep in range(emax + 1):
        log_m_parts = []  # per (a1, a2): [logM3, logM4, logM5]
        for a1, a2 in pairs:
            log_m3 = _m3_terms(n, t, ep, a1 != beta_i, log_ak, beta_i == 1, D)

            cfg4 = _pair_configs(t, ep, t - (a1 != beta_i), t - (a2 != beta_i))
            log_m4 = _accumulate_pairs(n, cfg4, D, tables, beta_i, beta_i, None)

            # position-k contributions to the unerased distances (alpha = ?
            # leaves k erased, so it contributes to neither)
            a_int = None if is_q else int(alpha)
            inds = (0, 0) if is_q else (int(a_int != beta_i), int(a_int == beta_i))
            cfg5 = _pair_configs(t, ep, t - (a1 != beta_i), t - (a2 != (1 - beta_i)))
            log_m5 = _accumulate_pairs(n, cfg5, D, tables, beta_i, 1 - beta_i, inds)
            log_m_parts.append((log_m3, log_m4, log_m5))

        e_total = ep + (1 if is_q else 0)
        log_norm = log_multinom(n - 1, D, ep, limit=n) + e_total * LOG2
        vals = np.zeros(n)
        for log_m3, log_m4, log_m5 in log_m_parts:
            with np.errstate(invalid="ignore"):
                vals += 2.0 * np.exp(log_m3 - log_norm)
                vals -= np.exp(log_m4 - log_norm)
                vals -= 2.0 * np.exp(log_m5 - log_norm)
        vals = np.where(np.isfinite(log_norm), np.nan_to_num(vals, nan=0.0), 0.0)
        out[:, ep] = _check_range(vals, f"eaed {alpha}->{beta} E'={ep}")
    return out


def _accumulate_pairs(
    n: int,
    cfg: dict[str, np.ndarray],
    D: np.ndarray,
    tables: WeightTables,
    beta1: int,
    beta2: int,
    tie_indicators: tuple[int, int] | None,
    block: int = 64,
) -> np.ndarray:
    """logsumexp of the pair-count terms over configurations, blocked on D'."""
    if next(iter(cfg.values())).size == 0:
        return np.full(D.size, NEG_INF)
    out = np.empty(D.size)
    for lo in range(0, D.size, block):
        chunk = D[lo : lo + block]
        terms = _pair_count_terms(n, cfg, chunk, tables, beta1, beta2, tie_indicators)
        out[lo : lo + block] = logsumexp(terms, axis=1)
    return out


def eaed_table(spec: ComponentCodeSpec, tables: WeightTables) -> TransitionTable:
    """Transition probabilities of the randomized error-and-erasure decoder.

    Counts ordered binary fill pairs: |M| = 2|M3| - |M4| - 2|M5| per fixed
    pair of position-k fill bits, where M3 counts first-fill sphere hits,
    M4 the double hits (inclusion-exclusion), and M5 the hits lost to a
    closer codeword with the opposite k-symbol (ties weighted 1/2).
    Normalization is by |Omega| * 2^E fill pairs.
    """
    arrays = {}
    for alpha, beta in (("0", "1"), ("1", "0"), ("?", "1"), ("?", "0")):
        arrays[(alpha, beta)] = _eaed_entry(spec, tables, alpha, beta)
    return _assemble("eaed", spec, tables, arrays)


# ---------------------------------------------------------------------------
# assembly, persistence
# ---------------------------------------------------------------------------


def _assemble(
    decoder: str,
    spec: ComponentCodeSpec,
    tables: WeightTables,
    arrays: dict,
) -> TransitionTable:
    n = spec.n
    mask = (np.arange(n)[:, None] + np.arange(spec.d_des)[None, :]) <= n - 1
    for key in arrays:
        arrays[key] = arrays[key] * mask
    tq0, tq1 = arrays[("?", "0")], arrays[("?", "1")]
    _check_range(tq0 + tq1, f"{decoder} ?-row sum")
    meta = {
        "decoder": decoder,
        "code": spec.label(),
        "nu": spec.nu,
        "t": spec.t,
        "variant": spec.variant,
        "weight_mode": tables.mode,
    }
    return TransitionTable(
        decoder=decoder,
        n=n,
        d_des=spec.d_des,
        t01=arrays[("0", "1")],
        t10=arrays[("1", "0")],
        tq1=tq1,
        tq0=tq0,
        meta=meta,
    )


def build_table(
    spec: ComponentCodeSpec, tables: WeightTables, decoder: str
) -> TransitionTable:
    if decoder == "eaed":
        return eaed_table(spec, tables)
    if decoder == "eaedplus":
        return eaedplus_table(spec, tables)
    raise ValueError(f"unknown decoder {decoder!r}")


TABLE_FORMAT_VERSION = 1


def table_cache_key(spec: ComponentCodeSpec, decoder: str, weight_mode: str) -> str:
    ident = json.dumps(
        {
            "v": TABLE_FORMAT_VERSION,
            "nu": spec.nu,
            "t": spec.t,
            "variant": spec.variant,
            "n": spec.n,
            "k": spec.k,
            "decoder": decoder,
            "weight_mode": weight_mode,
        },
        sort_keys=True,
    )
    return hashlib.sha256(ident.encode()).hexdigest()[:16]


def default_cache_dir() -> str:
    return os.environ.get(
        "EEPC_CACHE_DIR", os.path.join(os.path.expanduser("~"), ".cache", "eepc")
    )


def cached_table(
    spec: ComponentCodeSpec,
    tables: WeightTables,
    decoder: str,
    cache_dir: str | None = None,
) -> TransitionTable:
    """Build the table or load it from the on-disk cache."""
    cache_dir = cache_dir or default_cache_dir()
    key = table_cache_key(spec, decoder, tables.mode)
    path = os.path.join(cache_dir, f"ttable_{key}.npz")
    if os.path.exists(path):
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            return TransitionTable(
                decoder=meta["decoder"],
                n=int(data["n"]),
                d_des=int(data["d_des"]),
                t01=data["t01"],
                t10=data["t10"],
                tq1=data["tq1"],
                tq0=data["tq0"],
                meta=meta,
            )
    table = build_table(spec, tables, decoder)
    os.makedirs(cache_dir, exist_ok=True)
    tmp = os.path.join(cache_dir, f"ttable_{key}.tmp{os.getpid()}.npz")
    np.savez(
        tmp,
        meta=json.dumps(table.meta),
        n=table.n,
        d_des=table.d_des,
        t01=table.t01,
        t10=table.t10,
        tq1=table.tq1,
        tq0=table.tq0,
    )
    os.replace(tmp, path)
    return table


def export_table_csv(table: TransitionTable, path: str) -> None:
    """Dump every stored entry as (alpha, beta, Dp, Ep, prob) rows."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "Dp", "Ep", "prob"])
        for alpha, beta, arr in (
            ("0", "1", table.t01),
            ("1", "0", table.t10),
            ("?", "1", table.tq1),
            ("?", "0", table.tq0),
        ):
            for dp in range(arr.shape[0]):
                for ep in range(arr.shape[1]):
                    if dp + ep <= table.n - 1:
                        writer.writerow([alpha, beta, dp, ep, repr(float(arr[dp, ep]))])
