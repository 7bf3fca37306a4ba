"""Weight distributions of component codes and the biweight approximation.

Exact distributions come from direct enumeration (2^k <= 2^26) or from
enumerating the dual and applying the MacWilliams identity (2^(n-k) <=
2^26); otherwise the asymptotically tight binomial approximation
A(b) ~ 2^(-nu*t) * C(n, b) is used. Even-weight subcodes zero the odd
entries of the parent distribution; single-bit shortened codes scale the
parent by (n_p - b)/n_p, which is exact for cyclic parents.

Counts can exceed the double range for large codes only in intermediate
products, so every accessor is also available in the natural-log domain;
log(0) is represented by -inf.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bch import ComponentCodeSpec, make_code

log = logging.getLogger(__name__)

NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def _log_factorial(limit: int) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, limit + 1)))])


def log_binom(n, k, *, limit: int) -> np.ndarray:
    """log C(n, k) with the zero convention for invalid arguments."""
    lf = _log_factorial(limit)
    n = np.asarray(n)
    k = np.asarray(k)
    valid = (n >= 0) & (k >= 0) & (k <= n)
    ns = np.clip(n, 0, limit)
    ks = np.clip(k, 0, limit)
    out = lf[ns] - lf[ks] - lf[ns - ks]
    return np.where(valid, out, NEG_INF)


def log_multinom(n, k1, k2, *, limit: int) -> np.ndarray:
    """log of n! / (k1! k2! (n-k1-k2)!) with the zero convention."""
    lf = _log_factorial(limit)
    n = np.asarray(n)
    k1 = np.asarray(k1)
    k2 = np.asarray(k2)
    rest = n - k1 - k2
    valid = (n >= 0) & (k1 >= 0) & (k2 >= 0) & (rest >= 0)
    out = (
        lf[np.clip(n, 0, limit)]
        - lf[np.clip(k1, 0, limit)]
        - lf[np.clip(k2, 0, limit)]
        - lf[np.clip(rest, 0, limit)]
    )
    return np.where(valid, out, NEG_INF)


@dataclass
class WeightTables:
    """Weight distribution A(b) of one component code plus derived accessors."""

    n: int
    mode: str  # "exact" | "binomial"
    logA: np.ndarray  # shape (n+1,)
    counts: tuple[int, ...] | None = None  # exact integers in exact mode
    # exact biweight counts, logB[b11, b10, b01], when pair enumeration is
    # feasible (small k); None means the analytical approximation is used
    logB_exact: np.ndarray | None = None
    _logA_fixed: dict = field(default_factory=dict, repr=False)

    @property
    def A(self) -> np.ndarray:
        return np.exp(self.logA)

    def total(self) -> float:
        return float(np.exp(self.logA[np.isfinite(self.logA)]).sum())

    def logA_fixed(self, alpha: int) -> np.ndarray:
        """log A_k^alpha(b): codewords of weight b whose k-th symbol is alpha.

        Cyclic codes: exact (A_k^alpha = (b_alpha / n) A). Shortened codes use
        the same formula as an approximation.
        """
        if alpha not in self._logA_fixed:
            b = np.arange(self.n + 1)
            b_alpha = b if alpha == 1 else self.n - b
            with np.errstate(divide="ignore"):
                scale = np.log(b_alpha / self.n)
            self._logA_fixed[alpha] = self.logA + scale
        return self._logA_fixed[alpha]


def _gf2_poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = num.copy()
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        if num[i]:
            q[i - dd] = 1
            for j, b in enumerate(den):
                num[i - dd + j] ^= b
    return q, num[:dd]


def _generator_matrix(genpoly: tuple[int, ...], n: int, k: int) -> np.ndarray:
    g = np.array(genpoly, dtype=np.uint8)
    rows = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        rows[i, i : i + g.size] = g
    return rows


def _dual_generator_matrix(genpoly: tuple[int, ...], n: int) -> np.ndarray:
    # h(x) = (x^n + 1) / g(x); the dual is generated by the reversal of h
    xn1 = [0] * (n + 1)
    xn1[0] = xn1[n] = 1
    h, rem = _gf2_poly_divmod(xn1, list(genpoly))
    if any(rem):
        raise AssertionError("generator does not divide x^n + 1")
    h_rev = tuple(reversed(h))
    k_dual = n - (len(h) - 1)
    return _generator_matrix(h_rev, n, k_dual)


def _weight_histogram(rows: np.ndarray) -> np.ndarray:
    """Weight histogram of the span of the given GF(2) generator rows."""
    k, n = rows.shape
    nlimb = (n + 63) // 64
    packed = np.zeros((k, nlimb), dtype=np.uint64)
    for i in range(k):
        for limb in range(nlimb):
            bits = rows[i, 64 * limb : 64 * limb + 64]
            packed[i, limb] = (
                bits.astype(np.uint64) << np.arange(bits.size, dtype=np.uint64)
            ).sum(dtype=np.uint64)

    def span(sub: np.ndarray) -> np.ndarray:
        acc = np.zeros((1, nlimb), dtype=np.uint64)
        for row in sub:
            acc = np.concatenate([acc, acc ^ row])
        return acc

    ka = min(k, 13)
    lo = span(packed[:ka])
    hi = span(packed[ka:])
    hist = np.zeros(n + 1, dtype=np.int64)
    for word in hi:
        w = np.bitwise_count(lo ^ word).sum(axis=1).astype(np.int64)
        hist += np.bincount(w, minlength=n + 1)
    return hist


def _krawtchouk(n: int, j: int, i: int) -> int:
    return sum(
        (-1) ** s * math.comb(i, s) * math.comb(n - i, j - s)
        for s in range(0, min(i, j) + 1)
    )


def macwilliams(dual_counts: list[int] | np.ndarray, n: int) -> list[int]:
    """Exact weight distribution of the code from its dual's distribution."""
    dual_counts = [int(c) for c in dual_counts]
    size_dual = sum(dual_counts)
    out = []
    nonzero = [(i, c) for i, c in enumerate(dual_counts) if c]
    for j in range(n + 1):
        acc = sum(c * _krawtchouk(n, j, i) for i, c in nonzero)
        q, r = divmod(acc, size_dual)
        if r:
            raise AssertionError("MacWilliams transform produced a non-integer count")
        out.append(q)
    return out


def _tables_from_counts(counts: list[int], n: int) -> WeightTables:
    logA = np.array([math.log(c) if c > 0 else NEG_INF for c in counts])
    return WeightTables(n=n, mode="exact", logA=logA, counts=tuple(counts))


def binomial_approximation(nu: int, t: int, n: int) -> WeightTables:
    """A(b) ~ 2^(-nu t) C(n, b) on 2t+1 <= b <= n-(2t+1), with A(0) = A(n) = 1."""
    b = np.arange(n + 1)
    logA = -nu * t * math.log(2.0) + log_binom(n, b, limit=n)
    logA[(b > 0) & (b < 2 * t + 1)] = NEG_INF
    logA[(b > n - (2 * t + 1)) & (b < n)] = NEG_INF
    logA[0] = 0.0
    logA[n] = 0.0
    return WeightTables(n=n, mode="binomial", logA=logA)


EXACT_ENUM_LIMIT = 26  # enumerate when 2^k or 2^(n-k) is at most 2^26
EXACT_BIWEIGHT_LIMIT = 13  # enumerate ordered pairs when 2^(2k) <= 2^26


def _exact_biweight(spec: ComponentCodeSpec) -> np.ndarray:
    """log of exact pair counts, indexed [b11, b10, b01] (b00 is implied)."""
    rows = _generator_matrix(spec.genpoly, spec.n, spec.k)
    weights = np.uint64(1) << np.arange(spec.n, dtype=np.uint64)
    gens = (rows.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    words = np.zeros(1, dtype=np.uint64)
    for g in gens:
        words = np.concatenate([words, words ^ g])
    m = spec.n + 1
    counts = np.zeros((m, m, m), dtype=np.int64)
    for c1 in words:
        b11 = np.bitwise_count(words & c1).astype(np.int64)
        w2 = np.bitwise_count(words).astype(np.int64)
        b10 = int(np.bitwise_count(c1)) - b11
        b01 = w2 - b11
        np.add.at(counts, (b11, b10, b01), 1)
    with np.errstate(divide="ignore"):
        return np.log(counts.astype(float))


def weight_distribution(spec: ComponentCodeSpec, mode: str | None = None) -> WeightTables:
    """Weight tables for a component code (exact when tractable)."""
    wt = _weight_distribution_a(spec, mode)
    if wt.mode == "exact" and spec.k <= EXACT_BIWEIGHT_LIMIT:
        wt.logB_exact = _exact_biweight(spec)
    return wt


def _weight_distribution_a(spec: ComponentCodeSpec, mode: str | None) -> WeightTables:
    if spec.is_shortened:
        parent = make_code(spec.nu, spec.t, "even" if spec.is_even else "plain")
        return shortened_distribution(_weight_distribution_a(parent, mode))
    if spec.is_even:
        parent = make_code(spec.nu, spec.t, "plain")
        return even_weight_distribution(_weight_distribution_a(parent, mode))

    if mode == "binomial":
        return binomial_approximation(spec.nu, spec.t, spec.n)
    if spec.k <= EXACT_ENUM_LIMIT:
        hist = _weight_histogram(_generator_matrix(spec.genpoly, spec.n, spec.k))
        return _tables_from_counts(list(hist), spec.n)
    if spec.n - spec.k <= EXACT_ENUM_LIMIT:
        dual_hist = _weight_histogram(_dual_generator_matrix(spec.genpoly, spec.n))
        return _tables_from_counts(macwilliams(dual_hist, spec.n), spec.n)
    if mode == "exact":
        raise ValueError(f"exact weight distribution intractable for {spec.label()}")
    return binomial_approximation(spec.nu, spec.t, spec.n)


def even_weight_distribution(parent: WeightTables) -> WeightTables:
    logA = parent.logA.copy()
    logA[1::2] = NEG_INF
    counts = None
    if parent.counts is not None:
        counts = tuple(c if b % 2 == 0 else 0 for b, c in enumerate(parent.counts))
    return WeightTables(n=parent.n, mode=parent.mode, logA=logA, counts=counts)


def shortened_distribution(parent: WeightTables) -> WeightTables:
    """A_Sh(b) = ((n_p - b)/n_p) A_p(b) for b = 0..n_p-1 (exact for cyclic parents)."""
    n_p = parent.n
    b = np.arange(n_p)
    with np.errstate(divide="ignore"):
        logA = parent.logA[:n_p] + np.log((n_p - b) / n_p)
    counts = None
    if parent.counts is not None:
        fracs = [Fraction((n_p - bb) * parent.counts[bb], n_p) for bb in range(n_p)]
        if all(f.denominator == 1 for f in fracs):
            counts = tuple(int(f) for f in fracs)
    return WeightTables(n=n_p - 1, mode=parent.mode, logA=logA, counts=counts)


def fixed_position_weight(tables: WeightTables, alpha: int, b1: int) -> float:
    """A_k^alpha(b1) = (b_alpha / n) A(b1); exact for cyclic codes."""
    if not 0 <= b1 <= tables.n:
        return 0.0
    b_alpha = b1 if alpha == 1 else tables.n - b1
    return float(b_alpha / tables.n * np.exp(tables.logA[b1]))


def fixed_position_count(tables: WeightTables, alpha: int, b1: int) -> int:
    """Integer-exact fixed-position count (exact mode only)."""
    if tables.counts is None:
        raise ValueError("integer counts unavailable (not exact mode)")
    if not 0 <= b1 <= tables.n:
        return 0
    b_alpha = b1 if alpha == 1 else tables.n - b1
    f = Fraction(b_alpha * tables.counts[b1], tables.n)
    if f.denominator != 1:
        raise AssertionError("fixed-position count is not an integer")
    return int(f)


def log_biweight(tables: WeightTables, b11, b10, b01, b00) -> np.ndarray:
    """log B(b11, b10, b01, b00): exact pair counts when enumerated, else
    the analytical approximation. Broadcasts over array arguments."""
    if tables.logB_exact is None:
        return log_biweight_approx(tables, b11, b10, b01, b00)
    n = tables.n
    b11, b10, b01, b00 = np.broadcast_arrays(
        np.asarray(b11), np.asarray(b10), np.asarray(b01), np.asarray(b00)
    )
    valid = (b11 >= 0) & (b10 >= 0) & (b01 >= 0) & (b00 >= 0)
    valid &= b11 + b10 + b01 + b00 == n
    idx = tuple(np.where(valid, v, 0) for v in (b11, b10, b01))
    return np.where(valid, tables.logB_exact[idx], NEG_INF)


def log_biweight_approx(tables: WeightTables, b11, b10, b01, b00) -> np.ndarray:
    """log of the biweight approximation B(b11, b10, b01, b00); broadcasts.

    Case 1: the second codeword's weight w2 is forced (0, n, or impossible)
    and B = A(b1) A(w2) holds exactly. Case 2 (w2 <= d_H(c1, c2)): a random
    overlap estimate. Case 3 (w2 > d_H): case 2 applied to the linearity
    transform (c1, c2) -> (c1, c1 + c2), which swaps b11 and b10.
    """
    n = tables.n
    b11, b10, b01, b00 = np.broadcast_arrays(
        np.asarray(b11), np.asarray(b10), np.asarray(b01), np.asarray(b00)
    )
    valid = (b11 >= 0) & (b10 >= 0) & (b01 >= 0) & (b00 >= 0)
    valid &= b11 + b10 + b01 + b00 == n
    b1 = np.clip(b11 + b10, 0, n)
    b0 = n - b1
    w2 = np.clip(b11 + b01, 0, n)
    dH = np.clip(b10 + b01, 0, n)
    logA = tables.logA
    base = np.where(valid, logA[np.where(valid, b1, 0)], NEG_INF)

    case1 = np.isneginf(logA[w2]) | (w2 == 0) | (w2 == n)
    v1 = logA[w2]
    v2 = (
        logA[w2]
        + log_binom(b1, b11, limit=n)
        + log_binom(b0, b01, limit=n)
        - log_binom(n, w2, limit=n)
    )
    v3 = (
        logA[dH]
        + log_binom(b1, b10, limit=n)
        + log_binom(b0, b01, limit=n)
        - log_binom(n, dH, limit=n)
    )
    out = np.where(case1, v1, np.where(w2 <= dH, v2, v3))
    return np.where(valid, base + out, NEG_INF)


def biweight_approx(
    tables: WeightTables, b11: int, b10: int, b01: int, b00: int, debug: bool = False
) -> float:
    """Approximate count of ordered codeword pairs with the given overlap."""
    if debug and log.isEnabledFor(logging.DEBUG):
        n = tables.n
        b1, b0, w2 = b11 + b10, b01 + b00, b11 + b01
        v2 = tables.logA[b1] + tables.logA[w2] + float(
            log_binom(b1, b11, limit=n) + log_binom(b0, b01, limit=n) - log_binom(n, w2, limit=n)
        )
        dh = b10 + b01
        v3 = tables.logA[b1] + tables.logA[dh] + float(
            log_binom(b1, b10, limit=n) + log_binom(b0, b01, limit=n) - log_binom(n, dh, limit=n)
        )
        log.debug(
            "biweight(%d,%d,%d,%d): overlap-estimate=%.6g transform-estimate=%.6g",
            b11, b10, b01, b00, math.exp(v2) if v2 > NEG_INF else 0.0,
            math.exp(v3) if v3 > NEG_INF else 0.0,
        )
    return float(np.exp(log_biweight_approx(tables, b11, b10, b01, b00)))


def fixed_position_biweight(b_value: float, n: int, b_alpha_beta: int) -> float:
    """B_k^{alpha beta} = (b_{alpha beta} / n) B; exact for cyclic codes."""
    return b_alpha_beta / n * b_value


def export_weight_csv(tables: WeightTables, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["b1", "A"])
        for b in range(tables.n + 1):
            writer.writerow([b, repr(float(np.exp(tables.logA[b])))])
