"""BI-AWGN channel with ternary output quantization.

Antipodal signalling with amplitude 1 and noise variance
sigma^2 = 1 / (2 Es/N0). Received values inside [-T, +T] are declared
erasures; outside the interval the usual hard decision applies. SNR is
linear everywhere inside the library; dB conversion happens only at the
CLI boundary.

Quantizer boundary convention: the closed interval [-T, +T] maps to '?'.
The boundary has probability zero, so the tie-break is irrelevant for the
analysis; the sampler uses strict inequalities for the binary decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .ternary import ERASE


def db_to_lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def lin_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ChannelParams:
    es_n0: float  # linear
    threshold: float  # erasure threshold T >= 0

    def __post_init__(self):
        if self.es_n0 <= 0:
            raise ValueError("es_n0 must be positive")
        if self.threshold < 0:
            raise ValueError("erasure threshold must be nonnegative")

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.es_n0))


@dataclass(frozen=True)
class ChannelTriple:
    delta: float  # error probability
    eps: float  # erasure probability

    @property
    def correct(self) -> float:
        return 1.0 - self.delta - self.eps


def qfunc(x: float) -> float:
    return 0.5 * erfc(x / math.sqrt(2.0))


def transition_probs(params: ChannelParams) -> ChannelTriple:
    """delta = Q(sqrt(2 Es/N0) (T+1)), eps from the two quantizer boundaries."""
    s = math.sqrt(2.0 * params.es_n0)
    delta = qfunc(s * (params.threshold + 1.0))
    eps = 1.0 - qfunc(s * (params.threshold - 1.0)) - delta
    return ChannelTriple(delta=float(delta), eps=float(max(eps, 0.0)))


def _xlog2x_ratio(p: float, denom: float) -> float:
    # p * log2(2p / denom) with 0 log 0 := 0
    if p <= 0.0:
        return 0.0
    return p * math.log2(2.0 * p / denom)


def capacity_from_triple(triple: ChannelTriple) -> float:
    denom = 1.0 - triple.eps
    if denom <= 0.0:
        return 0.0
    return _xlog2x_ratio(triple.correct, denom) + _xlog2x_ratio(triple.delta, denom)


def capacity(params: ChannelParams) -> float:
    """Capacity in bits per channel use of the quantized channel."""
    return capacity_from_triple(transition_probs(params))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def capacity_optimal_threshold(es_n0: float, t_max: float = 2.0) -> tuple[float, float]:
    """(T*, C(T*)) maximizing capacity over T >= 0 (golden section, |dT| < 1e-6)."""

    def f(t: float) -> float:
        return capacity(ChannelParams(es_n0, t))

    # coarse bracket around the best grid point, then golden section
    grid = np.linspace(0.0, t_max, 201)
    vals = [f(t) for t in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    t_star = _golden_max(f, lo, hi, 1e-6)
    c_star = f(t_star)
    c0 = f(0.0)
    if c0 >= c_star:
        return 0.0, c0
    return float(t_star), float(c_star)


def simulate_symbols(
    params: ChannelParams, bits: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Transmit bits over the channel and quantize to {0, ?, 1}."""
    bits = np.asarray(bits)
    r = np.where(bits == 0, 1.0, -1.0) + rng.normal(0.0, params.sigma, size=bits.shape)
    out = np.full(bits.shape, ERASE, dtype=np.int8)
    out[r > params.threshold] = 0
    out[r < -params.threshold] = 1
    return out
