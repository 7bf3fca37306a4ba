"""Batched component decoding for codes up to length 63.

Words are packed into uint64 bitmasks (bit i = coordinate i). Decoding uses
a full lookup table from the polynomial remainder y(x) mod g(x) to the
correctable error pattern of weight <= t, which reproduces the bounded
distance decoder exactly: remainders of distinct weight-<=t patterns are
distinct because the spheres are disjoint. Even-weight and shortened
variants are handled by decoding in the parent cyclic code and
post-filtering, mirroring the scalar decoder.

Ternary words are (value, erasure) mask pairs; erased coordinates carry a 0
in the value mask.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .bch import ComponentCodeSpec, build_bch


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack an (m, n) 0/1 matrix into m uint64 masks (n <= 64)."""
    weights = (np.uint64(1) << np.arange(bits.shape[-1], dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def unpack_words(words: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n, dtype=np.uint64)
    return ((words[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)


class SyndromeLut:
    """Exact batched BDD for a component code with n <= 63."""

    def __init__(self, spec: ComponentCodeSpec):
        if spec.n > 63:
            raise ValueError("lookup decoder supports n <= 63")
        self.spec = spec
        self.n = spec.n
        self.mask = np.uint64((1 << spec.n) - 1)
        plain = build_bch(spec.nu, spec.t)
        g = 0
        for i, b in enumerate(plain.genpoly):
            g |= b << i
        r = len(plain.genpoly) - 1
        n_cyc = spec.cyclic_n
        offset = 1 if spec.is_shortened else 0

        # remainder of x^i mod g for every cyclic position
        col = np.zeros(n_cyc, dtype=np.int64)
        rem = 1
        for i in range(n_cyc):
            col[i] = rem
            rem <<= 1
            if rem >> r & 1:
                rem ^= g
        self._col = col
        self._offset = offset

        # per-byte remainder tables over the length-n word mask
        nbytes = (spec.n + 7) // 8
        bt = np.zeros((nbytes, 256), dtype=np.int64)
        for bp in range(nbytes):
            for v in range(256):
                acc = 0
                for j in range(8):
                    pos = 8 * bp + j
                    if (v >> j) & 1 and pos < spec.n:
                        acc ^= col[pos + offset]
                bt[bp, v] = acc
        self._bt = bt

        # remainder -> correctable error pattern (cyclic domain), -1 = fail
        lut = np.full(1 << r, -1, dtype=np.int64)
        lut[0] = 0
        positions = np.arange(n_cyc)
        for w in range(1, spec.t + 1):
            combos = np.array(list(combinations(positions, w)), dtype=np.int64)
            rems = np.bitwise_xor.reduce(col[combos], axis=1)
            masks = (np.int64(1) << combos).sum(axis=1)
            lut[rems] = masks
        self._lut = lut
        self._even = spec.is_even

    def _remainder(self, words: np.ndarray) -> np.ndarray:
        acc = np.zeros(words.shape, dtype=np.int64)
        for bp in range(self._bt.shape[0]):
            byte = ((words >> np.uint64(8 * bp)) & np.uint64(0xFF)).astype(np.int64)
            acc ^= self._bt[bp, byte]
        return acc

    def decode(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (codewords, ok); failed entries keep the input word."""
        words = np.asarray(words, dtype=np.uint64)
        err = self._lut[self._remainder(words)]
        ok = err >= 0
        err = np.where(ok, err, 0).astype(np.uint64)
        if self._offset:
            ok &= (err & np.uint64(1)) == 0
            err >>= np.uint64(1)
        corrected = words ^ (err & self.mask)
        if self._even:
            ok &= popcount(corrected) % 2 == 0
        return np.where(ok, corrected, words), ok


def eaed_batch(
    lut: SyndromeLut,
    val: np.ndarray,
    er: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized EaED over packed ternary words; matches the scalar decoder.

    Each word draws its own fill; ties between two distinct candidates are
    broken by an independent random bit.
    """
    val = np.asarray(val, dtype=np.uint64)
    er = np.asarray(er, dtype=np.uint64)
    d_des = lut.spec.d_des
    n_erased = popcount(er)
    active = n_erased < d_des

    p = rng.integers(0, 1 << 64, size=val.shape, dtype=np.uint64)
    c1, ok1 = lut.decode(val | (p & er))
    c2, ok2 = lut.decode(val | (~p & er))
    unmask = ~er & lut.mask
    d1 = popcount((c1 ^ val) & unmask)
    d2 = popcount((c2 ^ val) & unmask)
    same = c1 == c2

    pick1 = ok1 & (~ok2 | same | (d1 < d2))
    pick2 = ok2 & ~pick1 & (~ok1 | (d2 < d1))
    tie = ok1 & ok2 & ~same & (d1 == d2)
    coin = rng.integers(0, 2, size=val.shape, dtype=np.uint64).astype(bool)
    pick1 |= tie & coin
    pick2 |= tie & ~coin

    decoded = (pick1 | pick2) & active
    out_val = np.where(decoded, np.where(pick1, c1, c2), val)
    out_er = np.where(decoded, np.uint64(0), er)
    return out_val, out_er


def eaed_plus_batch(
    lut: SyndromeLut, val: np.ndarray, er: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sphere-restricted decoder (deterministic)."""
    val = np.asarray(val, dtype=np.uint64)
    er = np.asarray(er, dtype=np.uint64)
    d_des = lut.spec.d_des
    n_erased = popcount(er)
    budget = (d_des - 1 - n_erased) // 2

    c1, ok1 = lut.decode(val)
    c2, ok2 = lut.decode(val | er)
    unmask = ~er & lut.mask
    hit1 = ok1 & (popcount((c1 ^ val) & unmask) <= budget) & (n_erased < d_des)
    hit2 = ok2 & (popcount((c2 ^ val) & unmask) <= budget) & (n_erased < d_des) & ~hit1

    decoded = hit1 | hit2
    out_val = np.where(decoded, np.where(hit1, c1, c2), val)
    out_er = np.where(decoded, np.uint64(0), er)
    return out_val, out_er
