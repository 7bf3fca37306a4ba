"""Error-and-erasure component decoders over the ternary alphabet {0, ?, 1}.

Ternary words are numpy int8 vectors with values 0, 1 and ERASE (= 2).
``eaed_decode`` fills the erased coordinates with a uniformly random vector
and its complement, runs the bounded distance decoder on both, and resolves
by the Hamming distance restricted to the unerased coordinates. The random
fill (instead of an all-zero fill) makes the decoder statistics independent
of the transmitted codeword, so all-zero-codeword simulation is sound.

``eaed_plus_decode`` is the sphere-restricted variant: it returns a codeword
c iff 2*d(y, c | unerased) + E(y) < d_des, else the input unchanged. It is
deterministic, and whenever it corrects, the randomized decoder corrects to
the same codeword for every fill realization.
"""

from __future__ import annotations

import numpy as np

from .bch import ComponentCodeSpec, bdd_decode

ERASE = np.int8(2)


def count_erasures(y: np.ndarray) -> int:
    return int(np.count_nonzero(y == ERASE))


def unerased_distance(y: np.ndarray, a: np.ndarray, b: np.ndarray) -> int:
    """Hamming distance between a and b on the unerased coordinates of y."""
    keep = y != ERASE
    return int(np.count_nonzero(a[keep] != b[keep]))


def _fill(y: np.ndarray, erased: np.ndarray, bits: np.ndarray) -> np.ndarray:
    out = y.astype(np.uint8).copy()
    out[erased] = bits
    return out


def eaed_decode(
    spec: ComponentCodeSpec,
    y: np.ndarray,
    rng: np.random.Generator,
    fill: np.ndarray | None = None,
) -> np.ndarray:
    """Error-and-erasure decode; returns a codeword or y unchanged.

    ``fill`` overrides the random fill vector (used by exhaustive tests);
    normal callers leave it None. A tie between two distinct candidate
    codewords at equal unerased distance consumes one rng draw.
    """
    y = np.asarray(y, dtype=np.int8)
    erased = np.flatnonzero(y == ERASE)
    if erased.size >= spec.d_des:
        return y.copy()
    if fill is None:
        fill = rng.integers(0, 2, size=erased.size, dtype=np.uint8)
    else:
        fill = np.asarray(fill, dtype=np.uint8)
    w1 = bdd_decode(spec, _fill(y, erased, fill))
    w2 = bdd_decode(spec, _fill(y, erased, fill ^ 1))
    if w1 is None and w2 is None:
        return y.copy()
    if w2 is None:
        return w1.astype(np.int8)
    if w1 is None:
        return w2.astype(np.int8)
    if np.array_equal(w1, w2):
        return w1.astype(np.int8)
    d1 = unerased_distance(y, y, w1.astype(np.int8))
    d2 = unerased_distance(y, y, w2.astype(np.int8))
    if d1 < d2:
        return w1.astype(np.int8)
    if d2 < d1:
        return w2.astype(np.int8)
    return (w1 if rng.integers(0, 2) == 0 else w2).astype(np.int8)


def eaed_plus_decode(
    spec: ComponentCodeSpec,
    y: np.ndarray,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Sphere-restricted error-and-erasure decode (deterministic; rng unused).

    With E erasures, any codeword at unerased distance D with 2D + E < d_des
    is recovered by at least one of the two complementary fills, and the
    spheres are disjoint, so trying the all-zero fill and its complement
    finds the sphere's codeword whenever one exists.
    """
    y = np.asarray(y, dtype=np.int8)
    erased = np.flatnonzero(y == ERASE)
    E = erased.size
    if E >= spec.d_des:
        return y.copy()
    budget = (spec.d_des - 1 - E) // 2  # max unerased distance inside the sphere
    zeros = np.zeros(E, dtype=np.uint8)
    for bits in (zeros, zeros ^ 1):
        w = bdd_decode(spec, _fill(y, erased, bits))
        if w is not None and unerased_distance(y, y, w.astype(np.int8)) <= budget:
            return w.astype(np.int8)
    return y.copy()
