"""GF(2^nu) arithmetic via exp/log lookup tables."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Minimal-weight primitive polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLY = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


class Gf2m:
    """Finite field GF(2^nu); elements are plain ints in [0, 2^nu).

    ``exp`` is doubled in length so products of two logs index it without a
    modulo. ``log[0]`` is unusable; callers must special-case zero.
    """

    def __init__(self, nu: int):
        if nu not in PRIMITIVE_POLY:
            raise ValueError(f"no primitive polynomial configured for nu={nu}")
        self.nu = nu
        self.order = 1 << nu
        self.size = self.order - 1  # multiplicative group order
        poly = PRIMITIVE_POLY[nu]
        exp = np.zeros(2 * self.size, dtype=np.int64)
        log = np.full(self.order, -(1 << 40), dtype=np.int64)
        x = 1
        for i in range(self.size):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial {poly:#x} is not primitive for nu={nu}")
        exp[self.size :] = exp[: self.size]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^nu)")
        return int(self.exp[self.size - self.log[a]])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def alpha_pow(self, e: int) -> int:
        """alpha^e for any integer exponent."""
        return int(self.exp[e % self.size])

    def poly_mul(self, p: list[int], q: list[int]) -> list[int]:
        """Product of polynomials with GF(2^nu) coefficients (index = degree)."""
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j, b in enumerate(q):
                if b:
                    out[i + j] ^= self.mul(a, b)
        return out

    def poly_eval(self, p: list[int], x: int) -> int:
        acc = 0
        for c in reversed(p):
            acc = self.mul(acc, x) ^ c
        return acc


@lru_cache(maxsize=None)
def gf2m_field(nu: int) -> Gf2m:
    return Gf2m(nu)
