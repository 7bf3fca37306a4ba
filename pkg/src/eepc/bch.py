"""BCH-family component codes with a sphere-exact bounded distance decoder.

Codewords are numpy 0/1 vectors indexed so that position i is the
coefficient of x^i. Variants:

* ``plain``            -- (2^nu - 1, k, t) narrow-sense binary BCH code
* ``even``             -- its even-weight subcode, generator g(x)*(x+1)
* ``shortened-plain``  -- plain code with the x^0 coordinate forced to 0
                          and deleted (length/dimension drop by one)
* ``shortened-even``   -- same shortening applied to the even subcode

``bdd_decode`` returns the unique codeword within Hamming distance t of the
input, else ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2m import Gf2m, gf2m_field

VARIANTS = ("plain", "even", "shortened-plain", "shortened-even")


@dataclass(frozen=True)
class ComponentCodeSpec:
    nu: int
    n: int
    k: int
    t: int
    variant: str
    d_des: int
    genpoly: tuple[int, ...]  # genpoly[i] = coefficient of x^i

    @property
    def is_shortened(self) -> bool:
        return self.variant.startswith("shortened")

    @property
    def is_even(self) -> bool:
        return self.variant.endswith("even")

    @property
    def cyclic_n(self) -> int:
        """Length of the underlying cyclic code (parent for shortened specs)."""
        return self.n + 1 if self.is_shortened else self.n

    def field(self) -> Gf2m:
        return gf2m_field(self.nu)

    def label(self) -> str:
        return f"({self.n},{self.k},{self.t})-{self.variant}"


def _cyclotomic_coset(e: int, n: int) -> tuple[int, ...]:
    coset = []
    x = e
    while x not in coset:
        coset.append(x)
        x = (2 * x) % n
    return tuple(sorted(coset))


def _minimal_poly(field: Gf2m, coset: tuple[int, ...]) -> list[int]:
    # prod (x + alpha^c); coefficients collapse to {0,1} by conjugacy
    p = [1]
    for c in coset:
        p = field.poly_mul(p, [field.alpha_pow(c), 1])
    if any(v not in (0, 1) for v in p):
        raise AssertionError("minimal polynomial has non-binary coefficients")
    return p


def build_bch(nu: int, t: int) -> ComponentCodeSpec:
    """Narrow-sense binary BCH code of length 2^nu - 1 correcting t errors."""
    field = gf2m_field(nu)
    n = field.size
    if not 2 * t - 1 < n:
        raise ValueError(f"t={t} too large for nu={nu}")
    g = [1]
    seen: set[tuple[int, ...]] = set()
    for e in range(1, 2 * t, 2):
        coset = _cyclotomic_coset(e, n)
        if coset in seen:
            continue
        seen.add(coset)
        g = [a & 1 for a in _gf2_poly_mul(g, _minimal_poly(field, coset))]
    k = n - (len(g) - 1)
    return ComponentCodeSpec(nu, n, k, t, "plain", 2 * t + 1, tuple(g))


def _gf2_poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] ^= a & b
    return out


def derive_variant(spec: ComponentCodeSpec, kind: str) -> ComponentCodeSpec:
    """Derive the even-weight subcode or the single-bit shortened code."""
    if kind == "even":
        if spec.variant != "plain":
            raise ValueError(f"even-weight derivation requires a plain code, got {spec.variant}")
        g = tuple(_gf2_poly_mul(list(spec.genpoly), [1, 1]))
        return ComponentCodeSpec(spec.nu, spec.n, spec.k - 1, spec.t, "even", 2 * spec.t + 2, g)
    if kind == "shortened":
        if spec.is_shortened:
            raise ValueError("only single-bit shortening is supported")
        variant = "shortened-even" if spec.variant == "even" else "shortened-plain"
        return ComponentCodeSpec(
            spec.nu, spec.n - 1, spec.k - 1, spec.t, variant, spec.d_des, spec.genpoly
        )
    raise ValueError(f"unknown variant derivation {kind!r}")


def make_code(nu: int, t: int, variant: str = "plain") -> ComponentCodeSpec:
    """Build a component code directly from (nu, t, variant)."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    spec = build_bch(nu, t)
    if variant.endswith("even"):
        spec = derive_variant(spec, "even")
    if variant.startswith("shortened"):
        spec = derive_variant(spec, "shortened")
    return spec


def encode(spec: ComponentCodeSpec, msg: np.ndarray) -> np.ndarray:
    """Systematic encoding: codeword = [parity | message] with c(x) = p(x) + x^r m(x)."""
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape != (spec.k,):
        raise ValueError(f"message length {msg.shape} != k={spec.k}")
    r = spec.n - spec.k
    # polynomial remainder of x^r * m(x) modulo g(x)
    buf = np.zeros(spec.n, dtype=np.uint8)
    buf[r:] = msg
    g = np.array(spec.genpoly, dtype=np.uint8)
    for i in range(spec.n - 1, r - 1, -1):
        if buf[i]:
            buf[i - r : i + 1] ^= g
    c = np.zeros(spec.n, dtype=np.uint8)
    c[:r] = buf[:r]
    c[r:] = msg
    return c


@lru_cache(maxsize=None)
def _pow_table(nu: int, jmax: int) -> np.ndarray:
    """POW[j, i] = alpha^(j*i) for j = 0..jmax, i = 0..n-1."""
    field = gf2m_field(nu)
    n = field.size
    j = np.arange(jmax + 1)[:, None]
    i = np.arange(n)[None, :]
    return field.exp[(j * i) % n]


def _syndromes(spec_nu: int, t: int, ones: np.ndarray) -> np.ndarray:
    pow_tab = _pow_table(spec_nu, 2 * t)
    if ones.size == 0:
        return np.zeros(2 * t, dtype=np.int64)
    return np.bitwise_xor.reduce(pow_tab[1 : 2 * t + 1, ones], axis=1)


def _berlekamp_massey(field: Gf2m, synd: np.ndarray, t: int) -> list[int] | None:
    """Minimal LFSR (error locator) for the syndrome sequence; None if degree > t."""
    c = [1] + [0] * (2 * t)
    b = [1] + [0] * (2 * t)
    L, m, bb = 0, 1, 1
    for step in range(2 * t):
        d = int(synd[step])
        for i in range(1, L + 1):
            d ^= field.mul(c[i], int(synd[step - i]))
        if d == 0:
            m += 1
        elif 2 * L <= step:
            told = c.copy()
            coef = field.div(d, bb)
            for i in range(0, 2 * t + 1 - m):
                c[i + m] ^= field.mul(coef, b[i])
            L = step + 1 - L
            b, bb, m = told, d, 1
        else:
            coef = field.div(d, bb)
            for i in range(0, 2 * t + 1 - m):
                c[i + m] ^= field.mul(coef, b[i])
            m += 1
    deg = max((i for i, v in enumerate(c) if v), default=0)
    if deg != L or L > t:
        return None
    return c[: L + 1]


def _chien_roots(field: Gf2m, lam: list[int], n: int) -> np.ndarray:
    """Positions i in [0, n) with Lambda(alpha^-i) = 0."""
    N = field.size
    i = np.arange(n)
    acc = np.full(n, lam[0], dtype=np.int64)
    for d in range(1, len(lam)):
        if lam[d]:
            acc ^= field.exp[(field.log[lam[d]] + d * (N - i)) % N]
    return np.flatnonzero(acc == 0)


def _decode_cyclic(nu: int, t: int, y: np.ndarray, even: bool) -> np.ndarray | None:
    field = gf2m_field(nu)
    ones = np.flatnonzero(y)
    synd = _syndromes(nu, t, ones)
    if not synd.any():
        if even and (ones.size & 1):
            return None
        return y.copy()
    lam = _berlekamp_massey(field, synd, t)
    if lam is None:
        return None
    pos = _chien_roots(field, lam, field.size)
    if pos.size != len(lam) - 1:
        return None
    c = y.copy()
    c[pos] ^= 1
    # recheck: sphere semantics require the corrected word to be a codeword
    if _syndromes(nu, t, np.flatnonzero(c)).any():
        return None
    if even and (int(c.sum()) & 1):
        return None
    return c


def bdd_decode(spec: ComponentCodeSpec, y: np.ndarray) -> np.ndarray | None:
    """Bounded distance decoding; returns the codeword within t of y, else None."""
    y = np.asarray(y)
    if y.shape != (spec.n,):
        raise ValueError(f"word length {y.shape} != n={spec.n}")
    if spec.is_shortened:
        yp = np.concatenate([[0], y]).astype(np.uint8)
        c = _decode_cyclic(spec.nu, spec.t, yp, spec.is_even)
        if c is None or c[0] != 0:
            return None
        return c[1:]
    return _decode_cyclic(spec.nu, spec.t, y.astype(np.uint8), spec.is_even)


def spec_to_kv(spec: ComponentCodeSpec) -> str:
    """Human-readable key-value serialization of a code spec."""
    return f"nu = {spec.nu}\nt = {spec.t}\nvariant = {spec.variant}\n"


def spec_from_kv(text: str) -> ComponentCodeSpec:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    try:
        nu, t = int(fields["nu"]), int(fields["t"])
        variant = fields.get("variant", "plain")
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad code spec: {exc}") from exc
    return make_code(nu, t, variant)
