"""Arithmetic in GF(2^b) and the polynomial-basis binary image of its elements."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# bit i = coefficient of x^i
PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(2^b) with log/antilog tables built from a primitive polynomial.

    Elements are integers in ``[0, 2^b)``; bit ``s`` of an element is the
    coefficient of ``x^s``.
    """

    b: int
    prim_poly: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.b

    @property
    def order(self) -> int:
        """Multiplicative group order 2^b - 1."""
        return (1 << self.b) - 1

    def alpha_pow(self, k: int) -> int:
        return int(self.antilog_table[k % self.order])

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.b == other.b
            and self.prim_poly == other.prim_poly
        )

    def __hash__(self):
        return hash((self.b, self.prim_poly))


def make_field(b: int, prim_poly: int | None = None) -> FieldSpec:
    """Build GF(2^b); raises ``ValueError`` if the polynomial is not primitive."""
    if not 1 <= b <= 8:
        raise ValueError(f"extension degree must be in 1..8, got {b}")
    if prim_poly is None:
        prim_poly = PRIMITIVE_POLYS[b]
    if prim_poly >> b != 1:
        raise ValueError(f"polynomial {prim_poly:#b} does not have degree {b}")
    q = 1 << b
    order = q - 1
    antilog = np.zeros(order, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    x = 1
    for k in range(order):
        if log[x] != -1:
            raise ValueError(f"polynomial {prim_poly:#b} is not primitive")
        antilog[k] = x
        log[x] = k
        x <<= 1
        if x & q:
            x ^= prim_poly
    if x != 1:
        raise ValueError(f"polynomial {prim_poly:#b} is not primitive")
    antilog.flags.writeable = False
    log.flags.writeable = False
    return FieldSpec(b=b, prim_poly=prim_poly, log_table=log, antilog_table=antilog)


def gf_add(a: int, c: int) -> int:
    return a ^ c


def gf_mul(a: int, c: int, f: FieldSpec) -> int:
    if a == 0 or c == 0:
        return 0
    return int(f.antilog_table[(f.log_table[a] + f.log_table[c]) % f.order])


def gf_inv(a: int, f: FieldSpec) -> int:
    if a == 0:
        raise ZeroDivisionError("no inverse of zero")
    return int(f.antilog_table[(-f.log_table[a]) % f.order])


def gf_div(a: int, c: int, f: FieldSpec) -> int:
    return gf_mul(a, gf_inv(c, f), f)


def elem_to_bits(a: int, f: FieldSpec) -> np.ndarray:
    """Polynomial-basis expansion, coefficient of x^0 first."""
    if not 0 <= a < f.q:
        raise ValueError(f"{a} is not an element of GF(2^{f.b})")
    return np.array([(a >> s) & 1 for s in range(f.b)], dtype=np.uint8)


def bits_to_elem(bits, f: FieldSpec) -> int:
    bits = np.asarray(bits)
    if bits.shape != (f.b,):
        raise ValueError(f"expected {f.b} bits, got shape {bits.shape}")
    return int(sum(int(v) << s for s, v in enumerate(bits)))


def mul_matrix(h: int, f: FieldSpec) -> np.ndarray:
    """b x b GF(2) matrix of the linear map v -> h*v in the polynomial basis."""
    m = np.zeros((f.b, f.b), dtype=np.uint8)
    for t in range(f.b):
        m[:, t] = elem_to_bits(gf_mul(h, 1 << t, f), f)
    return m


def poly_mul(p, r, f: FieldSpec) -> list[int]:
    """Product of polynomials with coefficients lowest degree first."""
    out = [0] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        for j, c in enumerate(r):
            out[i + j] ^= gf_mul(a, c, f)
    return out


def poly_eval(p, x: int, f: FieldSpec) -> int:
    acc = 0
    for coef in reversed(p):
        acc = gf_mul(acc, x, f) ^ coef
    return acc
