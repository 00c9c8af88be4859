"""GF(2^q) arithmetic and the two secrecy-layer maps built on it.

Field elements are integers in [0, 2^q) whose binary digits are polynomial
coefficients over GF(2) (bit i = coefficient of x^i).  Multiplication is
carry-less polynomial multiplication reduced modulo an irreducible polynomial
of degree q.  Strings such as seeds are written most-significant-bit first,
so a seed for a degree-q field prints as exactly q characters.

The security layer consists of the hash family

    hash_f(s, v) = k most significant bits of s () v        (s != 0)

and its randomized right inverse

    encode_phi(s, m, b) = inverse(s) () (m || b)

which satisfy hash_f(s, encode_phi(s, m, b)) == m for every message m and
randomizer b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "REDUCTION_POLYS",
    "FieldSpec",
    "BitString",
    "field_mul",
    "field_inv",
    "hash_f",
    "encode_phi",
    "two_universality_check",
    "mul_by_table",
]

# Lexicographically smallest irreducible polynomial of each degree 1..16,
# encoded as (q+1)-bit integers.  Overridable via FieldSpec(reduction_poly=...).
REDUCTION_POLYS: dict[int, int] = {
    1: 0b10,                     # x
    2: 0b111,                    # x^2 + x + 1
    3: 0b1011,                   # x^3 + x + 1
    4: 0b10011,                  # x^4 + x + 1
    5: 0b100101,                 # x^5 + x^2 + 1
    6: 0b1000011,                # x^6 + x + 1
    7: 0b10000011,               # x^7 + x + 1
    8: 0b100011011,              # x^8 + x^4 + x^3 + x + 1
    9: 0b1000000011,             # x^9 + x + 1
    10: 0b10000001001,           # x^10 + x^3 + 1
    11: 0b100000000101,          # x^11 + x^2 + 1
    12: 0b1000000001001,         # x^12 + x^3 + 1
    13: 0b10000000011011,        # x^13 + x^4 + x^3 + x + 1
    14: 0b100000000100001,       # x^14 + x^5 + 1
    15: 0b1000000000000011,      # x^15 + x + 1
    16: 0b10000000000101011,     # x^16 + x^5 + x^3 + x + 1
}


def _poly_mod(a: int, m: int) -> int:
    """Remainder of carry-less polynomial division of a by m."""
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _is_irreducible(poly: int, degree: int) -> bool:
    """Trial division by every polynomial of degree 1..degree//2."""
    for d in range(1, degree // 2 + 1):
        for divisor in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, divisor) == 0:
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The finite field GF(2^q), q in [1, 16].

    `reduction_poly` defaults to the built-in table; a custom irreducible
    polynomial of degree exactly q may be supplied instead.
    """

    q: int
    reduction_poly: int = 0  # 0 -> take the table entry for q

    def __post_init__(self) -> None:
        if not 1 <= self.q <= 16:
            raise ValueError(f"q must be in [1, 16], got {self.q}")
        if self.reduction_poly == 0:
            object.__setattr__(self, "reduction_poly", REDUCTION_POLYS[self.q])
        poly = self.reduction_poly
        if poly.bit_length() - 1 != self.q:
            raise ValueError(
                f"reduction polynomial 0b{poly:b} does not have degree {self.q}"
            )
        if not _is_irreducible(poly, self.q):
            raise ValueError(f"reduction polynomial 0b{poly:b} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.q

    def validate_element(self, a: int, name: str = "element") -> None:
        if not 0 <= a < self.order:
            raise ValueError(f"{name} {a} out of range for GF(2^{self.q})")

    def seed_to_string(self, s: int) -> str:
        """Format a seed as a q-character MSB-first binary string."""
        self.validate_element(s, "seed")
        return format(s, f"0{self.q}b")

    def seed_from_string(self, text: str) -> int:
        """Parse a q-character MSB-first binary string into a seed."""
        if len(text) != self.q or set(text) - {"0", "1"}:
            raise ValueError(f"seed string {text!r} is not {self.q} binary digits")
        return int(text, 2)


@dataclass(frozen=True)
class BitString:
    """An MSB-first bit sequence of declared length."""

    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    @classmethod
    def from_string(cls, text: str) -> "BitString":
        return cls(int(text, 2) if text else 0, len(text))

    def concat(self, other: "BitString") -> "BitString":
        return BitString(
            (self.value << other.length) | other.value, self.length + other.length
        )


def field_mul(a: int, b: int, f: FieldSpec) -> int:
    """Carry-less product of a and b reduced modulo the field polynomial."""
    f.validate_element(a, "a")
    f.validate_element(b, "b")
    poly = f.reduction_poly
    top = 1 << f.q
    p = 0
    for _ in range(f.q):
        if b & 1:
            p ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return p


def field_inv(a: int, f: FieldSpec) -> int:
    """Multiplicative inverse via a^(2^q - 2); raises on a == 0."""
    f.validate_element(a, "a")
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse in GF(2^q)")
    result = 1
    base = a
    exponent = f.order - 2
    while exponent:
        if exponent & 1:
            result = field_mul(result, base, f)
        base = field_mul(base, base, f)
        exponent >>= 1
    return result


def hash_f(s: int, v: int, k: int, f: FieldSpec) -> BitString:
    """The k most significant bits of s () v.  Seed s must be nonzero."""
    if s == 0:
        raise ValueError("seed must be a nonzero field element")
    if not 1 <= k <= f.q:
        raise ValueError(f"k must be in [1, {f.q}], got {k}")
    return BitString(field_mul(s, v, f) >> (f.q - k), k)


def encode_phi(s: int, m: BitString, b: BitString, f: FieldSpec) -> int:
    """inverse(s) () (m || b): the random pre-image of m under hash_f(s, .)."""
    if s == 0:
        raise ValueError("seed must be a nonzero field element")
    if m.length + b.length != f.q:
        raise ValueError(
            f"|m| + |b| = {m.length} + {b.length} must equal q = {f.q}"
        )
    return field_mul(field_inv(s, f), m.concat(b).value, f)


def mul_by_table(a: int, f: FieldSpec) -> np.ndarray:
    """Vector t with t[w] = a () w for every field element w.

    Multiplication by a fixed element is GF(2)-linear, so the table is built
    from the q basis products in O(2^q) XORs.
    """
    f.validate_element(a, "a")
    t = np.zeros(f.order, dtype=np.uint32)
    for i in range(f.q):
        basis = field_mul(a, 1 << i, f)
        t[1 << i : 1 << (i + 1)] = t[: 1 << i] ^ np.uint32(basis)
    return t


def two_universality_check(
    f: FieldSpec, k: int, max_order: int = 1 << 12
) -> float:
    """Exhaustive max collision fraction of the hash family for width k.

    Returns max over distinct (x1, x2) of |{s != 0 : hash_f(s,x1) == hash_f(s,x2)}|
    divided by the seed count 2^q - 1.  The family is 2-universal up to the
    slack 1/(2^q - 1) introduced by excluding the zero seed.
    """
    if not 1 <= k <= f.q:
        raise ValueError(f"k must be in [1, {f.q}], got {k}")
    if f.order > max_order:
        raise ValueError(
            f"exhaustive check over 2^{f.q} elements exceeds the budget of"
            f" {max_order} (raise max_order to override)"
        )
    order = f.order
    # hashes[s, x] = hash_f(s+1, x); rows are built per seed via the linear table.
    hashes = np.empty((order - 1, order), dtype=np.uint32)
    for s in range(1, order):
        hashes[s - 1] = mul_by_table(s, f) >> (f.q - k)
    worst = 0
    # Compare column x1 against all columns x2 > x1, counting colliding seeds.
    for x1 in range(order - 1):
        counts = (hashes[:, x1 + 1 :] == hashes[:, x1 : x1 + 1]).sum(axis=0)
        worst = max(worst, int(counts.max()))
    return worst / (order - 1)
