"""Arithmetic in the prime fields F_p underlying the registered curves.

Residues are carried as ``gmpy2.mpz`` internally; every public function
accepts plain Python ints as well.  ``FieldElement`` is the value type for
callers that want modulus checking, the bare ``*_mod`` helpers are what the
group law uses on its hot path.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpz

from .errors import ContractViolation, FormatError, NonInvertibleError


def inv_mod(a: int, p: int) -> mpz:
    """Inverse of ``a`` modulo the prime ``p``."""
    a = mpz(a) % p
    if not a:
        raise NonInvertibleError(f"0 has no inverse modulo {p}")
    return gmpy2.invert(a, p)


def is_square_mod(a: int, p: int) -> bool:
    """Euler's criterion: True iff a^((p-1)/2) is 0 or 1 mod p."""
    a = mpz(a) % p
    if not a or p == 2:
        return True
    return gmpy2.powmod(a, (p - 1) // 2, p) == 1


def _tonelli_shanks(a: mpz, p: mpz) -> mpz:
    q, s = p - 1, 0
    while not q & 1:
        q >>= 1
        s += 1
    z = mpz(2)
    while gmpy2.powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m = s
    c = gmpy2.powmod(z, q, p)
    t = gmpy2.powmod(a, q, p)
    r = gmpy2.powmod(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = gmpy2.powmod(c, 1 << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


def sqrt_mod(a: int, p: int) -> mpz | None:
    """Square root of ``a`` modulo the odd prime ``p``, or None.

    Of the two roots r and p - r the smaller one is returned.  The result
    is checked by squaring before it is handed back.
    """
    p = mpz(p)
    a = mpz(a) % p
    if not a:
        return mpz(0)
    if not is_square_mod(a, p):
        return None
    if p % 4 == 3:
        r = gmpy2.powmod(a, (p + 1) // 4, p)
    else:
        r = _tonelli_shanks(a, p)
    if r * r % p != a:  # pragma: no cover - would mean a broken prime
        raise ArithmeticError(f"square root check failed modulo {p}")
    return min(r, p - r)


def byte_length(p: int) -> int:
    return (int(p).bit_length() + 7) // 8


def int_to_hex(value: int, width: int) -> str:
    """Big-endian hex of ``value`` zero-padded to ``width`` bytes, no prefix."""
    return int(value).to_bytes(width, "big").hex()


def hex_to_int(text: str) -> int:
    text = text.strip()
    if not text or len(text) % 2 or text.lower().startswith("0x"):
        raise FormatError(f"expected even-length hex without prefix, got {text!r}")
    try:
        return int.from_bytes(bytes.fromhex(text), "big")
    except ValueError as exc:
        raise FormatError(f"invalid hex: {text!r}") from exc


@dataclass(frozen=True)
class FieldElement:
    """A canonical residue ``value`` in F_modulus."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ContractViolation(f"bad modulus {self.modulus}")
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _other(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ContractViolation(
                    f"modulus mismatch: {self.modulus} vs {other.modulus}"
                )
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._other(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._other(other), self.modulus)

    def __rsub__(self, other):
        return FieldElement(self._other(other) - self.value, self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._other(other), self.modulus)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * FieldElement(self._other(other), self.modulus).inverse()

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** -exponent
        return FieldElement(pow(self.value, exponent, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> FieldElement:
        return FieldElement(int(inv_mod(self.value, self.modulus)), self.modulus)

    def sqrt(self) -> FieldElement | None:
        r = sqrt_mod(self.value, self.modulus)
        return None if r is None else FieldElement(int(r), self.modulus)

    def is_square(self) -> bool:
        return is_square_mod(self.value, self.modulus)

    def to_hex(self) -> str:
        return int_to_hex(self.value, byte_length(self.modulus))

    @classmethod
    def from_hex(cls, text: str, modulus: int) -> FieldElement:
        value = hex_to_int(text)
        if value >= modulus:
            raise FormatError(f"hex value not reduced modulo {modulus}")
        return cls(value, modulus)


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def fe_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def fe_sqrt(a: FieldElement) -> FieldElement | None:
    return a.sqrt()
