"""Baseline scalar multiplication algorithms.

All functions compute ``k * P`` for a non-negative integer ``k`` without
reducing it modulo the group order (the uniform interface in
``maryec.strategies`` does that).  Windowed methods process the scalar
left to right and accept an optional precomputed table so a batch over
one base point builds it only once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import INFINITY, AffinePoint, CurveParams, _add, _double, _neg
from .errors import ContractViolation

MAX_WINDOW = 16


def _check_scalar(k: int) -> None:
    if k < 0:
        raise ContractViolation(f"negative scalar: {k}")


def _check_window(w: int) -> None:
    if not 1 <= w <= MAX_WINDOW:
        raise ContractViolation(f"window must be in [1, {MAX_WINDOW}], got {w}")


def _double_times(R: AffinePoint, times: int, curve: CurveParams) -> AffinePoint:
    for _ in range(times):
        R = _double(R, curve)
    return R


def double_and_add(k: int, P: AffinePoint, curve: CurveParams) -> AffinePoint:
    """Left-to-right binary method: one doubling per bit of k."""
    _check_scalar(k)
    R = INFINITY
    for bit in bin(k)[2:] if k else "":
        R = _double(R, curve)
        if bit == "1":
            R = _add(R, P, curve)
    return R


# ---------------------------------------------------------------------------
# NAF

def naf_recode(k: int) -> list[int]:
    """Non-adjacent form of k, least significant digit first.

    >>> naf_recode(7)
    [-1, 0, 0, 1]
    """
    _check_scalar(k)
    digits = []
    while k:
        if k & 1:
            z = 2 - (k & 3)
            k -= z
        else:
            z = 0
        digits.append(z)
        k >>= 1
    return digits


def naf_scalar_mul(k: int, P: AffinePoint, curve: CurveParams) -> AffinePoint:
    _check_scalar(k)
    neg_P = _neg(P, curve)
    R = INFINITY
    for digit in reversed(naf_recode(k)):
        R = _double(R, curve)
        if digit == 1:
            R = _add(R, P, curve)
        elif digit == -1:
            R = _add(R, neg_P, curve)
    return R


# ---------------------------------------------------------------------------
# windowed methods

def odd_multiples(P: AffinePoint, w: int, curve: CurveParams) -> list[AffinePoint]:
    """[P, 3P, 5P, ..., (2^w - 1)P]: the 2^(w-1) odd multiples below 2^w."""
    _check_window(w)
    table = [P]
    if w > 1:
        twoP = _double(P, curve)
        for _ in range((1 << (w - 1)) - 1):
            table.append(_add(table[-1], twoP, curve))
    return table


def all_multiples(P: AffinePoint, w: int, curve: CurveParams) -> list[AffinePoint]:
    """[O, P, 2P, ..., (2^w - 1)P]."""
    _check_window(w)
    table = [INFINITY, P]
    for _ in range((1 << w) - 2):
        table.append(_add(table[-1], P, curve))
    return table


def two_k_ary_mul(
    k_scalar: int,
    P: AffinePoint,
    curve: CurveParams,
    k: int = 5,
    table: list[AffinePoint] | None = None,
) -> AffinePoint:
    """Radix-2^k method with digits split as u * 2^s, u odd.

    ``table`` holds the odd multiples u*P for u < 2^k.
    """
    _check_scalar(k_scalar)
    _check_window(k)
    if table is None:
        table = odd_multiples(P, k, curve)
    mask = (1 << k) - 1
    ndigits = (k_scalar.bit_length() + k - 1) // k
    R = INFINITY
    for j in range(ndigits - 1, -1, -1):
        a = (k_scalar >> (j * k)) & mask
        if a == 0:
            R = _double_times(R, k, curve)
            continue
        s = (a & -a).bit_length() - 1
        R = _double_times(R, k - s, curve)
        R = _add(R, table[(a >> s) >> 1], curve)
        R = _double_times(R, s, curve)
    return R


def sliding_window_mul(
    k: int,
    P: AffinePoint,
    curve: CurveParams,
    w: int = 4,
    table: list[AffinePoint] | None = None,
) -> AffinePoint:
    """Left-to-right sliding window over odd multiples.

    Zero bits cost one doubling each; a window is the longest run of at
    most ``w`` bits that starts at the current set bit and ends on a set
    bit.
    """
    _check_scalar(k)
    _check_window(w)
    if table is None:
        table = odd_multiples(P, w, curve)
    R = INFINITY
    i = k.bit_length() - 1
    while i >= 0:
        if not (k >> i) & 1:
            R = _double(R, curve)
            i -= 1
            continue
        t = max(i - w + 1, 0)
        while not (k >> t) & 1:
            t += 1
        h = (k >> t) & ((1 << (i - t + 1)) - 1)
        R = _double_times(R, i - t + 1, curve)
        R = _add(R, table[h >> 1], curve)
        i = t - 1
    return R


def montgomery_ladder_mul(
    k: int,
    P: AffinePoint,
    curve: CurveParams,
    bits: int | None = None,
    observer=None,
) -> AffinePoint:
    """Montgomery ladder: one addition and one doubling per processed bit.

    The scalar is processed over ``bits`` positions, by default the bit
    length of the group order (or of k if larger), so the operation
    sequence does not depend on the value of k.  ``observer(R0, R1)`` is
    called after every iteration if given.
    """
    _check_scalar(k)
    if bits is None:
        bits = max(int(curve.n).bit_length(), k.bit_length())
    elif bits < k.bit_length():
        raise ContractViolation(f"scalar does not fit in {bits} bits")
    R0, R1 = INFINITY, P
    for i in range(bits - 1, -1, -1):
        if (k >> i) & 1:
            R0 = _add(R0, R1, curve)
            R1 = _double(R1, curve)
        else:
            R1 = _add(R0, R1, curve)
            R0 = _double(R0, curve)
        if observer is not None:
            observer(R0, R1)
    return R0


def fixed_window_mul(
    k: int,
    P: AffinePoint,
    curve: CurveParams,
    w: int = 4,
    table: list[AffinePoint] | None = None,
) -> AffinePoint:
    """Plain radix-2^w method: w doublings then one table addition per digit."""
    _check_scalar(k)
    _check_window(w)
    if table is None:
        table = all_multiples(P, w, curve)
    mask = (1 << w) - 1
    ndigits = (k.bit_length() + w - 1) // w
    R = INFINITY
    for j in range(ndigits - 1, -1, -1):
        R = _double_times(R, w, curve)
        R = _add(R, table[(k >> (j * w)) & mask], curve)
    return R


# ---------------------------------------------------------------------------
# fixed-base comb

@dataclass(frozen=True)
class CombTable:
    """Comb precomputation for one base point.

    The padded scalar is cut into ``groups * span`` blocks of ``width`` bits,
    block ``j*span + t`` standing at bit offset ``(j*span + t) * width``.
    ``tables[j][u] = u * 2^(j*span*width) * P`` for every ``width``-bit u, so
    one column t of the comb adds one entry per group and the columns are
    separated by ``width`` doublings.
    """

    base: AffinePoint
    width: int
    groups: int
    span: int
    tables: tuple[tuple[AffinePoint, ...], ...]

    @property
    def max_bits(self) -> int:
        return self.groups * self.span * self.width

    @property
    def point_count(self) -> int:
        return self.groups << self.width


def build_comb_table(
    P: AffinePoint,
    curve: CurveParams,
    w: int = 4,
    v: int = 2,
    bits: int | None = None,
) -> CombTable:
    _check_window(w)
    if v < 1:
        raise ContractViolation(f"comb needs at least one group, got {v}")
    if bits is None:
        bits = int(curve.n).bit_length()
    blocks = max(1, -(-bits // w))
    span = -(-blocks // v)
    tables = []
    shifted = P
    for j in range(v):
        if j:
            shifted = _double_times(shifted, span * w, curve)
        row = [INFINITY, shifted]
        for _ in range((1 << w) - 2):
            row.append(_add(row[-1], shifted, curve))
        tables.append(tuple(row))
    return CombTable(P, w, v, span, tuple(tables))


def fixed_base_comb_mul(
    k: int,
    table: CombTable,
    curve: CurveParams,
    P: AffinePoint | None = None,
) -> AffinePoint:
    """Evaluate k*P with a comb table; ``P`` if given must be the table's base."""
    _check_scalar(k)
    if P is not None and P != table.base:
        raise ContractViolation("comb table was built for a different base point")
    if k.bit_length() > table.max_bits:
        raise ContractViolation(f"scalar exceeds the {table.max_bits}-bit comb layout")
    w, span = table.width, table.span
    mask = (1 << w) - 1
    R = INFINITY
    for t in range(span - 1, -1, -1):
        R = _double_times(R, w, curve)
        for j, row in enumerate(table.tables):
            u = (k >> ((j * span + t) * w)) & mask
            if u:
                R = _add(R, row[u], curve)
    return R
