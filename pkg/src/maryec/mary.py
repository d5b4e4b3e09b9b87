"""M-ary precomputation for batches of scalar multiplications on one base point.

A scalar k < B^d is written in radix B with d digits a_i and

    k*P = sum_i M[i][a_i],        M[i][j] = j * B^i * P.

The planner picks (d, B) to minimise the total cost d*(B + Q) of building
the table and evaluating Q scalars.  The sparse variant keeps only the
power-of-two columns H[i][j] = M[i][2^j] and adds one entry per set bit of
every digit instead.
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import gmpy2

from .curve import (
    INFINITY,
    AffinePoint,
    CurveParams,
    _add,
    _neg,
    is_on_curve,
    point_from_bytes,
    point_to_bytes,
    registry_get,
)
from .errors import ContractViolation, FaultDetected, FormatError

STANDARD = "standard"
BINARY = "binary"
VARIANTS = (STANDARD, BINARY)

DEFAULT_Q_HINT = 256
BLINDING_ROWS = 2
BINARY_RADIX = 3


# ---------------------------------------------------------------------------
# Lambert W

def lambert_w(z: float) -> float:
    """Principal branch W(z) for z >= 0, by Halley iteration."""
    if z < 0 or math.isnan(z):
        raise ValueError(f"lambert_w is only defined here for z >= 0, got {z}")
    if z == 0:
        return 0.0
    if math.isinf(z):
        return math.inf
    if z > math.e:
        lz = math.log(z)
        w = lz - math.log(lz)
    else:
        w = z / (1.0 + z)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 4 * 2.2e-16 * (1.0 + abs(w)):
            break
    return w


# ---------------------------------------------------------------------------
# planning

@dataclass(frozen=True)
class MaryPlan:
    d: int
    B: int
    q_hint: int
    curve_name: str
    variant: str = STANDARD

    @property
    def row_width(self) -> int:
        """Stored points per row: B + 1 for M, floor(log2 B) + 1 for H."""
        if self.variant == BINARY:
            return self.B.bit_length()
        return self.B + 1

    @property
    def table_points(self) -> int:
        return self.d * self.row_width

    @cached_property
    def capacity(self) -> int:
        """Every scalar below B^d is representable."""
        return self.B**self.d


def plan_cost(x: float, p: int, q: int) -> float:
    """f(x) = x * (p^(1/x) + Q), evaluated in floating point via logs."""
    return x * (math.exp(math.log(p) / x) + q)


def optimal_depth(p: int, q: int) -> float:
    """Real minimiser x0 = ln p / (W(Q/e) + 1) of f."""
    return math.log(p) / (lambert_w(q / math.e) + 1.0)


def iroot_ceil(n: int, d: int) -> int:
    """Smallest integer B with B^d >= n."""
    if n <= 1:
        return 1
    root, exact = gmpy2.iroot(gmpy2.mpz(n), d)
    B = int(root)
    while B**d < n:
        B += 1
    while B > 1 and (B - 1) ** d >= n:  # pragma: no cover - iroot is exact
        B -= 1
    return B


def plan_parameters(curve: CurveParams, Q: int, variant: str = STANDARD) -> MaryPlan:
    """Choose (d, B) for ``Q`` multiplications on ``curve``."""
    if Q < 1:
        raise ContractViolation(f"Q must be a positive integer, got {Q}")
    p, n = int(curve.p), int(curve.n)
    if variant == BINARY:
        d = max(1, (p - 1).bit_length())
        B = BINARY_RADIX
    elif variant == STANDARD:
        x0 = optimal_depth(p, Q)
        candidates = {max(1, math.floor(x0)), max(1, math.ceil(x0))}
        d = min(sorted(candidates), key=lambda x: plan_cost(x, p, Q))
        B = max(2, iroot_ceil(n, d))
    else:
        raise ContractViolation(f"unknown variant {variant!r}")
    if B**d < n:  # pragma: no cover - guaranteed by construction
        raise ContractViolation("plan cannot represent every scalar below n")
    return MaryPlan(d, B, Q, curve.name, variant)


# ---------------------------------------------------------------------------
# tables

def _verify_rows(rows, curve: CurveParams, width: int, what: str) -> None:
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FaultDetected(f"{what} row {i} has {len(row)} cells, expected {width}", (i, -1))
        for j, cell in enumerate(row):
            if not isinstance(cell, AffinePoint) or not is_on_curve(cell, curve):
                raise FaultDetected(f"{what}[{i}][{j}] is not on {curve.name}", (i, j))


@dataclass(frozen=True)
class PrecompTableM:
    """M[i][j] = j * B^i * P for i < d + extra_rows, 0 <= j <= B.

    Every cell is checked against the curve equation when the table is
    constructed, so any table object that exists has passed the check.
    """

    plan: MaryPlan
    curve: CurveParams
    base_point: AffinePoint
    rows: tuple[tuple[AffinePoint, ...], ...]
    extra_rows: int = 0

    def __post_init__(self) -> None:
        if self.plan.variant != STANDARD:
            raise ContractViolation("table M needs a standard plan")
        if len(self.rows) != self.plan.d + self.extra_rows:
            raise FaultDetected(
                f"table M has {len(self.rows)} rows, expected {self.plan.d + self.extra_rows}"
            )
        _verify_rows(self.rows, self.curve, self.plan.B + 1, "M")

    @property
    def shift_point(self) -> AffinePoint:
        """B^d * P, the blinding correction unit."""
        return self.rows[self.plan.d - 1][self.plan.B]

    @property
    def point_count(self) -> int:
        return sum(len(r) for r in self.rows)

    def verify(self) -> None:
        _verify_rows(self.rows, self.curve, self.plan.B + 1, "M")


@dataclass(frozen=True)
class SparseTableH:
    """H[i][j] = 2^j * B^i * P for i < d, j <= floor(log2 B)."""

    plan: MaryPlan
    curve: CurveParams
    base_point: AffinePoint
    rows: tuple[tuple[AffinePoint, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.plan.d:
            raise FaultDetected(f"table H has {len(self.rows)} rows, expected {self.plan.d}")
        _verify_rows(self.rows, self.curve, self.plan.B.bit_length(), "H")

    @property
    def point_count(self) -> int:
        return sum(len(r) for r in self.rows)

    def verify(self) -> None:
        _verify_rows(self.rows, self.curve, self.plan.B.bit_length(), "H")


def _iter_rows(
    B: int, nrows: int, P: AffinePoint, curve: CurveParams, verify: bool = True
) -> Iterator[tuple[AffinePoint, ...]]:
    """Rows of M by the recurrences M[i][j] = M[i][j-1] + M[i][1] and
    M[i][1] = M[i-1][B], with M[0][1] = P and M[i][0] = O."""
    unit = P
    for _ in range(nrows):
        row = [INFINITY, unit]
        for _ in range(B - 1):
            row.append(_add(row[-1], unit, curve))
        if verify:
            # fault-injection check on every freshly computed cell
            for j, cell in enumerate(row):
                if not is_on_curve(cell, curve):
                    raise FaultDetected(f"computed M cell [{j}] is not on {curve.name}")
        yield tuple(row)
        unit = row[B]


def _check_plan(plan: MaryPlan, P: AffinePoint, curve: CurveParams) -> None:
    if plan.curve_name != curve.name:
        raise ContractViolation(f"plan is for {plan.curve_name}, not {curve.name}")
    if P.is_infinity or not is_on_curve(P, curve):
        raise ContractViolation(f"base point is not a finite point of {curve.name}")


def build_table(
    plan: MaryPlan, P: AffinePoint, curve: CurveParams, blinding: bool = False
) -> PrecompTableM:
    """Full table M; ``blinding`` appends the two rows blinded evaluation needs."""
    if plan.variant != STANDARD:
        plan = MaryPlan(plan.d, plan.B, plan.q_hint, plan.curve_name, STANDARD)
    _check_plan(plan, P, curve)
    extra = BLINDING_ROWS if blinding else 0
    # the PrecompTableM constructor checks every cell
    rows = tuple(_iter_rows(plan.B, plan.d + extra, P, curve, verify=False))
    return PrecompTableM(plan, curve, P, rows, extra)


def _sparse_row(row: Sequence[AffinePoint], B: int) -> tuple[AffinePoint, ...]:
    return tuple(row[1 << j] for j in range(B.bit_length()))


def build_sparse_table(table: PrecompTableM) -> SparseTableH:
    """Select the power-of-two columns of a full table."""
    plan = table.plan
    sparse_plan = MaryPlan(plan.d, plan.B, plan.q_hint, plan.curve_name, BINARY)
    rows = tuple(_sparse_row(table.rows[i], plan.B) for i in range(plan.d))
    return SparseTableH(sparse_plan, table.curve, table.base_point, rows)


def build_sparse_table_streaming(
    plan: MaryPlan, P: AffinePoint, curve: CurveParams
) -> SparseTableH:
    """Table H computed row by row, never holding more than one row of M."""
    _check_plan(plan, P, curve)
    rows = tuple(_sparse_row(r, plan.B) for r in _iter_rows(plan.B, plan.d, P, curve))
    if plan.variant != BINARY:
        plan = MaryPlan(plan.d, plan.B, plan.q_hint, plan.curve_name, BINARY)
    return SparseTableH(plan, curve, P, rows)


# ---------------------------------------------------------------------------
# evaluation

def _digits(k: int, B: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        k, a = divmod(k, B)
        out.append(a)
    return out


def _fetch(
    row: Sequence[AffinePoint], j: int, i: int, curve: CurveParams, regular: bool, check: bool
):
    if regular:
        # touch every cell of the row so the access pattern does not depend on j
        cell = INFINITY
        for idx, candidate in enumerate(row):
            take = idx == j
            cell = candidate if take else cell
    else:
        cell = row[j]
    if check and not is_on_curve(cell, curve):
        raise FaultDetected(f"table cell [{i}][{j}] is not on {curve.name}", (i, j))
    return cell


def _rng(blinding) -> random.Random:
    return blinding if isinstance(blinding, random.Random) else random.Random(blinding)


def mary_mul(
    k: int,
    table: PrecompTableM,
    blinding: int | random.Random | None = None,
    regular_access: bool = False,
    check_cells: bool = False,
) -> AffinePoint:
    """k * P from table M.

    With ``blinding`` (a seed or a ``random.Random``) the scalar is shifted
    to k + r*B^d for a random r in [1, B^2), summed over d + 2 digit rows,
    and r * B^d * P is subtracted again.  Cells were verified when the
    table was built; ``check_cells`` re-verifies each cell as it is read.
    """
    plan, curve, rows = table.plan, table.curve, table.rows
    B, d = plan.B, plan.d
    if not 0 <= k < plan.capacity:
        raise ContractViolation(f"scalar must be in [0, B^d) = [0, {B}^{d})")
    if blinding is None:
        digits = _digits(k, B, d)
        S = _fetch(rows[0], digits[0], 0, curve, regular_access, check_cells)
        for i in range(1, d):
            S = _add(S, _fetch(rows[i], digits[i], i, curve, regular_access, check_cells), curve)
        return S

    if table.extra_rows < BLINDING_ROWS:
        raise ContractViolation("blinded evaluation needs a table built with blinding=True")
    r = _rng(blinding).randrange(1, B * B)
    digits = _digits(k + r * plan.capacity, B, d + BLINDING_ROWS)
    S = _fetch(rows[0], digits[0], 0, curve, regular_access, check_cells)
    for i in range(1, d + BLINDING_ROWS):
        S = _add(S, _fetch(rows[i], digits[i], i, curve, regular_access, check_cells), curve)
    # r * B^d * P from the extra rows, since r < B^2 has exactly two digits
    r_lo, r_hi = r % B, r // B
    correction = _add(
        _fetch(rows[d], r_lo, d, curve, regular_access, check_cells),
        _fetch(rows[d + 1], r_hi, d + 1, curve, regular_access, check_cells),
        curve,
    )
    return _add(S, _neg(correction, curve), curve)


def mary_binary_mul(k: int, table: SparseTableH, check_cells: bool = False) -> AffinePoint:
    """k * P from table H: one addition per set bit of every radix-B digit."""
    plan, curve, rows = table.plan, table.curve, table.rows
    B, d = plan.B, plan.d
    if not 0 <= k < plan.capacity:
        raise ContractViolation(f"scalar must be in [0, B^d) = [0, {B}^{d})")
    S = INFINITY
    for i in range(d):
        if not k:
            break
        k, a = divmod(k, B)
        row = rows[i]
        j = 0
        while a:
            if a & 1:
                S = _add(S, _fetch(row, j, i, curve, False, check_cells), curve)
            a >>= 1
            j += 1
    return S


def batch_mul(
    ks: Sequence[int],
    P: AffinePoint,
    curve: CurveParams,
    q_hint: int | None = None,
    variant: str = STANDARD,
    blinding_seed: int | None = None,
) -> list[AffinePoint]:
    """Plan once, build one table for ``P``, evaluate every scalar.

    Q defaults to ``len(ks)``; ``q_hint`` overrides it.
    """
    ks = list(ks)
    if not ks:
        return []
    n = curve.n
    for k in ks:
        if not 0 <= k < n:
            raise ContractViolation(f"batch scalars must lie in [0, n) for {curve.name}")
    plan = plan_parameters(curve, q_hint or len(ks), variant)
    if variant == BINARY:
        if blinding_seed is not None:
            raise ContractViolation("blinding is only implemented for the standard variant")
        H = build_sparse_table_streaming(plan, P, curve)
        return [mary_binary_mul(k, H) for k in ks]
    if blinding_seed is None:
        M = build_table(plan, P, curve)
        return [mary_mul(k, M) for k in ks]
    M = build_table(plan, P, curve, blinding=True)
    rng = random.Random(blinding_seed)
    return [mary_mul(k, M, blinding=rng) for k in ks]


# ---------------------------------------------------------------------------
# table files
#
# header: magic "MTBL", version u8, variant u8, name length u8, name,
#         d u32, B u32, q_hint u32, extra rows u32, point count u32
# body:   row-major points, each 1 + 2*coord_bytes wide (INFINITY is a
#         zero tag byte followed by zero padding)

_MAGIC = b"MTBL"
_VERSION = 1
_FIXED = struct.Struct(">IIIII")


def export_table(table: PrecompTableM | SparseTableH) -> bytes:
    plan, curve = table.plan, table.curve
    name = curve.name.encode()
    extra = getattr(table, "extra_rows", 0)
    count = sum(len(r) for r in table.rows)
    out = bytearray(_MAGIC)
    out += bytes([_VERSION, VARIANTS.index(plan.variant), len(name)]) + name
    out += _FIXED.pack(plan.d, plan.B, plan.q_hint, extra, count)
    width = curve.point_bytes
    for row in table.rows:
        for cell in row:
            out += point_to_bytes(cell, curve).ljust(width, b"\x00")
    return bytes(out)


def import_table(data: bytes) -> PrecompTableM | SparseTableH:
    """Parse a table file and re-run the curve check on every point."""
    if data[:4] != _MAGIC or len(data) < 7:
        raise FormatError("not a maryec table file")
    version, variant_id, name_len = data[4], data[5], data[6]
    if version != _VERSION:
        raise FormatError(f"unsupported table version {version}")
    if variant_id >= len(VARIANTS):
        raise FormatError(f"unknown variant id {variant_id}")
    pos = 7 + name_len
    name = data[7:pos].decode(errors="replace")
    curve = registry_get(name)
    try:
        d, B, q_hint, extra, count = _FIXED.unpack_from(data, pos)
    except struct.error as exc:
        raise FormatError("truncated table header") from exc
    pos += _FIXED.size
    plan = MaryPlan(d, B, q_hint, name, VARIANTS[variant_id])
    width = curve.point_bytes
    nrows = d + extra
    if count != nrows * plan.row_width or len(data) != pos + count * width:
        raise FormatError("table size does not match its header")
    cells = []
    for idx in range(count):
        raw = data[pos + idx * width : pos + (idx + 1) * width]
        if raw[0] == 0:
            if any(raw[1:]):
                raise FaultDetected(f"cell {idx} has a corrupted identity encoding",
                                    divmod(idx, plan.row_width))
            cells.append(INFINITY)
            continue
        try:
            cells.append(point_from_bytes(raw, curve))
        except FormatError as exc:
            raise FaultDetected(f"cell {divmod(idx, plan.row_width)} failed the curve check",
                                divmod(idx, plan.row_width)) from exc
    w = plan.row_width
    rows = tuple(tuple(cells[i * w : (i + 1) * w]) for i in range(nrows))
    base = rows[0][1] if plan.variant == STANDARD else rows[0][0]
    if plan.variant == STANDARD:
        return PrecompTableM(plan, curve, base, rows, extra)
    return SparseTableH(plan, curve, base, rows)
