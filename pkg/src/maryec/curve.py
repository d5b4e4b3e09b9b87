"""Short Weierstrass curves y^2 = x^3 + ax + b over F_p, affine coordinates.

Points are ``AffinePoint`` named tuples; the identity is the explicit
``INFINITY`` value whose coordinates are both ``None``.

The leading-underscore functions ``_add`` / ``_double`` / ``_neg`` are the
unchecked group law used by the multipliers.  ``point_add`` and friends
validate their inputs first.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple

import gmpy2
from gmpy2 import mpz

from .errors import ContractViolation, FormatError, NotFoundError
from .field import byte_length, hex_to_int, int_to_hex, sqrt_mod


class AffinePoint(NamedTuple):
    x: mpz | None
    y: mpz | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.x is None:
            return "INFINITY"
        return f"AffinePoint(x={int(self.x):#x}, y={int(self.y):#x})"


INFINITY = AffinePoint(None, None)


def point(x: int, y: int) -> AffinePoint:
    return AffinePoint(mpz(x), mpz(y))


@dataclass(frozen=True)
class CurveParams:
    """The quintuple (p, a, b, G, n) plus a registry name."""

    name: str
    p: int
    a: int
    b: int
    G: AffinePoint
    n: int
    cofactor: int = 1
    coord_bytes: int = field(init=False)

    def __post_init__(self) -> None:
        p = mpz(self.p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", mpz(self.a) % p)
        object.__setattr__(self, "b", mpz(self.b) % p)
        object.__setattr__(self, "n", mpz(self.n))
        object.__setattr__(self, "coord_bytes", byte_length(p))
        if (4 * self.a**3 + 27 * self.b**2) % p == 0:
            raise ContractViolation(f"{self.name}: singular curve (zero discriminant)")
        if self.G.is_infinity or not is_on_curve(self.G, self):
            raise ContractViolation(f"{self.name}: base point is not on the curve")

    @property
    def point_bytes(self) -> int:
        """Width of one serialized point: 04 || x || y."""
        return 1 + 2 * self.coord_bytes

    def __repr__(self) -> str:
        return f"CurveParams({self.name!r})"


# ---------------------------------------------------------------------------
# operation counting

@dataclass
class OpCount:
    adds: int = 0
    doubles: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.doubles


_counter: contextvars.ContextVar[OpCount | None] = contextvars.ContextVar(
    "maryec_op_counter", default=None
)


@contextlib.contextmanager
def count_ops() -> Iterator[OpCount]:
    """Count every group-law call made inside the block.

    Each call to the addition routine counts as one add and each call to
    the doubling routine as one double, including calls whose operands
    happen to be the identity.
    """
    counter = OpCount()
    token = _counter.set(counter)
    try:
        yield counter
    finally:
        _counter.reset(token)


# ---------------------------------------------------------------------------
# group law

def _double(P: AffinePoint, curve: CurveParams) -> AffinePoint:
    c = _counter.get()
    if c is not None:
        c.doubles += 1
    x1, y1 = P
    if x1 is None or not y1:
        return INFINITY
    p = curve.p
    lam = (3 * x1 * x1 + curve.a) * gmpy2.invert(2 * y1, p) % p
    x3 = (lam * lam - 2 * x1) % p
    return AffinePoint(x3, (lam * (x1 - x3) - y1) % p)


def _add(P: AffinePoint, Q: AffinePoint, curve: CurveParams) -> AffinePoint:
    c = _counter.get()
    if c is not None:
        c.adds += 1
    x1, y1 = P
    x2, y2 = Q
    if x1 is None:
        return Q
    if x2 is None:
        return P
    p = curve.p
    if x1 == x2:
        if y1 != y2 or not y1:
            return INFINITY
        lam = (3 * x1 * x1 + curve.a) * gmpy2.invert(2 * y1, p) % p
    else:
        lam = (y2 - y1) * gmpy2.invert(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return AffinePoint(x3, (lam * (x1 - x3) - y1) % p)


def _neg(P: AffinePoint, curve: CurveParams) -> AffinePoint:
    if P.x is None:
        return P
    return AffinePoint(P.x, (-P.y) % curve.p)


def is_on_curve(P: AffinePoint, curve: CurveParams) -> bool:
    """True for INFINITY and for in-range (x, y) satisfying the equation."""
    x, y = P
    if x is None:
        return y is None
    p = curve.p
    if y is None or not (0 <= x < p and 0 <= y < p):
        return False
    return (y * y - (x * x * x + curve.a * x + curve.b)) % p == 0


def _require_on_curve(P: AffinePoint, curve: CurveParams) -> None:
    if not isinstance(P, AffinePoint) or not is_on_curve(P, curve):
        raise ContractViolation(f"point is not on {curve.name}: {P!r}")


def point_add(P: AffinePoint, Q: AffinePoint, curve: CurveParams) -> AffinePoint:
    _require_on_curve(P, curve)
    _require_on_curve(Q, curve)
    return _add(P, Q, curve)


def point_double(P: AffinePoint, curve: CurveParams) -> AffinePoint:
    _require_on_curve(P, curve)
    return _double(P, curve)


def point_negate(P: AffinePoint, curve: CurveParams) -> AffinePoint:
    _require_on_curve(P, curve)
    return _neg(P, curve)


def point_sub(P: AffinePoint, Q: AffinePoint, curve: CurveParams) -> AffinePoint:
    return point_add(P, point_negate(Q, curve), curve)


def naive_scalar_mul(k: int, P: AffinePoint, curve: CurveParams) -> AffinePoint:
    """k successive additions of P.  Only meant as an oracle for small k."""
    if k < 0:
        raise ContractViolation(f"negative scalar: {k}")
    _require_on_curve(P, curve)
    R = INFINITY
    for _ in range(k):
        R = _add(R, P, curve)
    return R


def enumerate_points(curve: CurveParams) -> list[AffinePoint]:
    """Every affine point of a small curve, by brute force over x and y."""
    p = int(curve.p)
    if p >= 1 << 16:
        raise ContractViolation("point enumeration is only for small test curves")
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    a, b = int(curve.a), int(curve.b)
    return [
        point(x, y)
        for x in range(p)
        for y in roots.get((x * x * x + a * x + b) % p, ())
    ]


# ---------------------------------------------------------------------------
# serialization

def point_to_bytes(P: AffinePoint, curve: CurveParams) -> bytes:
    """``04 || x || y`` fixed width, or the single byte ``00`` for INFINITY."""
    if P.is_infinity:
        return b"\x00"
    w = curve.coord_bytes
    return b"\x04" + int(P.x).to_bytes(w, "big") + int(P.y).to_bytes(w, "big")


def point_from_bytes(data: bytes, curve: CurveParams) -> AffinePoint:
    if data == b"\x00":
        return INFINITY
    w = curve.coord_bytes
    if len(data) != 1 + 2 * w or data[0] != 4:
        raise FormatError(f"bad point encoding for {curve.name} ({len(data)} bytes)")
    P = point(int.from_bytes(data[1 : 1 + w], "big"), int.from_bytes(data[1 + w :], "big"))
    if not is_on_curve(P, curve):
        raise FormatError(f"decoded point is not on {curve.name}")
    return P


def point_to_hex(P: AffinePoint, curve: CurveParams) -> str:
    return point_to_bytes(P, curve).hex()


def point_from_hex(text: str, curve: CurveParams) -> AffinePoint:
    text = text.strip()
    if len(text) % 2:
        raise FormatError("odd-length point hex")
    try:
        data = bytes.fromhex(text)
    except ValueError as exc:
        raise FormatError(f"invalid point hex: {exc}") from exc
    return point_from_bytes(data, curve)


def scalar_to_hex(k: int, curve: CurveParams) -> str:
    return int_to_hex(k, byte_length(curve.n))


def scalar_from_hex(text: str, curve: CurveParams) -> int:
    k = hex_to_int(text)
    if not 0 <= k < curve.n:
        raise FormatError(f"scalar out of range for {curve.name}")
    return k


# ---------------------------------------------------------------------------
# registry

_SECG = {
    "secp256k1": dict(
        p=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F,
        a=0,
        b=7,
        gx=0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798,
        gy=0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8,
        n=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141,
    ),
    "secp384r1": dict(
        p=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFFFF0000000000000000FFFFFFFF,
        a=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFFFF0000000000000000FFFFFFFC,
        b=0xB3312FA7E23EE7E4988E056BE3F82D19181D9C6EFE8141120314088F5013875AC656398D8A2ED19D2A85C8EDD3EC2AEF,
        gx=0xAA87CA22BE8B05378EB1C71EF320AD746E1D3B628BA79B9859F741E082542A385502F25DBF55296C3A545E3872760AB7,
        gy=0x3617DE4A96262C6F5D9E98BF9292DC29F8F41DBD289A147CE9DA3113B5F0B8C00A60B1CE1D7E819D7A431D7C90EA0E5F,
        n=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFC7634D81F4372DDF581A0DB248B0A77AECEC196ACCC52973,
    ),
    "secp521r1": dict(
        p=(1 << 521) - 1,
        a=0x01FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFC,
        b=0x0051953EB9618E1C9A1F929A21A0B68540EEA2DA725B99B315F3B8B489918EF109E156193951EC7E937B1652C0BD3BB1BF073573DF883D2C34F1EF451FD46B503F00,
        gx=0x00C6858E06B70404E9CD9E3ECB662395B4429C648139053FB521F828AF606B4D3DBAA14B5E77EFE75928FE1DC127A2FFA8DE3348B3C1856A429BF97E7E31C2E5BD66,
        gy=0x011839296A789A3BC0045C8A5FB42C7D1BD998F54449579B446817AFBD17273E662C97EE72995EF42640C550B9013FAD0761353C7086A272C24088BE94769FD16650,
        n=0x01FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFA51868783BF2F966B7FCC0148F709A5D03BB5C9B8899C47AEBB6FB71E91386409,
    ),
}

# (p, a, b); group orders are prime and found by enumeration at load time
_TINY = {
    "tiny17": (17, 2, 2),
    "tiny103": (103, 0, 5),
    "tiny907": (907, 0, 5),
}

SECG_CURVES = tuple(_SECG)
SMALL_CURVES = tuple(_TINY)


def _make_small(name: str) -> CurveParams:
    p, a, b = _TINY[name]
    # build with a placeholder order, then count points exhaustively
    pts = sorted(enumerate_points(CurveParams(name, p, a, b, point(*_first_point(p, a, b)), 1)))
    order = len(pts) + 1
    G = point(5, 1) if name == "tiny17" else pts[0]
    return CurveParams(name, p, a, b, G, order)


def _first_point(p: int, a: int, b: int) -> tuple[int, int]:
    for x in range(p):
        y = sqrt_mod(x**3 + a * x + b, p)
        if y is not None:
            return x, int(y)
    raise ContractViolation(f"curve over F_{p} has no affine points")


@lru_cache(maxsize=None)
def registry_get(name: str) -> CurveParams:
    """Registered curve parameters by name."""
    if name in _SECG:
        c = _SECG[name]
        curve = CurveParams(name, c["p"], c["a"], c["b"], point(c["gx"], c["gy"]), c["n"])
        if curve.p % 4 != 3:  # pragma: no cover - constant data
            raise ContractViolation(f"{name}: expected p = 3 mod 4")
        return curve
    if name in _TINY:
        return _make_small(name)
    raise NotFoundError(f"unknown curve {name!r}; known: {', '.join(list_curves())}")


def list_curves() -> list[str]:
    return list(SECG_CURVES) + list(SMALL_CURVES)
