import pytest

from maryec.curve import (
    INFINITY,
    SECG_CURVES,
    CurveParams,
    count_ops,
    enumerate_points,
    is_on_curve,
    list_curves,
    naive_scalar_mul,
    point,
    point_add,
    point_double,
    point_from_bytes,
    point_from_hex,
    point_negate,
    point_sub,
    point_to_bytes,
    point_to_hex,
    registry_get,
    scalar_from_hex,
    scalar_to_hex,
)
from maryec.errors import ContractViolation, FormatError, NotFoundError
from maryec.scalarmul import double_and_add


def test_registry_primes():
    assert registry_get("secp256k1").p == 2**256 - 2**32 - 977
    assert registry_get("secp256k1").p == 2**256 - 2**32 - 2**9 - 2**8 - 2**7 - 2**6 - 2**4 - 1
    assert registry_get("secp521r1").p == 2**521 - 1
    assert registry_get("secp384r1").p == 2**384 - 2**128 - 2**96 + 2**32 - 1


def test_registry_unknown_name():
    with pytest.raises(NotFoundError):
        registry_get("secp999")
    with pytest.raises(KeyError):
        registry_get("")


def test_list_curves():
    assert list_curves()[:3] == list(SECG_CURVES)
    assert {"tiny17", "tiny103", "tiny907"} <= set(list_curves())


def test_tiny17_order_by_enumeration():
    c = registry_get("tiny17")
    assert (c.p, c.a, c.b) == (17, 2, 2)
    brute = [(x, y) for x in range(17) for y in range(17) if (y * y - x**3 - 2 * x - 2) % 17 == 0]
    assert c.n == len(brute) + 1 == 19
    assert c.G == point(5, 1)


def test_small_curve_generators(small_curve):
    c = small_curve
    assert len(enumerate_points(c)) + 1 == c.n
    assert naive_scalar_mul(c.n, c.G, c) == INFINITY
    # prime order, so no smaller multiple vanishes
    assert all(naive_scalar_mul(k, c.G, c) != INFINITY for k in range(1, c.n))


def test_secg_order(secg_curve):
    c = secg_curve
    assert double_and_add(int(c.n), c.G, c) == INFINITY
    assert double_and_add(int(c.n) - 1, c.G, c) == point_negate(c.G, c)


def test_point_add_identity_and_inverse(small_curve):
    c = small_curve
    for P in enumerate_points(c):
        assert point_add(P, INFINITY, c) == P
        assert point_add(INFINITY, P, c) == P
        assert point_add(P, point(P.x, (-P.y) % c.p), c) == INFINITY
        assert point_add(P, point_negate(P, c), c) == INFINITY
    assert point_negate(INFINITY, c) == INFINITY


def test_tiny17_doubling_by_hand():
    c = registry_get("tiny17")
    # lambda = (3*25 + 2) / 2 = 77 * 9 = 693 = 13 (mod 17)
    lam = (3 * 5 * 5 + 2) * pow(2 * 1, -1, 17) % 17
    assert lam == 13
    x3 = (lam * lam - 10) % 17
    y3 = (lam * (5 - x3) - 1) % 17
    assert (x3, y3) == (6, 3)
    assert point_add(c.G, c.G, c) == point(6, 3)
    assert point_double(c.G, c) == point(6, 3)
    assert point_negate(c.G, c) == point(5, 16)


def test_group_law_associativity(small_curve):
    c = small_curve
    pts = enumerate_points(c)[:12] + [INFINITY]
    for P in pts:
        for Q in pts:
            assert point_add(P, Q, c) == point_add(Q, P, c)
            for R in pts[:5]:
                assert point_add(point_add(P, Q, c), R, c) == point_add(P, point_add(Q, R, c), c)
            assert point_sub(point_add(P, Q, c), Q, c) == P


def test_is_on_curve():
    c = registry_get("secp256k1")
    assert is_on_curve(INFINITY, c)
    assert is_on_curve(c.G, c)
    bad = point(c.G.x, c.G.y + 1)
    assert (bad.y**2 - bad.x**3 - 7) % c.p != 0
    assert not is_on_curve(bad, c)
    with pytest.raises(ContractViolation):
        point_add(bad, c.G, c)
    with pytest.raises(ContractViolation):
        point_double(bad, c)


def test_naive_scalar_mul_edges(secg_curve):
    c = secg_curve
    assert naive_scalar_mul(0, c.G, c) == INFINITY
    assert naive_scalar_mul(1, c.G, c) == c.G
    assert naive_scalar_mul(5, c.G, c) == double_and_add(5, c.G, c)
    with pytest.raises(ContractViolation):
        naive_scalar_mul(-1, c.G, c)


def test_curve_validation():
    with pytest.raises(ContractViolation):
        CurveParams("singular", 17, 0, 0, point(0, 0), 17)
    with pytest.raises(ContractViolation):
        CurveParams("offcurve", 17, 2, 2, point(5, 2), 19)


def test_serialization_roundtrip(secg_curve):
    c = secg_curve
    data = point_to_bytes(c.G, c)
    assert len(data) == c.point_bytes
    assert point_from_bytes(data, c) == c.G
    assert point_from_hex(point_to_hex(c.G, c), c) == c.G
    assert point_to_bytes(INFINITY, c) == b"\x00"
    assert point_from_bytes(b"\x00", c) == INFINITY
    assert scalar_from_hex(scalar_to_hex(12345, c), c) == 12345


def test_serialization_errors():
    c = registry_get("secp256k1")
    data = bytearray(point_to_bytes(c.G, c))
    data[-1] ^= 1
    with pytest.raises(FormatError):
        point_from_bytes(bytes(data), c)
    with pytest.raises(FormatError):
        point_from_bytes(b"\x04\x01", c)
    with pytest.raises(FormatError):
        point_from_hex("04zz", c)
    with pytest.raises(FormatError):
        scalar_from_hex("ff" * 32, c)  # above n


def test_op_counting():
    c = registry_get("tiny17")
    with count_ops() as ops:
        point_add(c.G, c.G, c)
        point_double(c.G, c)
    assert (ops.adds, ops.doubles) == (1, 1)
    with count_ops() as outer:
        with count_ops() as inner:
            point_double(c.G, c)
        point_double(c.G, c)
    assert inner.doubles == 1 and outer.doubles == 1
