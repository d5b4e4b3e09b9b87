import random

import pytest

from maryec.curve import INFINITY, point, point_add, registry_get
from maryec.elgamal import (
    ElGamalCiphertext,
    block_count,
    ciphertext_to_bytes,
    decode_message,
    decrypt,
    decrypt_points,
    dump_ciphertext,
    dump_public,
    dump_secret,
    encode_block,
    encode_message,
    encoding_params,
    encrypt,
    keygen,
    keypair_from_secret,
    load_ciphertext,
    load_public,
    load_secret,
)
from maryec.errors import ContractViolation, EncodingError, FormatError
from maryec.scalarmul import double_and_add
from maryec.strategies import STRATEGY_NAMES

K1 = registry_get("secp256k1")
TINY907 = registry_get("tiny907")


def is_square(v, p):
    # Euler's criterion, independent of the library's square root
    v %= p
    return v == 0 or pow(v, (p - 1) // 2, p) == 1


def encodable_bytes(curve):
    ok = []
    for v in range(256):
        x = v << encoding_params(curve)[1]
        if any(is_square((x + c) ** 3 + curve.a * (x + c) + curve.b, curve.p)
               for c in range(1 << encoding_params(curve)[1])):
            ok.append(v)
    return ok


def test_encoding_params():
    assert encoding_params(K1) == (30, 8)
    assert encoding_params(registry_get("secp384r1")) == (46, 8)
    assert encoding_params(registry_get("secp521r1")) == (63, 8)
    assert encoding_params(TINY907) == (1, 1)
    with pytest.raises(EncodingError):
        encoding_params(registry_get("tiny17"))
    assert block_count(0, K1) == 0
    assert block_count(30, K1) == 1
    assert block_count(31, K1) == 2


def test_encode_block_uses_first_square(secg_curve):
    c = secg_curve
    rnd = random.Random(5)
    for _ in range(50):
        v = rnd.randrange(1 << (8 * encoding_params(c)[0]))
        P = encode_block(v, c)
        ctr = int(P.x) & 0xFF
        assert int(P.x) >> 8 == v
        assert (int(P.y) ** 2 - (int(P.x) ** 3 + c.a * int(P.x) + c.b)) % c.p == 0
        for earlier in range(ctr):
            x = (v << 8) | earlier
            assert not is_square(x**3 + c.a * x + c.b, c.p)


def test_tiny907_encodable_set_matches_oracle():
    ok = encodable_bytes(TINY907)
    for v in range(256):
        if v in ok:
            assert int(encode_block(v, TINY907).x) >> 1 == v
        else:
            with pytest.raises(EncodingError):
                encode_block(v, TINY907)


def test_decode_pads_and_trims():
    m = b"hello"
    pts = encode_message(m, K1)
    assert len(pts) == 1
    assert decode_message(pts, K1, 5) == m
    assert decode_message(pts, K1, 30) == m + bytes(25)
    with pytest.raises(ContractViolation):
        decode_message(pts, K1, 31)
    with pytest.raises(ContractViolation):
        decode_message([INFINITY], K1, 1)


def test_keygen_is_seeded():
    a, b = keygen(K1, 7), keygen(K1, 7)
    assert a == b and a != keygen(K1, 8)
    assert 1 <= a.secret < K1.n
    assert a.public_point == double_and_add(a.secret, K1.G, K1)
    with pytest.raises(ContractViolation):
        keypair_from_secret(0, K1)
    with pytest.raises(ContractViolation):
        keypair_from_secret(int(K1.n), K1)


@pytest.mark.parametrize("length", [0, 1, 29, 30, 31, 100, 360])
def test_roundtrip_lengths(secg_curve, length):
    c = secg_curve
    kp = keygen(c, length)
    m = random.Random(length).randbytes(length)
    ct = encrypt(m, kp.public_point, c, "mary", rng_seed=length)
    assert len(ct) == block_count(length, c)
    assert decrypt(ct, kp, c, "mary", original_len=length) == m
    assert decrypt(ct, kp, c, original_len=length) == m


def test_ciphertext_components():
    kp = keygen(K1, 1)
    m = b"x" * 61
    ct = encrypt(m, kp.public_point, K1, "double-and-add", rng_seed="s")
    rng = random.Random("s")
    ks = [rng.randrange(1, K1.n) for _ in range(3)]
    for k, pm, (c1, c2) in zip(ks, encode_message(m, K1), ct.blocks):
        assert c1 == double_and_add(k, K1.G, K1)
        assert c2 == point_add(pm, double_and_add(k, kp.public_point, K1), K1)
    assert len(ciphertext_to_bytes(ct, K1)) == 3 * 2 * K1.point_bytes


def test_ciphertext_is_strategy_invariant():
    kp = keygen(K1, 3)
    m = random.Random(3).randbytes(100)
    wires = {s: ciphertext_to_bytes(encrypt(m, kp.public_point, K1, s, rng_seed=9), K1)
             for s in STRATEGY_NAMES}
    assert len(set(wires.values())) == 1
    ct = encrypt(m, kp.public_point, K1, "comb", rng_seed=9)
    for s in STRATEGY_NAMES:
        assert decrypt(ct, kp, K1, s, original_len=100) == m


def test_tiny907_roundtrip():
    ok = encodable_bytes(TINY907)
    rnd = random.Random(1)
    for seed in range(20):
        m = bytes(rnd.choice(ok) for _ in range(12))
        kp = keygen(TINY907, seed)
        for s in STRATEGY_NAMES:
            ct = encrypt(m, kp.public_point, TINY907, s, rng_seed=seed)
            assert decrypt(ct, kp, TINY907, s, original_len=len(m)) == m


def test_unencodable_message_raises():
    bad = next(v for v in range(256) if v not in encodable_bytes(TINY907))
    kp = keygen(TINY907, 0)
    with pytest.raises(EncodingError):
        encrypt(bytes([bad]), kp.public_point, TINY907)


def test_wrong_key_does_not_recover_message():
    kp, other = keygen(K1, 1), keygen(K1, 2)
    m = b"attack at dawn"
    ct = encrypt(m, kp.public_point, K1, "mary", rng_seed=0)
    try:
        out = decrypt(ct, other, K1, original_len=len(m))
    except ContractViolation:
        return  # decrypted point is not a message block at all
    assert out != m


def test_tampered_block_changes_plaintext():
    kp = keygen(K1, 4)
    m = b"0123456789" * 6 + b"!"
    ct = encrypt(m, kp.public_point, K1, rng_seed=1)
    c1, c2 = ct.blocks[1]
    forged = ElGamalCiphertext((ct.blocks[0], (c1, point_add(c2, K1.G, K1)), ct.blocks[2]))
    pts = decrypt_points(forged, kp, K1)
    assert pts[1] != encode_message(m, K1)[1]
    try:
        assert decrypt(forged, kp, K1, original_len=len(m)) != m
    except ContractViolation:
        pass


def test_tampered_point_off_curve_rejected():
    kp = keygen(K1, 4)
    ct = encrypt(b"abc", kp.public_point, K1, rng_seed=1)
    c1, c2 = ct.blocks[0]
    forged = ElGamalCiphertext(((c1, point(c2.x, c2.y + 1)),))
    with pytest.raises(ContractViolation):
        decrypt(forged, kp, K1)


def test_encrypt_rejects_bad_public_key():
    with pytest.raises(ContractViolation):
        encrypt(b"a", INFINITY, K1)
    with pytest.raises(ContractViolation):
        encrypt(b"a", point(1, 1), K1)


def test_text_formats_roundtrip():
    kp = keygen(K1, 5)
    m = b"some bytes of payload"
    ct = encrypt(m, kp.public_point, K1, rng_seed=2)
    text = dump_ciphertext(ct, K1, len(m))
    assert text.startswith("maryec-ciphertext v1 curve=secp256k1 blocks=1 length=21\n")
    curve, again, length = load_ciphertext(text)
    assert curve == K1 and again == ct and length == len(m)
    assert load_secret(dump_secret(kp, K1), K1) == kp
    assert load_public(dump_public(kp, K1), K1) == kp.public_point


def test_text_format_errors():
    kp = keygen(K1, 5)
    ct = encrypt(b"abc", kp.public_point, K1)
    text = dump_ciphertext(ct, K1, 3)
    head, body = text.split("\n", 1)
    with pytest.raises(FormatError):
        load_ciphertext("garbage\n" + body)
    with pytest.raises(FormatError):
        load_ciphertext(head.replace("blocks=1", "blocks=2") + "\n" + body)
    with pytest.raises(FormatError):
        load_ciphertext(head.replace("length=3", "length=x") + "\n" + body)
    with pytest.raises(FormatError):
        load_ciphertext(head + "\n" + body.replace(" ", ""))
    flipped = body[:-3] + ("0" if body[-3] != "0" else "1") + body[-2:]
    with pytest.raises(FormatError):
        load_ciphertext(head + "\n" + flipped)
    with pytest.raises(FormatError):
        load_public("00", K1)
    with pytest.raises(FormatError):
        load_public("zz", K1)
