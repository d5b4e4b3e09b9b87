"""Elliptic-curve ElGamal with a counter-based message-to-point mapping.

A message is cut into fixed-size byte blocks.  Block value v becomes the
x-coordinate candidate v * 2^c + ctr for ctr = 0, 1, ... until the right
hand side of the curve equation is a square; decoding drops the low c bits
of x.  On the SECG curves c = 8 and a block holds (bitlen(p) - 16) // 8
bytes, so every candidate stays below p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .curve import (
    AffinePoint,
    CurveParams,
    _add,
    _neg,
    is_on_curve,
    point,
    point_to_bytes,
    point_to_hex,
    point_from_hex,
    registry_get,
    scalar_from_hex,
    scalar_to_hex,
)
from .errors import ContractViolation, EncodingError, FormatError
from .field import sqrt_mod
from .strategies import Strategy, multiply, multiply_batch

COUNTER_BITS = 8


def encoding_params(curve: CurveParams) -> tuple[int, int]:
    """(block length in bytes, counter bits) used for ``curve``."""
    bits = int(curve.p).bit_length()
    if bits >= 24:
        return (bits - 16) // 8, COUNTER_BITS
    # small test curves: one byte per block and whatever counter still fits
    counter_bits = bits - 9
    if counter_bits < 1:
        raise EncodingError(f"{curve.name} is too small to carry one byte per point")
    return 1, counter_bits


def block_count(length: int, curve: CurveParams) -> int:
    block_len, _ = encoding_params(curve)
    return -(-length // block_len)


def encode_block(value: int, curve: CurveParams) -> AffinePoint:
    _, c = encoding_params(curve)
    p, a, b = curve.p, curve.a, curve.b
    for ctr in range(1 << c):
        x = (value << c) | ctr
        y = sqrt_mod(x * x * x + a * x + b, p)
        if y is not None:
            return point(x, y)
    raise EncodingError(f"no curve point for block value {value} in {1 << c} tries")


def encode_message(m: bytes, curve: CurveParams) -> list[AffinePoint]:
    block_len, _ = encoding_params(curve)
    points = []
    for start in range(0, len(m), block_len):
        block = m[start : start + block_len].ljust(block_len, b"\x00")
        points.append(encode_block(int.from_bytes(block, "big"), curve))
    return points


def decode_message(points: Sequence[AffinePoint], curve: CurveParams, original_len: int) -> bytes:
    block_len, c = encoding_params(curve)
    if original_len > len(points) * block_len or original_len < 0:
        raise ContractViolation(
            f"original length {original_len} does not fit {len(points)} blocks"
        )
    out = bytearray()
    for P in points:
        if P.is_infinity or not is_on_curve(P, curve):
            raise ContractViolation(f"encoded point is not a finite point of {curve.name}")
        v = int(P.x) >> c
        if v >= 1 << (8 * block_len):
            raise ContractViolation("point does not carry a message block")
        out += v.to_bytes(block_len, "big")
    return bytes(out[:original_len])


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElGamalKeyPair:
    secret: int
    public_point: AffinePoint


@dataclass(frozen=True)
class ElGamalCiphertext:
    blocks: tuple[tuple[AffinePoint, AffinePoint], ...]

    def __len__(self) -> int:
        return len(self.blocks)


def keypair_from_secret(
    secret: int, curve: CurveParams, strategy: str | Strategy = "double-and-add"
) -> ElGamalKeyPair:
    if not 1 <= secret < curve.n:
        raise ContractViolation(f"secret must lie in [1, n) for {curve.name}")
    return ElGamalKeyPair(int(secret), multiply(strategy, secret, curve.G, curve))


def keygen(
    curve: CurveParams, rng_seed: int | str | None = 0, strategy: str | Strategy = "double-and-add"
) -> ElGamalKeyPair:
    secret = random.Random(rng_seed).randrange(1, curve.n)
    return keypair_from_secret(secret, curve, strategy)


def encrypt(
    m: bytes,
    pk: AffinePoint,
    curve: CurveParams,
    strategy: str | Strategy = "double-and-add",
    rng_seed: int | str | None = 0,
) -> ElGamalCiphertext:
    """Per block: fresh k, C1 = kG, C2 = Pm + k*pk.

    All ephemeral scalars are drawn up front from one seeded stream and
    both products are computed as batches, so a precomputing strategy
    builds one table for G and one for pk.
    """
    if pk.is_infinity or not is_on_curve(pk, curve):
        raise ContractViolation(f"public key is not a finite point of {curve.name}")
    pms = encode_message(m, curve)
    if not pms:
        return ElGamalCiphertext(())
    rng = random.Random(rng_seed)
    ks = [rng.randrange(1, curve.n) for _ in pms]
    c1s = multiply_batch(strategy, ks, curve.G, curve)
    shared = multiply_batch(strategy, ks, pk, curve)
    blocks = tuple((c1, _add(pm, s, curve)) for c1, pm, s in zip(c1s, pms, shared))
    return ElGamalCiphertext(blocks)


def decrypt_points(
    ct: ElGamalCiphertext,
    kp: ElGamalKeyPair,
    curve: CurveParams,
    strategy: str | Strategy = "double-and-add",
) -> list[AffinePoint]:
    """Pm = C2 - secret * C1 for every block."""
    out = []
    for c1, c2 in ct.blocks:
        if not (is_on_curve(c1, curve) and is_on_curve(c2, curve)):
            raise ContractViolation(f"ciphertext block is not on {curve.name}")
        out.append(_add(c2, _neg(multiply(strategy, kp.secret, c1, curve), curve), curve))
    return out


def decrypt(
    ct: ElGamalCiphertext,
    kp: ElGamalKeyPair,
    curve: CurveParams,
    strategy: str | Strategy = "double-and-add",
    original_len: int | None = None,
) -> bytes:
    pms = decrypt_points(ct, kp, curve, strategy)
    if original_len is None:
        original_len = len(pms) * encoding_params(curve)[0]
    return decode_message(pms, curve, original_len)


# ---------------------------------------------------------------------------
# serialization

_CT_HEADER = "maryec-ciphertext v1"


def ciphertext_to_bytes(ct: ElGamalCiphertext, curve: CurveParams) -> bytes:
    """Concatenated fixed-width C1 || C2 encodings, the wire payload."""
    w = curve.point_bytes
    return b"".join(
        point_to_bytes(c1, curve).ljust(w, b"\x00") + point_to_bytes(c2, curve).ljust(w, b"\x00")
        for c1, c2 in ct.blocks
    )


def dump_ciphertext(ct: ElGamalCiphertext, curve: CurveParams, original_len: int) -> str:
    lines = [f"{_CT_HEADER} curve={curve.name} blocks={len(ct)} length={original_len}"]
    lines += [f"{point_to_hex(c1, curve)} {point_to_hex(c2, curve)}" for c1, c2 in ct.blocks]
    return "\n".join(lines) + "\n"


def load_ciphertext(text: str) -> tuple[CurveParams, ElGamalCiphertext, int]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_CT_HEADER):
        raise FormatError("missing ciphertext header")
    try:
        fields = dict(item.split("=", 1) for item in lines[0][len(_CT_HEADER):].split())
        curve = registry_get(fields["curve"])
        nblocks, length = int(fields["blocks"]), int(fields["length"])
    except (ValueError, KeyError) as exc:
        raise FormatError(f"bad ciphertext header: {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != nblocks:
        raise FormatError(f"header announces {nblocks} blocks, found {len(body)}")
    blocks = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad ciphertext line: {ln!r}")
        blocks.append((point_from_hex(parts[0], curve), point_from_hex(parts[1], curve)))
    return curve, ElGamalCiphertext(tuple(blocks)), length


def dump_secret(kp: ElGamalKeyPair, curve: CurveParams) -> str:
    return scalar_to_hex(kp.secret, curve) + "\n"


def dump_public(kp: ElGamalKeyPair, curve: CurveParams) -> str:
    return point_to_hex(kp.public_point, curve) + "\n"


def load_secret(text: str, curve: CurveParams) -> ElGamalKeyPair:
    secret = scalar_from_hex(text.strip(), curve)
    return keypair_from_secret(secret, curve)


def load_public(text: str, curve: CurveParams) -> AffinePoint:
    P = point_from_hex(text.strip(), curve)
    if P.is_infinity:
        raise FormatError("public key cannot be the point at infinity")
    return P
