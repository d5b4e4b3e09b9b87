"""One interface over every scalar multiplication method.

Strategy names are the stable identifiers used by the CLI and reports.
Scalars are reduced modulo the group order n first, so the base point is
assumed to lie in the subgroup generated by G (every registered curve has
cofactor 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import mary, scalarmul
from .curve import AffinePoint, CurveParams, is_on_curve
from .errors import ContractViolation, NotFoundError

STRATEGY_NAMES = (
    "double-and-add",
    "naf",
    "2k-ary",
    "sliding-window",
    "montgomery",
    "comb",
    "fixed-window",
    "mary",
    "mary-binary",
)

# window width per method; comb also takes a group count ("teeth")
_DEFAULT_WINDOW = {"2k-ary": 5, "sliding-window": 4, "fixed-window": 4, "comb": 4}
_DEFAULT_TEETH = 2


@dataclass(frozen=True)
class Strategy:
    name: str
    window: int | None = None
    teeth: int | None = None
    blinding_seed: int | None = None
    q_hint: int | None = None

    def __post_init__(self) -> None:
        if self.name not in STRATEGY_NAMES:
            raise NotFoundError(
                f"unknown strategy {self.name!r}; known: {', '.join(STRATEGY_NAMES)}"
            )
        if self.window is None and self.name in _DEFAULT_WINDOW:
            object.__setattr__(self, "window", _DEFAULT_WINDOW[self.name])
        if self.name == "comb" and self.teeth is None:
            object.__setattr__(self, "teeth", _DEFAULT_TEETH)
        if self.window is not None and not 1 <= self.window <= scalarmul.MAX_WINDOW:
            raise ContractViolation(f"window must be in [1, {scalarmul.MAX_WINDOW}]")
        if self.teeth is not None and self.teeth < 1:
            raise ContractViolation("comb needs at least one group")
        if self.blinding_seed is not None and self.name != "mary":
            raise ContractViolation("blinding is only available for the mary strategy")


def get_strategy(strategy: str | Strategy) -> Strategy:
    return strategy if isinstance(strategy, Strategy) else Strategy(strategy)


def multiply_batch(
    strategy: str | Strategy,
    ks: Sequence[int],
    P: AffinePoint,
    curve: CurveParams,
) -> list[AffinePoint]:
    """[k*P for k in ks], sharing any precomputation on P across the batch."""
    s = get_strategy(strategy)
    if not is_on_curve(P, curve):
        raise ContractViolation(f"base point is not on {curve.name}")
    n = curve.n
    ks = [int(k) % n for k in ks]
    if not ks:
        return []
    name = s.name
    if name == "double-and-add":
        return [scalarmul.double_and_add(k, P, curve) for k in ks]
    if name == "naf":
        return [scalarmul.naf_scalar_mul(k, P, curve) for k in ks]
    if name == "montgomery":
        return [scalarmul.montgomery_ladder_mul(k, P, curve) for k in ks]
    if name == "2k-ary":
        table = scalarmul.odd_multiples(P, s.window, curve)
        return [scalarmul.two_k_ary_mul(k, P, curve, s.window, table) for k in ks]
    if name == "sliding-window":
        table = scalarmul.odd_multiples(P, s.window, curve)
        return [scalarmul.sliding_window_mul(k, P, curve, s.window, table) for k in ks]
    if name == "fixed-window":
        table = scalarmul.all_multiples(P, s.window, curve)
        return [scalarmul.fixed_window_mul(k, P, curve, s.window, table) for k in ks]
    if name == "comb":
        comb = scalarmul.build_comb_table(P, curve, s.window, s.teeth)
        return [scalarmul.fixed_base_comb_mul(k, comb, curve) for k in ks]
    variant = mary.BINARY if name == "mary-binary" else mary.STANDARD
    return mary.batch_mul(ks, P, curve, s.q_hint, variant, s.blinding_seed)


def multiply(strategy: str | Strategy, k: int, P: AffinePoint, curve: CurveParams) -> AffinePoint:
    return multiply_batch(strategy, [k], P, curve)[0]
