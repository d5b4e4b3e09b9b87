"""Timing and memory accounting for the multiplication strategies.

Times are medians over repeated runs of a whole batch, precomputation
included.  Memory is not probed from the OS; ``account_memory`` counts the
points each strategy keeps alive (tables, working registers, results held
by the caller) so the numbers are identical on every machine.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from dataclasses import asdict, dataclass, field

from . import mary
from .curve import count_ops, registry_get
from .elgamal import encrypt, encoding_params, keygen
from .errors import ConfigError
from .strategies import STRATEGY_NAMES, Strategy, get_strategy, multiply_batch

CSV_COLUMNS = (
    "curve", "strategy", "Q", "L", "time_s", "adds", "doubles",
    "points_stored", "bytes_accounted", "time_ratio",
)
BASELINE = "double-and-add"
CLOCKS = ("measured", "ops")


@dataclass
class BenchConfig:
    curves: list[str] = field(default_factory=lambda: ["secp256k1"])
    strategies: list[str] = field(default_factory=lambda: list(STRATEGY_NAMES))
    q_values: list[int] = field(default_factory=lambda: [1, 10, 100, 1000])
    message_lengths: list[int] = field(default_factory=lambda: [100, 300, 360])
    repetitions: int = 3
    seed: int = 0
    clock: str = "measured"
    op_cost_s: float = 1e-5

    def __post_init__(self) -> None:
        if self.clock not in CLOCKS:
            raise ConfigError(f"clock must be one of {CLOCKS}")
        if self.repetitions < 3:
            raise ConfigError("repetitions must be at least 3 (median of runs)")
        if any(q < 0 for q in self.q_values) or any(L < 0 for L in self.message_lengths):
            raise ConfigError("Q and L values must be non-negative")
        for name in self.curves:
            registry_get(name)
        for s in self.strategies:
            get_strategy(s)


@dataclass
class BenchRow:
    curve: str
    strategy: str
    Q: int | None
    L: int | None
    time_s: float
    adds: int
    doubles: int
    points_stored: int
    bytes_accounted: int
    time_ratio: float | None = None


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def fill_ratios(self) -> None:
        """time_ratio = time / time of the double-and-add row with the same key."""
        base = {
            (r.curve, r.Q, r.L): r.time_s for r in self.rows if r.strategy == BASELINE
        }
        for r in self.rows:
            t = base.get((r.curve, r.Q, r.L))
            r.time_ratio = r.time_s / t if t else None

    def ratio(self, curve: str, strategy: str, Q: int | None = None, L: int | None = None):
        for r in self.rows:
            if (r.curve, r.strategy, r.Q, r.L) == (curve, strategy, Q, L):
                return r.time_ratio
        raise KeyError((curve, strategy, Q, L))


@dataclass(frozen=True)
class MemoryAccount:
    strategy: str
    curve: str
    Q: int
    table_points: int
    build_points: int
    working_points: int
    result_points: int
    aux_bytes: int
    point_bytes: int

    @property
    def peak_points(self) -> int:
        eval_phase = self.working_points + self.result_points
        return self.table_points + max(self.build_points, eval_phase)

    @property
    def peak_bytes(self) -> int:
        return self.peak_points * self.point_bytes + self.aux_bytes


def account_memory(
    strategy: str | Strategy, curve_name: str, Q: int, results_held: int | None = None
) -> MemoryAccount:
    """Deterministic peak-memory model for a batch of Q multiplications.

    ``table_points``: precomputed points alive for the whole batch.
    ``build_points``: extra temporaries while the table is built.
    ``working_points``: registers of one evaluation.
    ``result_points``: outputs held by the caller (Q unless overridden).
    ``aux_bytes``: the digit/bit buffer of one scalar.
    """
    s = get_strategy(strategy)
    curve = registry_get(curve_name)
    nbits = int(curve.n).bit_length()
    held = Q if results_held is None else results_held
    name = s.name
    table = build = 0
    working = 1
    aux = -(-nbits // 8)
    if Q == 0:
        return MemoryAccount(name, curve_name, 0, 0, 0, 0, held, 0, curve.point_bytes)
    if name == "naf":
        table = 1  # -P
        aux = nbits + 1
    elif name == "montgomery":
        working = 2
    elif name in ("2k-ary", "sliding-window"):
        table = 1 << (s.window - 1)
        build = 1  # 2P
        aux = -(-nbits // s.window)
    elif name == "fixed-window":
        table = 1 << s.window
        aux = -(-nbits // s.window)
    elif name == "comb":
        table = s.teeth << s.window
        aux = -(-nbits // s.window)
    elif name in ("mary", "mary-binary"):
        variant = mary.BINARY if name == "mary-binary" else mary.STANDARD
        plan = mary.plan_parameters(curve, s.q_hint or Q, variant)
        digit_bytes = -(-plan.B.bit_length() // 8)
        if variant == mary.STANDARD:
            rows = plan.d + (mary.BLINDING_ROWS if s.blinding_seed is not None else 0)
            table = rows * (plan.B + 1)
            aux = rows * digit_bytes
        else:
            table = plan.table_points
            build = plan.B + 1  # one row of M while streaming
            aux = plan.d * digit_bytes
    return MemoryAccount(name, curve_name, Q, table, build, working, held, aux, curve.point_bytes)


def _median_time(fn, config: BenchConfig):
    """Median wall time of ``fn`` over the configured repetitions.

    With ``clock="ops"`` the run happens once and the time is the operation
    count scaled by ``op_cost_s``, which makes reports reproducible.
    """
    if config.clock == "ops":
        with count_ops() as counter:
            fn()
        return counter.total * config.op_cost_s, counter
    times = []
    ops = None
    fn()  # warm-up, not timed
    for _ in range(config.repetitions):
        with count_ops() as counter:
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        ops = counter
    return statistics.median(times), ops


def _metadata(config: BenchConfig, kind: str) -> dict:
    if config.clock == "ops":
        timer, resolution = "operation count", config.op_cost_s
    else:
        timer, resolution = "perf_counter", time.get_clock_info("perf_counter").resolution
    return {
        "kind": kind,
        "timer": timer,
        "timer_resolution_s": resolution,
        "repetitions": config.repetitions,
        "seed": config.seed,
    }


def scalars_for(curve_name: str, Q: int, seed: int) -> list[int]:
    curve = registry_get(curve_name)
    rng = random.Random(f"{seed}:{curve_name}:{Q}")
    return [rng.randrange(curve.n) for _ in range(Q)]


def bench_scalar_mul(config: BenchConfig) -> BenchReport:
    report = BenchReport(metadata=_metadata(config, "scalar_mul"))
    for curve_name in config.curves:
        curve = registry_get(curve_name)
        for Q in config.q_values:
            if Q == 0:
                continue
            ks = scalars_for(curve_name, Q, config.seed)
            for s in config.strategies:
                strategy = get_strategy(s)
                elapsed, ops = _median_time(
                    lambda: multiply_batch(strategy, ks, curve.G, curve), config
                )
                acct = account_memory(strategy, curve_name, Q)
                report.rows.append(BenchRow(
                    curve_name, strategy.name, Q, None, elapsed, ops.adds, ops.doubles,
                    acct.peak_points, acct.peak_bytes,
                ))
    report.fill_ratios()
    return report


def message_for(length: int, seed: int) -> bytes:
    return random.Random(f"{seed}:message:{length}").randbytes(length)


def bench_elgamal(config: BenchConfig) -> BenchReport:
    report = BenchReport(metadata=_metadata(config, "elgamal"))
    for curve_name in config.curves:
        curve = registry_get(curve_name)
        kp = keygen(curve, config.seed)
        for L in config.message_lengths:
            m = message_for(L, config.seed)
            blocks = -(-L // encoding_params(curve)[0])
            for s in config.strategies:
                strategy = get_strategy(s)
                elapsed, ops = _median_time(
                    lambda: encrypt(m, kp.public_point, curve, strategy, config.seed),
                    config,
                )
                # both kG and k*pk results are held until the ciphertext is assembled
                acct = account_memory(strategy, curve_name, blocks, results_held=2 * blocks)
                report.rows.append(BenchRow(
                    curve_name, strategy.name, None, L, elapsed, ops.adds, ops.doubles,
                    acct.peak_points, acct.peak_bytes,
                ))
    report.fill_ratios()
    return report


# ---------------------------------------------------------------------------
# output

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: BenchReport, fmt: str = "csv") -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in report.rows:
            d = asdict(r)
            writer.writerow([_cell(d[c]) for c in CSV_COLUMNS])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "metadata": report.metadata,
            "columns": list(CSV_COLUMNS),
            "rows": [asdict(r) for r in report.rows],
        }
        return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode()
    raise ConfigError(f"unknown report format {fmt!r} (expected csv or json)")


def report_from_json(data: bytes | str) -> BenchReport:
    doc = json.loads(data)
    rows = [BenchRow(**{c: row[c] for c in CSV_COLUMNS}) for row in doc["rows"]]
    return BenchReport(rows, doc.get("metadata", {}))
