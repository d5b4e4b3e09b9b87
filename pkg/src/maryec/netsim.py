"""Discrete-event simulation of encrypt-then-transmit over a chain of nodes.

Nodes 0..N-1 form a line of point-to-point links.  Messages are handled
one after another: the source encrypts for the destination's key, the
ciphertext travels hop by hop, and the destination pays a fixed protocol
cost on delivery.  Encryption time enters the simulated clock either as
measured wall time (``clock="measured"``) or as operation count times a
fixed per-operation cost (``clock="ops"``); the second is bit-for-bit
reproducible.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import random
import time
from dataclasses import dataclass, field, replace

from .curve import count_ops, registry_get
from .elgamal import ElGamalKeyPair, ciphertext_to_bytes, decrypt, encrypt, keygen
from .errors import ConfigError
from .strategies import STRATEGY_NAMES, get_strategy

PROTOCOL_OVERHEAD_S = 0.001
DEFAULT_MESSAGE_COUNT = 20
DEFAULT_MESSAGE_BYTES = 1024
CLOCKS = ("measured", "ops")
SUMMARY_COLUMNS = ("curve", "strategy", "messages", "enc_time_s", "com_time_s", "sim_time_s")


def default_workload(
    node_count: int = 5, count: int = DEFAULT_MESSAGE_COUNT, size: int = DEFAULT_MESSAGE_BYTES
) -> list[tuple[int, int, int]]:
    """``count`` messages of ``size`` bytes, each sent two nodes down the chain."""
    return [(i % node_count, (i % node_count + 2) % node_count, size) for i in range(count)]


@dataclass(frozen=True)
class SimConfig:
    node_count: int = 5
    link_rate_bps: float = 5e6
    link_delay_s: float = 0.002
    messages: tuple[tuple[int, int, int], ...] | None = None
    curve: str = "secp256k1"
    strategy: str = "mary"
    seed: int = 0
    clock: str = "measured"
    op_cost_s: float = 1e-5
    verify_delivery: bool = False

    def __post_init__(self) -> None:
        if self.node_count < 2:
            raise ConfigError("node_count must be at least 2")
        if not self.link_rate_bps > 0:
            raise ConfigError("link_rate_bps must be positive")
        if self.link_delay_s < 0:
            raise ConfigError("link_delay_s must be non-negative")
        if self.clock not in CLOCKS:
            raise ConfigError(f"clock must be one of {CLOCKS}")
        if self.op_cost_s < 0:
            raise ConfigError("op_cost_s must be non-negative")
        if self.messages is None:
            object.__setattr__(self, "messages", tuple(default_workload(self.node_count)))
        else:
            object.__setattr__(self, "messages", tuple(tuple(m) for m in self.messages))
        registry_get(self.curve)
        get_strategy(self.strategy)

    def route(self, src: int, dst: int) -> list[int]:
        """Node sequence from src to dst along the chain."""
        n = self.node_count
        if not (0 <= src < n and 0 <= dst < n) or src == dst:
            raise ConfigError(f"message {src}->{dst} cannot be routed over {n} nodes")
        step = 1 if dst > src else -1
        return list(range(src, dst + step, step))


@dataclass(frozen=True)
class SimEvent:
    time_s: float
    seq: int
    node: int
    kind: str
    message: int


@dataclass
class SimTrace:
    events: list[SimEvent] = field(default_factory=list)
    enc_time_s: float = 0.0
    com_time_s: float = 0.0
    sim_time_s: float = 0.0
    wire_bytes: int = 0
    # kept separately so com - enc is exact rather than a float difference
    network_time_s: float = 0.0

    @property
    def totals(self) -> tuple[float, float, float]:
        return self.enc_time_s, self.com_time_s, self.sim_time_s


def transmission_time(nbytes: int, rate_bps: float, delay_s: float) -> float:
    return nbytes * 8 / rate_bps + delay_s


def _node_keys(config: SimConfig) -> list[ElGamalKeyPair]:
    curve = registry_get(config.curve)
    return [keygen(curve, f"{config.seed}:node:{i}") for i in range(config.node_count)]


def _payload(config: SimConfig, index: int, size: int) -> bytes:
    return random.Random(f"{config.seed}:payload:{index}").randbytes(size)


def run_simulation(config: SimConfig) -> SimTrace:
    curve = registry_get(config.curve)
    strategy = get_strategy(config.strategy)
    routes = [config.route(src, dst) for src, dst, _ in config.messages]
    keys = _node_keys(config)
    trace = SimTrace()
    queue: list[tuple] = []
    seq = 0

    def schedule(at: float, node: int, kind: str, msg: int, action=None) -> None:
        nonlocal seq
        heapq.heappush(queue, (at, seq, node, kind, msg, action))
        seq += 1

    def start_message(now: float, i: int) -> None:
        if i == len(config.messages):
            return
        src, dst, size = config.messages[i]
        m = _payload(config, i, size)
        with count_ops() as ops:
            t0 = time.perf_counter()
            ct = encrypt(m, keys[dst].public_point, curve, strategy, f"{config.seed}:enc:{i}")
            wall = time.perf_counter() - t0
        enc = wall if config.clock == "measured" else ops.total * config.op_cost_s
        if config.verify_delivery and decrypt(ct, keys[dst], curve, original_len=size) != m:
            raise RuntimeError(f"message {i} did not survive the round trip")
        wire = len(ciphertext_to_bytes(ct, curve))
        trace.enc_time_s += enc
        trace.wire_bytes += wire
        hop = transmission_time(wire, config.link_rate_bps, config.link_delay_s)
        t = now + enc
        schedule(t, src, "enc_done", i)
        path = routes[i]
        for a, b in zip(path, path[1:]):
            schedule(t, a, "tx_start", i)
            t += hop
            trace.network_time_s += hop
            schedule(t, b, "rx", i)
        schedule(t, dst, "deliver", i)
        t += PROTOCOL_OVERHEAD_S
        schedule(t, dst, "proto_done", i, lambda at: begin(at, i + 1))

    def begin(now: float, i: int) -> None:
        if i < len(config.messages):
            schedule(now, config.messages[i][0], "enc_start", i, lambda at: start_message(at, i))

    begin(0.0, 0)
    while queue:
        at, s, node, kind, msg, action = heapq.heappop(queue)
        trace.events.append(SimEvent(at, s, node, kind, msg))
        if action is not None:
            action(at)

    n = len(config.messages)
    trace.com_time_s = trace.enc_time_s + trace.network_time_s
    trace.sim_time_s = trace.com_time_s + PROTOCOL_OVERHEAD_S * n
    return trace


def compare_strategies(
    config_base: SimConfig, strategies=STRATEGY_NAMES
) -> dict[str, SimTrace]:
    return {s: run_simulation(replace(config_base, strategy=s)) for s in strategies}


# ---------------------------------------------------------------------------
# output

def trace_to_jsonl(trace: SimTrace) -> str:
    return "".join(
        json.dumps({"t": e.time_s, "seq": e.seq, "node": e.node, "kind": e.kind, "message": e.message})
        + "\n"
        for e in trace.events
    )


def summary_csv(rows) -> str:
    """``rows`` of (curve, strategy, trace) as a CSV with the three totals."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for curve, strategy, trace in rows:
        delivered = sum(1 for e in trace.events if e.kind == "deliver")
        w.writerow([curve, strategy, delivered, repr(trace.enc_time_s),
                    repr(trace.com_time_s), repr(trace.sim_time_s)])
    return buf.getvalue()
