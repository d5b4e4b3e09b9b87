"""Command-line entry point: ``maryec <subcommand> [options]``.

Every failure prints exactly one line ``error: <kind>: <reason>`` on
standard error.  Exit status is 0 on success, 1 on a runtime error and 2
on a usage error.  Option values can also come from a ``key=value`` file
given with ``--config``; flags on the command line take precedence, and
``MARY_SEED`` supplies the seed when neither sets it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench, mary, netsim
from .curve import list_curves, registry_get
from .elgamal import (
    decrypt,
    dump_ciphertext,
    dump_public,
    dump_secret,
    encrypt,
    keygen,
    load_ciphertext,
    load_public,
    load_secret,
)
from .errors import (
    ConfigError,
    ContractViolation,
    EncodingError,
    FaultDetected,
    FormatError,
    MaryError,
    NonInvertibleError,
    NotFoundError,
)
from .strategies import STRATEGY_NAMES

DEFAULTS = {
    "curve": "secp256k1",
    "strategy": "mary",
    "seed": 0,
    "output": None,
    "format": None,
    "q": 256,
    "variant": mary.STANDARD,
    "curves": "secp256k1",
    "strategies": "all",
    "q_values": "1,10,100,1000",
    "lengths": "100,300,360",
    "mode": "scalar",
    "repetitions": 3,
    "clock": "measured",
    "messages": netsim.DEFAULT_MESSAGE_COUNT,
    "size": netsim.DEFAULT_MESSAGE_BYTES,
    "nodes": 5,
    "rate": 5e6,
    "delay": 0.002,
}

_ERROR_KINDS = (
    (ContractViolation, "contract"),
    (NotFoundError, "not-found"),
    (FaultDetected, "fault-detected"),
    (EncodingError, "encoding"),
    (FormatError, "format"),
    (ConfigError, "config"),
    (NonInvertibleError, "arithmetic"),
    (MaryError, "error"),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _names(text: str, universe) -> list[str]:
    return list(universe) if text == "all" else [x.strip() for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--curve", help=f"registry curve name (default {DEFAULTS['curve']})")
    g.add_argument("--strategy", help=f"multiplication strategy (default {DEFAULTS['strategy']})")
    g.add_argument("--seed", type=int, help="RNG seed (default $MARY_SEED, else 0)")
    g.add_argument("--output", "-o", help="output file or prefix (default stdout)")
    g.add_argument("--format", help="output format; choices depend on the subcommand")
    g.add_argument("--config", help="key=value file supplying option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maryec", description="M-ary precomputation for EC scalar multiplication")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("plan", help="show the table parameters chosen for a batch size")
    _common(p)
    p.add_argument("--q", type=int, help=f"expected number of multiplications (default {DEFAULTS['q']})")
    p.add_argument("--variant", choices=mary.VARIANTS, help="table layout (default standard)")

    p = sub.add_parser("keygen", help="write <output>.sec and <output>.pub")
    _common(p)

    p = sub.add_parser("encrypt", help="encrypt a file for a public key")
    _common(p)
    p.add_argument("--public", required=True, help="public key file")
    p.add_argument("--input", "-i", required=True, help="plaintext file")

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    _common(p)
    p.add_argument("--secret", required=True, help="secret key file")
    p.add_argument("--input", "-i", required=True, help="ciphertext file")

    p = sub.add_parser("bench", help="time strategies over batch sizes or message lengths")
    _common(p)
    p.add_argument("--curves", help=f"comma-separated curves (default {DEFAULTS['curves']})")
    p.add_argument("--strategies", help="comma-separated strategies or 'all' (default all)")
    p.add_argument("--q", dest="q_values", help=f"batch sizes (default {DEFAULTS['q_values']})")
    p.add_argument("--lengths", help=f"message lengths for --mode elgamal (default {DEFAULTS['lengths']})")
    p.add_argument("--mode", choices=("scalar", "elgamal"), help="what to time (default scalar)")
    p.add_argument("--repetitions", type=int, help="timed runs per cell, median taken (default 3)")
    p.add_argument("--clock", choices=bench.CLOCKS, help="measured wall time or operation count")

    p = sub.add_parser("simulate", help="run the network simulation")
    _common(p)
    p.add_argument("--curves", help="comma-separated curves (default: --curve)")
    p.add_argument("--messages", type=int, help=f"message count (default {DEFAULTS['messages']})")
    p.add_argument("--size", type=int, help=f"bytes per message (default {DEFAULTS['size']})")
    p.add_argument("--nodes", type=int, help="nodes in the chain (default 5)")
    p.add_argument("--rate", type=float, help="link rate in bit/s (default 5e6)")
    p.add_argument("--delay", type=float, help="link delay in seconds (default 0.002)")
    p.add_argument("--clock", choices=netsim.CLOCKS, help="measured wall time or operation count")

    p = sub.add_parser("curves", help="list registered curves")
    _common(p)
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, MARY_SEED and DEFAULTS."""
    config = _read_config(args.config) if args.config else {}
    for key, value in config.items():
        if not hasattr(args, key) or key == "config":
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
    for key in vars(args):
        if getattr(args, key) is not None:
            continue
        if key in config:
            raw = config[key]
            default = DEFAULTS.get(key)
            try:
                value = type(default)(raw) if isinstance(default, (int, float)) else raw
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        elif key == "seed" and os.environ.get("MARY_SEED"):
            try:
                value = int(os.environ["MARY_SEED"])
            except ValueError:
                raise ConfigError("MARY_SEED must be an integer") from None
        else:
            value = DEFAULTS.get(key)
        setattr(args, key, value)
    return args


def _emit(text: str | bytes, output: str | None) -> None:
    data = text.encode() if isinstance(text, str) else text
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _check_format(fmt: str | None, allowed: tuple[str, ...]) -> str:
    fmt = fmt or allowed[0]
    if fmt not in allowed:
        raise UsageError(f"--format must be one of {', '.join(allowed)}")
    return fmt


# ---------------------------------------------------------------------------
# subcommands

def cmd_plan(args) -> None:
    if args.q < 1:
        raise UsageError("--q must be a positive integer")
    fmt = _check_format(args.format, ("text", "json"))
    curve = registry_get(args.curve)
    plan = mary.plan_parameters(curve, args.q, args.variant)
    info = {
        "curve": curve.name,
        "variant": plan.variant,
        "q": args.q,
        "d": plan.d,
        "B": plan.B,
        "table_points": plan.table_points,
        "predicted_cost": mary.plan_cost(plan.d, curve.p, args.q),
    }
    if fmt == "json":
        _emit(json.dumps(info) + "\n", args.output)
    else:
        _emit("".join(f"{k}: {v}\n" for k, v in info.items()), args.output)


def cmd_keygen(args) -> None:
    curve = registry_get(args.curve)
    kp = keygen(curve, args.seed)
    prefix = args.output or "maryec-key"
    _emit(dump_secret(kp, curve), prefix + ".sec")
    _emit(dump_public(kp, curve), prefix + ".pub")


def _read_text(path: str) -> str:
    with open(path, encoding="ascii", errors="strict") as fh:
        try:
            return fh.read()
        except UnicodeDecodeError:
            raise FormatError(f"{path} is not a text file") from None


def cmd_encrypt(args) -> None:
    curve = registry_get(args.curve)
    pk = load_public(_read_text(args.public), curve)
    with open(args.input, "rb") as fh:
        m = fh.read()
    ct = encrypt(m, pk, curve, args.strategy, args.seed)
    _emit(dump_ciphertext(ct, curve, len(m)), args.output)


def cmd_decrypt(args) -> None:
    curve, ct, length = load_ciphertext(_read_text(args.input))
    kp = load_secret(_read_text(args.secret), curve)
    _emit(decrypt(ct, kp, curve, args.strategy, length), args.output)


def cmd_bench(args) -> None:
    fmt = _check_format(args.format, ("csv", "json"))
    config = bench.BenchConfig(
        curves=_names(args.curves, list_curves()),
        strategies=_names(args.strategies, STRATEGY_NAMES),
        q_values=_int_list(args.q_values),
        message_lengths=_int_list(args.lengths),
        repetitions=args.repetitions,
        seed=args.seed,
        clock=args.clock,
    )
    run = bench.bench_elgamal if args.mode == "elgamal" else bench.bench_scalar_mul
    _emit(bench.emit_report(run(config), fmt), args.output)


def cmd_simulate(args) -> None:
    fmt = _check_format(args.format, ("csv", "jsonl"))
    curves = _names(args.curves, list_curves()) if args.curves else [args.curve]
    strategies = _names(args.strategy, STRATEGY_NAMES)
    workload = tuple(netsim.default_workload(args.nodes, args.messages, args.size))
    rows = []
    for curve in curves:
        for strategy in strategies:
            config = netsim.SimConfig(
                node_count=args.nodes,
                link_rate_bps=args.rate,
                link_delay_s=args.delay,
                messages=workload,
                curve=curve,
                strategy=strategy,
                seed=args.seed,
                clock=args.clock,
            )
            rows.append((curve, strategy, netsim.run_simulation(config)))
    if fmt == "jsonl":
        out = []
        for curve, strategy, trace in rows:
            for line in netsim.trace_to_jsonl(trace).splitlines():
                event = json.loads(line)
                out.append(json.dumps({"curve": curve, "strategy": strategy, **event}) + "\n")
        _emit("".join(out), args.output)
    else:
        _emit(netsim.summary_csv(rows), args.output)


def cmd_curves(args) -> None:
    fmt = _check_format(args.format, ("text", "json"))
    entries = []
    for name in list_curves():
        c = registry_get(name)
        entries.append({"name": name, "bits": int(c.p).bit_length(), "order": hex(c.n)})
    if fmt == "json":
        _emit(json.dumps(entries) + "\n", args.output)
    else:
        _emit("".join(f"{e['name']}\t{e['bits']}\t{e['order']}\n" for e in entries), args.output)


COMMANDS = {
    "plan": cmd_plan,
    "keygen": cmd_keygen,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "bench": cmd_bench,
    "simulate": cmd_simulate,
    "curves": cmd_curves,
}


def _fail(kind: str, message: str, code: int) -> int:
    text = " ".join(str(message).split()) or kind
    print(f"error: {kind}: {text}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        args = _resolve(build_parser().parse_args(argv))
        COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except MaryError as exc:
        kind = next(k for cls, k in _ERROR_KINDS if isinstance(exc, cls))
        return _fail(kind, str(exc), 1)
    except OSError as exc:
        return _fail("io", f"{exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
