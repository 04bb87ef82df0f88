"""Command-line front end.

Subcommands: sequence, anomaly, capacity, pool, inspect. Every run is fully
determined by config + seed; two invocations with the same inputs produce
byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import persistence
from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_anomaly,
    run_pool,
    run_sequence,
)
from .transition import capacity

__all__ = ["main"]


def _load_config(path: str, seed_override: int | None) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            [f"config {path}: parse error at line {exc.lineno}: {exc.msg}"]
        ) from exc
    if seed_override is not None:
        if not isinstance(raw, dict):
            raise ConfigError(["config must be a JSON object"])
        raw = dict(raw)
        raw["seed"] = seed_override
    return ExperimentConfig.from_dict(raw)


def _read_stream(path: str, scalar: bool) -> list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            raise ConfigError([f"stream line {lineno}: empty line"])
        if scalar:
            try:
                tokens.append(float(token))
            except ValueError:
                raise ConfigError(
                    [f"stream line {lineno}: cannot parse {token!r} as a number"]
                ) from None
        else:
            tokens.append(token)
    if not tokens:
        raise ConfigError(["stream is empty"])
    return tokens


def _finish(report, model, args, name: str) -> None:
    if args.out:
        records_path, summary_path = report.write(args.out, name)
        print(f"records: {records_path}")
        print(f"summary: {summary_path}")
    if getattr(args, "snapshot", None):
        persistence.save(model, args.snapshot)
        print(f"snapshot: {args.snapshot}")


def _resumed_model(args):
    if getattr(args, "resume", None) is None:
        return None
    from .experiments import SequenceModel

    model = persistence.load(args.resume)
    if not isinstance(model, SequenceModel):
        raise ConfigError(
            [f"--resume expects a sequence_model snapshot, got {type(model).__name__}"]
        )
    return model


def _cmd_sequence(args) -> int:
    config = _load_config(args.config, args.seed)
    report, model, evaluations = run_sequence(config, model=_resumed_model(args))
    for ev in evaluations:
        status = "ok" if ev["correct"] else "MISS"
        print(
            f"[{status}] {' '.join(ev['tokens'][:-1])} -> predicted "
            f"{ev['predicted']} (expected {ev['expected']}, overlap {ev['overlap']})"
        )
    print(f"eval accuracy: {report.summary['eval_accuracy']:.3f}")
    mean_anom = report.summary.get("anomaly", {}).get("mean", float("nan"))
    print(f"mean training anomaly: {mean_anom:.4f}")
    _finish(report, model, args, "sequence")
    return 0


def _cmd_anomaly(args) -> int:
    config = _load_config(args.config, args.seed)
    scalar = config.encoder.get("type") == "scalar"
    tokens = _read_stream(args.stream, scalar)
    report, model = run_anomaly(config, tokens, model=_resumed_model(args))
    summary = report.summary["anomaly"]
    print(
        f"steps: {len(report.steps)}  anomaly mean {summary['mean']:.4f} "
        f"max {summary['max']:.4f} final {summary['final']:.4f}"
    )
    _finish(report, model, args, "anomaly")
    return 0


def _cmd_capacity(args) -> int:
    result = capacity(args.columns, args.active, args.cells)
    print(f"{'representation':<12} {'log10':>14} {'count':>16}")
    for name in ("columnar", "contexts", "cellular"):
        log10 = result[name]
        exponent = math.floor(log10)
        mantissa = 10.0 ** (log10 - exponent)
        print(f"{name:<12} {log10:>14.5f} {mantissa:>10.5f}e+{exponent}")
    return 0


def _cmd_pool(args) -> int:
    config = _load_config(args.config, args.seed)
    report, model = run_pool(config, model=_resumed_model(args))
    pooled = report.summary["stability_pooled"]
    l4 = report.summary["stability_l4"]
    print(f"stability pooled: {pooled:.4f}")
    print(f"stability l4 cellular: {l4:.4f}")
    ratio = pooled / l4 if l4 > 0 else float("inf")
    print(f"ratio: {ratio:.4f}")
    _finish(report, model, args, "pool")
    return 0


def _cmd_inspect(args) -> int:
    model = persistence.load(args.snapshot)
    kind = type(model).__name__
    print(f"kind: {kind}")
    state = model.to_state()
    params = state.get("params")
    if params is None and "tm" in state:
        params = state["tm"]["params"]
    if params:
        for key in sorted(params):
            print(f"  {key}: {params[key]}")
    if hasattr(model, "segments"):
        n_segments = sum(len(s) for s in model.segments.values())
        print(f"  cells with segments: {len(model.segments)}")
        print(f"  total segments: {n_segments}")
    if hasattr(model, "symbol_table"):
        print(f"  symbols: {sorted(map(str, model.symbol_table))}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minicolumn",
        description="Sequence memory experiments over sparse distributed codes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, snapshot=True):
        p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="directory for report files")
        if snapshot:
            p.add_argument("--snapshot", default=None, help="save model here after the run")
            p.add_argument("--resume", default=None, help="continue from a saved model snapshot")

    p_seq = sub.add_parser("sequence", help="train on sequences, decode next-step predictions")
    common(p_seq)
    p_seq.set_defaults(func=_cmd_sequence)

    p_anom = sub.add_parser("anomaly", help="score a token stream, one per line")
    common(p_anom)
    p_anom.add_argument("stream", help="token stream file, or - for stdin")
    p_anom.set_defaults(func=_cmd_anomaly)

    p_cap = sub.add_parser("capacity", help="representation capacity arithmetic")
    p_cap.add_argument("--columns", type=int, required=True)
    p_cap.add_argument("--active", type=int, required=True)
    p_cap.add_argument("--cells", type=int, default=1)
    p_cap.set_defaults(func=_cmd_capacity)

    p_pool = sub.add_parser("pool", help="train a pooling stack on a cycle")
    common(p_pool)
    p_pool.set_defaults(func=_cmd_pool)

    p_ins = sub.add_parser("inspect", help="summarize a snapshot file")
    p_ins.add_argument("--snapshot", required=True)
    p_ins.set_defaults(func=_cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except persistence.SnapshotError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
