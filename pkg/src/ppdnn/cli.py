"""Command-line surface: trace generation, simulation runs, evaluation and
cross-run reporting.

Exit codes: 0 success, 1 usage, 2 input validation, 3 internal invariant
violation. A config file named by --config or the PPDNN_CONFIG environment
variable supplies dotted-key defaults; command-line --set flags win.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .core import ObjectClass, TaskId
from .metrics import evaluate_report
from .sim import MODES, RunConfig, run
from .similarity import make_thumbnail, ssim
from .traceio import (
    BUILTIN_SCENARIOS,
    ObjectScript,
    ScenarioScript,
    TraceFormatError,
    builtin_script,
    generate,
    write_trace,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _parse_value(text: str):
    lowered = text.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip()


def read_config_file(path: str) -> dict[str, object]:
    """Dotted-key config: one ``section.key = value`` per line, # comments."""
    values: dict[str, object] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"{path}:{line_no}: expected 'key = value'")
                key, _, value = line.partition("=")
                values[key.strip()] = _parse_value(value)
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    return values


_TASK_KEYS = {t.value: t for t in TaskId}


def build_run_config(mode: str, seed: int, overrides: dict[str, object]) -> RunConfig:
    """Assemble a RunConfig from dotted keys; unknown keys are rejected."""
    cfg = RunConfig(mode=mode, seed=seed)
    keyframe = cfg.keyframe
    flops = cfg.flops
    sync = cfg.sync
    emulator = cfg.emulator
    targets = dict(cfg.latency_targets)

    simple_fields = {
        "sim.deadline_ms": "deadline_ms",
        "sim.executor": "executor",
        "sim.queue_depth": "queue_depth",
        "sim.dispatch_queue_depth": "dispatch_queue_depth",
        "sim.route_all_missed": "route_all_missed",
        "sim.predictor_latency_ms": "predictor_latency_ms",
        "sim.predicted_score": "predicted_score",
        "tracker.match_threshold": "tracker_match_threshold",
        "tracker.max_misses": "tracker_max_misses",
        "latency.base_fraction": "latency_base_fraction",
        "latency.noise_stddev_ms": "noise_stddev_ms",
    }
    for key, value in overrides.items():
        try:
            if key in simple_fields:
                setattr(cfg, simple_fields[key], value)
            elif key.startswith("keyframe."):
                keyframe = replace(keyframe, **{key.split(".", 1)[1]: value})
            elif key.startswith("flops."):
                flops = replace(flops, **{key.split(".", 1)[1]: value})
            elif key.startswith("fusion."):
                sync = replace(sync, **{key.split(".", 1)[1]: value})
            elif key.startswith("emulator."):
                emulator = replace(emulator, **{key.split(".", 1)[1]: value})
            elif key.startswith("latency.target."):
                task_name = key.rsplit(".", 1)[1]
                if task_name not in _TASK_KEYS:
                    raise InputError(f"unknown task in config key: {key}")
                targets[_TASK_KEYS[task_name]] = float(value)
            else:
                raise InputError(f"unknown config key: {key}")
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad value for {key}: {exc}") from exc
    try:
        cfg.keyframe = keyframe
        cfg.flops = flops
        cfg.sync = sync
        cfg.emulator = emulator
        cfg.latency_targets = targets
        cfg.__post_init__()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return cfg


def script_from_json(path: str) -> ScenarioScript:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        objects = tuple(
            ObjectScript(
                class_id=ObjectClass(obj["class"]),
                spawn_s=float(obj.get("spawn_s", 0.0)),
                despawn_s=float(obj.get("despawn_s", data["duration_s"])),
                x=float(obj["x"]),
                y=float(obj["y"]),
                w=float(obj["w"]),
                h=float(obj["h"]),
                vx=float(obj.get("vx", 0.0)),
                vy=float(obj.get("vy", 0.0)),
                vw=float(obj.get("vw", 0.0)),
                vh=float(obj.get("vh", 0.0)),
                jitter_px=float(obj.get("jitter_px", 0.0)),
            )
            for obj in data.get("objects", [])
        )
        return ScenarioScript(
            tag=str(data.get("tag", os.path.basename(path))),
            duration_s=float(data["duration_s"]),
            fps=float(data.get("fps", 30.0)),
            width=int(data.get("width", 1280)),
            height=int(data.get("height", 720)),
            objects=objects,
        )
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"bad scenario script {path}: {exc}") from exc


def cmd_gen_trace(args) -> int:
    if args.script:
        script = script_from_json(args.script)
        if args.fps:
            script = replace(script, fps=args.fps)
    else:
        if args.scenario not in BUILTIN_SCENARIOS:
            raise UsageError(
                f"unknown scenario {args.scenario!r}; valid names: "
                + ", ".join(BUILTIN_SCENARIOS)
            )
        script = builtin_script(args.scenario, fps=args.fps or 30.0,
                                duration_s=args.duration_s)
    header, frames = generate(script, args.seed)
    write_trace(args.out, header, frames)
    print(f"wrote {header.frame_count} frames ({header.scenario_tag}, "
          f"{header.fps} fps) to {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides: dict[str, object] = {}
    config_path = args.config or os.environ.get("PPDNN_CONFIG")
    if config_path:
        overrides.update(read_config_file(config_path))
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = _parse_value(value)
    cfg = build_run_config(args.mode, args.seed, overrides)
    if not os.path.exists(args.trace):
        raise InputError(f"trace not found: {args.trace}")
    report = run(args.trace, cfg)
    report.save(args.out)
    pct = 100.0 * report.fusion_percent
    print(f"mode={report.mode} frames={report.frame_count} "
          f"bundles={report.bundle_count} ({pct:.1f}%) -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    metrics = evaluate_report(
        args.report_dir,
        trace_path=args.trace,
        while_advance=args.while_advance,
        ce_scale=args.ce_scale,
    )
    print(json.dumps(metrics, sort_keys=True, indent=2))
    return EXIT_OK


_REPORT_ROWS = [
    ("fusion bundles", lambda m: m["fusion_bundles"]),
    ("fusion percent", lambda m: f"{100.0 * m['fusion_percent']:.1f}"),
    ("delay mean ms", lambda m: _fmt(m["fusion_delay_ms"], "mean")),
    ("delay p50 ms", lambda m: _fmt(m["fusion_delay_ms"], "p50")),
    ("delay p99 ms", lambda m: _fmt(m["fusion_delay_ms"], "p99")),
    ("delay min ms", lambda m: _fmt(m["fusion_delay_ms"], "min")),
    ("delay max ms", lambda m: _fmt(m["fusion_delay_ms"], "max")),
    ("delay range ms", lambda m: _fmt(m["fusion_delay_ms"], "range")),
    ("d_c object", lambda m: f"{m['detection_completeness']['object_detection']:.3f}"),
    ("d_c lane", lambda m: f"{m['detection_completeness']['lane_detection']:.3f}"),
    ("d_c segmentation", lambda m: f"{m['detection_completeness']['segmentation']:.3f}"),
    ("d_c average", lambda m: f"{m['avg_detection_completeness']:.3f}"),
    ("cost-effectiveness", lambda m: _fmt_ce(m["cost_effectiveness"])),
]


def _fmt(stats, key):
    return f"{stats[key]:.1f}" if stats else "-"


def _fmt_ce(value):
    return f"{value:.4g}" if value is not None else "-"


def cmd_report(args) -> int:
    columns = []
    hashes = set()
    for report_dir in args.report_dirs:
        metrics_path = os.path.join(report_dir, "metrics.json")
        metrics = None
        if os.path.exists(metrics_path) and not args.trace:
            with open(metrics_path, "r", encoding="ascii") as fh:
                metrics = json.load(fh)
            if metrics.get("cost_effectiveness_scale", 1.0) != args.ce_scale:
                metrics = None  # stale cache computed at another scale
        if metrics is None:
            metrics = evaluate_report(report_dir, trace_path=args.trace,
                                      ce_scale=args.ce_scale)
        columns.append((report_dir, metrics))
        hashes.add(metrics.get("trace_sha256"))
    if len(hashes) > 1:
        print("warning: reports were produced from different traces", file=sys.stderr)

    baseline_mean = None
    for _, metrics in columns:
        if metrics["mode"] == "baseline" and metrics["fusion_delay_ms"]:
            baseline_mean = metrics["fusion_delay_ms"]["mean"]
            break

    names = [m["mode"] for _, m in columns]
    width = max(18, *(len(n) + 2 for n in names))
    print(f"{'metric':<22}" + "".join(f"{n:>{width}}" for n in names))
    for label, getter in _REPORT_ROWS:
        cells = [str(getter(m)) for _, m in columns]
        print(f"{label:<22}" + "".join(f"{c:>{width}}" for c in cells))
    speedups = []
    for _, metrics in columns:
        if baseline_mean and metrics["fusion_delay_ms"]:
            speedups.append(f"{baseline_mean / metrics['fusion_delay_ms']['mean']:.1f}x")
        else:
            speedups.append("-")
    print(f"{'speedup vs baseline':<22}" + "".join(f"{s:>{width}}" for s in speedups))

    if args.out:
        payload = {m["mode"]: m for _, m in columns}
        with open(args.out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return EXIT_OK


def _load_grayscale(path: str):
    import numpy as np

    try:
        from PIL import Image

        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.float64)
    except OSError as exc:
        raise InputError(f"cannot read image {path}: {exc}") from exc


def cmd_ssim_check(args) -> int:
    a = make_thumbnail(_load_grayscale(args.image_a))
    b = make_thumbnail(_load_grayscale(args.image_b))
    print(f"{ssim(a, b):.6f}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ppdnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-trace", help="generate a synthetic trace")
    p.add_argument("--scenario", default="downtown",
                   help=f"one of: {', '.join(BUILTIN_SCENARIOS)}")
    p.add_argument("--script", help="scenario script JSON (overrides --scenario)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=None)
    p.add_argument("--duration-s", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("run", help="simulate one mode over a trace")
    p.add_argument("--mode", required=True, choices=sorted(MODES))
    p.add_argument("--trace", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="config file (default: $PPDNN_CONFIG)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="compute metrics for a run directory")
    p.add_argument("report_dir")
    p.add_argument("--trace", help="trace path override")
    p.add_argument("--while-advance", action="store_true",
                   help="let the completeness timestamp index catch up fully")
    p.add_argument("--ce-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="side-by-side table over run directories")
    p.add_argument("report_dirs", nargs="+")
    p.add_argument("--trace", help="trace path override")
    p.add_argument("--ce-scale", type=float, default=1.0)
    p.add_argument("--out", help="also write the table as JSON")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("ssim-check", help="SSIM between two image files")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.set_defaults(func=cmd_ssim_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, TraceFormatError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
