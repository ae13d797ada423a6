"""Command-line entry point.

Exit codes are stable: 0 success, 1 validation error, 2 usage error,
3 internal error.  All output is deterministic given the flags; reports go to
stdout unless -o is given, so the tool composes in shell pipelines.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, fusion, oracle
from .errors import HypothesisCapError, InferenceError
from .geometry import FitParams
from .hypotheses import DEFAULT_MAX_HYPOTHESES, count_hypotheses, enumerate_hypotheses
from .report import render_json, render_report
from .scene import load_scene

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _write_out(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _read_scene(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InferenceError(f"cannot read scene file {path}: {exc}") from exc
    return load_scene(text)


def _config_from_args(args) -> fusion.InferenceConfig:
    try:
        return fusion.InferenceConfig(
            mode=args.mode,
            fit_params=FitParams(
                n_samples=args.samples,
                eta=args.eta,
                dim_floor=args.dim_floor,
                master_seed=args.seed,
            ),
            allow_empty_boxes=args.allow_empty_boxes,
            audio_floor=args.audio_floor,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


class _UsageError(Exception):
    pass


def cmd_infer(args) -> int:
    scene = _read_scene(args.scene)
    cfg = _config_from_args(args)
    report = fusion.build_report(scene, cfg, workers=args.workers)
    _write_out(render_report(report), args.output)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.objects < 1 or args.boxes < 1:
        raise _UsageError("--objects and --boxes must be at least 1")
    count = count_hypotheses(args.objects, args.boxes, args.allow_empty)
    if count > DEFAULT_MAX_HYPOTHESES:
        raise HypothesisCapError(
            f"{count} placements for N={args.objects}, K={args.boxes} exceeds the cap of "
            f"{DEFAULT_MAX_HYPOTHESES}"
        )
    lines = [str(count)]
    if args.list_placements:
        hyp = enumerate_hypotheses(args.objects, args.boxes, args.allow_empty)
        lines.extend(",".join(str(b) for b in placement) for placement in hyp)
    _write_out("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _load_report_tables(reports_dir: Path):
    """Group marginal tables from report files by mode, then scenario."""
    tables: dict[str, dict[str, fusion.MarginalTable]] = {}
    paths = sorted(reports_dir.glob("*.json"))
    if not paths:
        raise InferenceError(f"no report files (*.json) in {reports_dir}")
    for path in paths:
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            scenario_id = doc["scenario_id"]
            mode = doc["mode"]
            marg = doc["marginals"]
            objects = tuple(marg.keys())
            boxes = tuple(next(iter(marg.values())).keys())
            values = np.array([[float(marg[o][b]) for b in boxes] for o in objects])
        except (KeyError, ValueError, TypeError, StopIteration, json.JSONDecodeError) as exc:
            raise InferenceError(f"unreadable report file {path}: {exc}") from exc
        by_scenario = tables.setdefault(mode, {})
        if scenario_id in by_scenario:
            raise InferenceError(f"duplicate report for scenario {scenario_id!r}, mode {mode!r} ({path})")
        by_scenario[scenario_id] = fusion.MarginalTable(values=values, objects=objects, boxes=boxes)
    return tables


def cmd_eval(args) -> int:
    reports_dir = Path(args.reports)
    human_path = Path(args.human)
    if not reports_dir.is_dir():
        raise _UsageError(f"--reports {args.reports}: not a directory")
    if not human_path.is_file():
        raise _UsageError(f"--human {args.human}: no such file")

    ratings = evaluation.load_ratings(human_path.read_text(encoding="utf-8"), strict=args.strict)
    tables = _load_report_tables(reports_dir)
    per_mode = [
        evaluation.correlate(
            tables[mode],
            ratings,
            exclusion_threshold=args.exclude_below,
            seed=args.seed,
            n_splits=args.splits,
            per_participant=args.per_participant,
            mode_label=mode,
        )
        for mode in sorted(tables)
    ]
    combined = evaluation.combine_reports(per_mode)
    _write_out(render_json(combined.to_json_dict(include_points=args.points)), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.generate:
        synthetic = oracle.generate_scene(args.seed, args.objects, args.boxes, args.confusion)
        from .scene import serialize_scene

        _write_out(serialize_scene(synthetic.scene), args.output)
        return EXIT_OK
    if not args.scene:
        raise _UsageError("oracle needs --scene PATH (or --generate)")
    scene = _read_scene(args.scene)
    cfg = _config_from_args(args)
    report = oracle.brute_force_report(scene, cfg)
    _write_out(render_report(report), args.output)
    return EXIT_OK


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=fusion.MODES, default=fusion.MODE_FULL, help="inference mode")
    p.add_argument("--seed", type=int, default=0, help="master seed for all dimension draws")
    p.add_argument("--samples", type=int, default=1000, help="Monte Carlo trials per fit estimate")
    p.add_argument("--eta", type=float, default=1.0, help="usable fraction of box volume")
    p.add_argument("--dim-floor", type=float, default=0.1, help=argparse.SUPPRESS)
    p.add_argument("--allow-empty-boxes", action="store_true", help="permit placements leaving boxes empty")
    p.add_argument("--audio-floor", type=float, default=1e-6, help="minimum per-object audio probability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boxinfer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="posterior placement report for a scene document")
    p.add_argument("--scene", required=True, help="scene document path")
    _add_config_flags(p)
    p.add_argument("--workers", type=int, default=1, help="threads for fit evaluation (same output)")
    p.add_argument("-o", "--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("enumerate", help="count (and list) placement hypotheses")
    p.add_argument("--objects", type=int, required=True)
    p.add_argument("--boxes", type=int, required=True)
    p.add_argument("--allow-empty", action="store_true")
    p.add_argument("--list", dest="list_placements", action="store_true", help="print each placement")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("eval", help="correlate model reports with human ratings")
    p.add_argument("--reports", required=True, help="directory of infer report files")
    p.add_argument("--human", required=True, help="ratings table (CSV)")
    p.add_argument("--exclude-below", type=float, default=0.8,
                   help="drop scenarios with split-half agreement below this (<= -1 keeps all)")
    p.add_argument("--splits", type=int, default=100, help="participant bisections per scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true", help="fail on rating-sum violations")
    p.add_argument("--per-participant", action="store_true",
                   help="one point per participant instead of human means")
    p.add_argument("--points", action="store_true", help="include the paired point dump")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="brute-force report for zero-variance scenes, or scene generation")
    p.add_argument("--scene", default=None, help="scene document path (zero stds required)")
    p.add_argument("--generate", action="store_true", help="emit a synthetic scene instead")
    p.add_argument("--objects", type=int, default=3)
    p.add_argument("--boxes", type=int, default=2)
    p.add_argument("--confusion", type=float, default=0.3, help="audio confusion level for --generate")
    _add_config_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed its message
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InferenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
