"""Command-line entry point: generate, label, swap, emit, validate, score.

Data goes to files or stdout; progress and summaries go to stderr. Every
generation command requires an explicit --seed so runs are reproducible.
Exit code is 0 iff no operation error occurred.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dataset as ds
from . import evaluate, grammar, validate
from .errors import TracelabError
from .grid import GridMaze, execute_plan
from .mazegen import GeneratorConfig, GeneratorKind, generate
from .sokoban import SokobanInstance, execute_plan as execute_sokoban_plan, gen_sokoban


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("TRACELAB_JOBS", "1")))
    except ValueError:
        return 1


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _maze_ascii(maze: GridMaze) -> str:
    rows = []
    for y in range(maze.height - 1, -1, -1):  # top row first
        row = []
        for x in range(maze.width):
            c = (x, y)
            if c == maze.start:
                row.append("S")
            elif c == maze.goal:
                row.append("G")
            else:
                row.append("#" if c in maze.walls else ".")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def _sokoban_ascii(instance: SokobanInstance) -> str:
    rows = []
    for y in range(instance.height - 1, -1, -1):
        row = []
        for x in range(instance.width):
            c = (x, y)
            if c in instance.walls:
                row.append("#")
            elif c in instance.boxes_start:
                row.append("*" if c in instance.docks else "$")
            elif c == instance.worker_start:
                row.append("@")
            elif c in instance.docks:
                row.append("o")
            else:
                row.append(".")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def _maze_obj(maze: GridMaze, generator: str) -> dict:
    return {
        "domain": "maze",
        "generator": generator,
        "width": maze.width,
        "height": maze.height,
        "walls": [list(w) for w in sorted(maze.walls, key=lambda c: (c.y, c.x))],
        "start": list(maze.start),
        "goal": list(maze.goal),
    }


def _sokoban_obj(instance: SokobanInstance) -> dict:
    return {
        "domain": "sokoban",
        "generator": "sokoban",
        "width": instance.width,
        "height": instance.height,
        "walls": [list(w) for w in sorted(instance.walls, key=lambda c: (c.y, c.x))],
        "docks": [list(c) for c in instance.docks],
        "boxes_start": [list(c) for c in instance.boxes_start],
        "worker_start": list(instance.worker_start),
    }


def _cmd_gen_maze(args: argparse.Namespace) -> int:
    cfg = GeneratorConfig(
        kind=GeneratorKind(args.generator),
        width=args.width,
        height=args.height,
        seed=args.seed,
        drunkard_floor_fraction=args.drunkard_floor_fraction,
        sf_min_plan_length=args.sf_min_plan_length,
    )
    maze = generate(cfg)
    if args.ascii:
        _write_output(_maze_ascii(maze), args.out)
    else:
        _write_output(
            json.dumps(_maze_obj(maze, args.generator), sort_keys=True) + "\n",
            args.out,
        )
    return 0


def _cmd_gen_sokoban(args: argparse.Namespace) -> int:
    instance = gen_sokoban(args.seed)
    if args.ascii:
        _write_output(_sokoban_ascii(instance), args.out)
    else:
        _write_output(json.dumps(_sokoban_obj(instance), sort_keys=True) + "\n", args.out)
    return 0


def _cmd_build_dataset(args: argparse.Namespace) -> int:
    manifest = ds.build_dataset(
        args.generator,
        args.count,
        args.seed,
        args.out,
        width=args.width,
        height=args.height,
        drunkard_floor_fraction=args.drunkard_floor_fraction,
        sf_min_plan_length=args.sf_min_plan_length,
        jobs=args.jobs,
    )
    _log(f"wrote {manifest.record_count} records to {args.out} "
         f"(digest {manifest.content_digest[:12]})")
    return 0


def _cmd_swap(args: argparse.Namespace) -> int:
    manifest = ds.swap_traces(args.dataset, args.swap_seed, args.out)
    _log(f"wrote {manifest.record_count} swapped records to {args.out} "
         f"(digest {manifest.content_digest[:12]})")
    return 0


def _cmd_emit_text(args: argparse.Namespace) -> int:
    manifest = ds.emit_training_text(args.dataset, args.mode, args.out)
    _log(f"wrote {manifest['record_count']} {args.mode} lines to {args.out}")
    return 0


def _cmd_build_tests(args: argparse.Namespace) -> int:
    manifests = ds.build_test_suite(
        args.seed,
        args.out_dir,
        count=args.count,
        width=args.width,
        height=args.height,
        jobs=args.jobs,
    )
    for kind, manifest in manifests.items():
        _log(f"{kind}: {manifest.record_count} records "
             f"(digest {manifest.content_digest[:12]})")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    records = ds.load_records(args.dataset)
    lines = []
    if args.responses:
        responses = evaluate.load_responses(
            args.responses, {r.id for r in records}
        )
        by_id = {r.id: r for r in records}
        for rid in sorted(responses):
            outcome = validate.classify_response(
                by_id[rid].problem(), grammar.from_line(responses[rid])
            )
            lines.append(json.dumps({
                "id": rid,
                "plan_valid": outcome.plan_valid,
                "trace_valid": outcome.trace_valid,
                "trace_error": outcome.trace_error.value if outcome.trace_error else None,
            }, sort_keys=True))
    else:
        # Self-check: replay each record's own trace and plan.
        for record in records:
            problem = record.problem()
            parsed = grammar.parse_response(
                grammar.from_line(record.trace_text) + grammar.from_line(record.plan_text),
                record.domain,
            )
            if isinstance(problem, SokobanInstance):
                verdict = validate.validate_sokoban_trace(problem, parsed.events)
                plan_ok = execute_sokoban_plan(problem, parsed.plan or ()).valid
            else:
                verdict = validate.validate_trace(problem, parsed.events)
                plan_ok = execute_plan(problem, parsed.plan or ()).valid
            lines.append(json.dumps({
                "id": record.id,
                "plan_valid": plan_ok,
                "trace_valid": verdict.valid,
                "trace_error": verdict.error.kind.value if verdict.error else None,
            }, sort_keys=True))
    _write_output("\n".join(lines) + ("\n" if lines else ""), args.out)
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    report = evaluate.score(args.dataset, args.responses, label=args.label)
    _write_output(evaluate.report_render(report, args.format), args.out)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    merged = evaluate.EvalReport(())
    for path in args.inputs:
        with open(path, encoding="utf-8") as fh:
            merged = merged.merged(evaluate.EvalReport.from_obj(json.load(fh)))
    _write_output(evaluate.report_render(merged, args.format), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracelab",
        description="Verifiable A* search-trace datasets: generate, corrupt, validate, score.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--width", type=int, default=30)
        p.add_argument("--height", type=int, default=30)
        p.add_argument("--drunkard-floor-fraction", type=float, default=0.4)
        p.add_argument("--sf-min-plan-length", type=int, default=8)

    p = sub.add_parser("gen-maze", help="generate a single maze instance")
    p.add_argument("--generator", required=True,
                   choices=[k.value for k in GeneratorKind])
    p.add_argument("--seed", type=int, required=True)
    add_grid_flags(p)
    p.add_argument("--ascii", action="store_true", help="render as text art")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gen_maze)

    p = sub.add_parser("gen-sokoban", help="generate a single Sokoban instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ascii", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gen_sokoban)

    p = sub.add_parser("build-dataset", help="generate and label a dataset")
    p.add_argument("--generator", required=True, choices=list(ds.GENERATORS))
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    add_grid_flags(p)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(fn=_cmd_build_dataset)

    p = sub.add_parser("swap", help="derange traces between records")
    p.add_argument("--dataset", required=True)
    p.add_argument("--swap-seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_swap)

    p = sub.add_parser("emit-text", help="flatten a dataset to token lines")
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", required=True, choices=list(ds.EMIT_MODES))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_emit_text)

    p = sub.add_parser("build-tests", help="build the five-generator test suite")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--width", type=int, default=30)
    p.add_argument("--height", type=int, default=30)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(fn=_cmd_build_tests)

    p = sub.add_parser("validate", help="per-item verdicts for records or responses")
    p.add_argument("--dataset", required=True)
    p.add_argument("--responses", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("score", help="aggregate a response file into a report")
    p.add_argument("--dataset", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--format", default="text-table",
                   choices=["json", "csv", "text-table"])
    p.add_argument("--label", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("report", help="render or merge saved JSON reports")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--format", default="text-table",
                   choices=["json", "csv", "text-table"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_report)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except TracelabError as exc:
        _log(f"error: {exc}")
        return 1
    except OSError as exc:
        _log(f"error: {exc}")
        return 1


def main() -> None:
    sys.exit(run())
