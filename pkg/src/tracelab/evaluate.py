"""Scoring model responses against test datasets.

Produces the plan-validity x trace-validity confusion matrix per test set,
the plan validity rate, the trace-validity rate conditioned on plan-valid
responses (rendered as "Trace Val."), and a histogram of first trace
violations by error class. Unparseable responses count as (plan invalid,
trace invalid) and are also reported separately.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .dataset import DatasetRecord, load_records
from .errors import InputError
from .grammar import from_line
from .validate import TraceErrorClass, classify_response

ERROR_CLASSES = tuple(cls.value for cls in TraceErrorClass)


@dataclass(frozen=True)
class SetReport:
    """Scores for one test set (one dataset file)."""

    label: str
    # matrix[plan_valid][trace_valid], indexed False=0 / True=1
    matrix: tuple[tuple[int, int], tuple[int, int]]
    error_histogram: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.matrix[0]) + sum(self.matrix[1])

    @property
    def plan_valid_count(self) -> int:
        return sum(self.matrix[1])

    @property
    def plan_validity(self) -> Optional[float]:
        return self.plan_valid_count / self.total if self.total else None

    @property
    def conditional_trace_validity(self) -> Optional[float]:
        """Trace validity within plan-valid responses; None when undefined."""
        if self.plan_valid_count == 0:
            return None
        return self.matrix[1][1] / self.plan_valid_count

    @property
    def parse_failures(self) -> int:
        return self.error_histogram.get(TraceErrorClass.PARSING_ERROR.value, 0)

    def to_obj(self) -> dict:
        return {
            "label": self.label,
            "matrix": [list(self.matrix[0]), list(self.matrix[1])],
            "total": self.total,
            "plan_validity": self.plan_validity,
            "conditional_trace_validity": self.conditional_trace_validity,
            "parse_failures": self.parse_failures,
            "error_histogram": dict(self.error_histogram),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SetReport":
        matrix = (
            (int(obj["matrix"][0][0]), int(obj["matrix"][0][1])),
            (int(obj["matrix"][1][0]), int(obj["matrix"][1][1])),
        )
        return cls(
            label=obj["label"],
            matrix=matrix,
            error_histogram={k: int(v) for k, v in obj["error_histogram"].items()},
        )


@dataclass(frozen=True)
class EvalReport:
    sets: tuple[SetReport, ...]

    def to_obj(self) -> dict:
        return {"sets": [s.to_obj() for s in self.sets]}

    @classmethod
    def from_obj(cls, obj: dict) -> "EvalReport":
        return cls(tuple(SetReport.from_obj(s) for s in obj["sets"]))

    def merged(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(self.sets + other.sets)


def load_responses(path: Union[str, Path], known_ids: set[int]) -> dict[int, str]:
    """Read a {id, response_text} JSON-lines file; all input problems are
    reported together before giving up."""
    responses: dict[int, str] = {}
    issues = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rid = int(obj["id"])
                text = str(obj["response_text"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                issues.append(f"{path}:{lineno}: unreadable response ({exc})")
                continue
            if rid in responses:
                issues.append(f"{path}:{lineno}: duplicate id {rid}")
                continue
            if rid not in known_ids:
                issues.append(f"{path}:{lineno}: unknown id {rid}")
                continue
            responses[rid] = text
    if issues:
        raise InputError("\n".join(issues))
    return responses


def score_records(
    records: Sequence[DatasetRecord],
    responses: dict[int, str],
    label: Optional[str] = None,
) -> SetReport:
    """Classify each response against its own problem and aggregate counts.

    Aggregation is a commutative merge, so the result is independent of
    response order.
    """
    by_id = {record.id: record for record in records}
    matrix = [[0, 0], [0, 0]]
    histogram = {name: 0 for name in ERROR_CLASSES}
    for rid, text in responses.items():
        record = by_id[rid]
        outcome = classify_response(record.problem(), from_line(text))
        matrix[int(outcome.plan_valid)][int(outcome.trace_valid)] += 1
        if outcome.trace_error is not None:
            histogram[outcome.trace_error.value] += 1
    if label is None:
        kinds = {record.generator for record in records}
        label = kinds.pop() if len(kinds) == 1 else "mixed"
    return SetReport(
        label=label,
        matrix=(tuple(matrix[0]), tuple(matrix[1])),
        error_histogram=histogram,
    )


def score(
    dataset_path: Union[str, Path],
    responses_path: Union[str, Path],
    label: Optional[str] = None,
) -> EvalReport:
    records = load_records(dataset_path)
    responses = load_responses(responses_path, {r.id for r in records})
    return EvalReport((score_records(records, responses, label=label),))


# -- rendering ----------------------------------------------------------------


def _fmt_rate(rate: Optional[float]) -> str:
    return "n/a" if rate is None else f"{100.0 * rate:.1f}%"


def render_json(report: EvalReport) -> str:
    return json.dumps(report.to_obj(), indent=2, sort_keys=True) + "\n"


def render_csv(report: EvalReport) -> str:
    out = io.StringIO()
    header = [
        "label", "responses", "plan_validity", "conditional_trace_validity",
        "pp_tt", "pp_tf", "pf_tt", "pf_tf", "parse_failures",
    ] + list(ERROR_CLASSES)
    out.write(",".join(header) + "\n")
    for s in report.sets:
        row = [
            s.label,
            str(s.total),
            "" if s.plan_validity is None else f"{s.plan_validity:.6f}",
            ""
            if s.conditional_trace_validity is None
            else f"{s.conditional_trace_validity:.6f}",
            str(s.matrix[1][1]),
            str(s.matrix[1][0]),
            str(s.matrix[0][1]),
            str(s.matrix[0][0]),
            str(s.parse_failures),
        ] + [str(s.error_histogram.get(name, 0)) for name in ERROR_CLASSES]
        out.write(",".join(row) + "\n")
    return out.getvalue()


def render_table(report: EvalReport) -> str:
    """Rows are test sets, columns plan validity and conditional trace
    validity; the raw confusion counts ride along."""
    rows = [
        (
            s.label,
            str(s.total),
            _fmt_rate(s.plan_validity),
            _fmt_rate(s.conditional_trace_validity),
            f"[[{s.matrix[0][0]},{s.matrix[0][1]}],[{s.matrix[1][0]},{s.matrix[1][1]}]]",
        )
        for s in report.sets
    ]
    header = ("Test Set", "N", "Plan Val.", "Trace Val.", "Matrix [plan][trace]")
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def report_render(report: EvalReport, fmt: str = "text-table") -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "text-table":
        return render_table(report)
    raise InputError(f"unknown report format {fmt!r}")
