"""Claim reports and their JSON / CSV / markdown documents."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

from condenselab.errors import UsageError
from condenselab.fnrep import Restriction


class ClaimStatus(Enum):
    PASS = "Pass"
    FAIL = "Fail"
    SKIPPED = "Skipped"
    NO_COUNTEREXAMPLE = "NoCounterexample"


EXHAUSTIVE = {"kind": "Exhaustive"}


def sampled_mode(seed: int, trials: int) -> Dict[str, Any]:
    return {"kind": "Sampled", "seed": int(seed), "trials": int(trials)}


def bound_status(holds: bool, mode: Dict[str, Any]) -> ClaimStatus:
    """Sampled checks of universal bounds never report Pass."""
    if not holds:
        return ClaimStatus.FAIL
    if mode.get("kind") == "Sampled":
        return ClaimStatus.NO_COUNTEREXAMPLE
    return ClaimStatus.PASS


@dataclass
class ClaimReport:
    claim_id: str
    statement: str
    params: Dict[str, Any]
    expected: Any
    observed: Any
    status: ClaimStatus
    mode: Dict[str, Any] = field(default_factory=lambda: dict(EXHAUSTIVE))
    runtime_ms: int = 0
    details: Dict[str, Any] = field(default_factory=dict)
    ref: str = ""

    @property
    def sort_key(self) -> tuple:
        return (self.claim_id, json.dumps(to_jsonable(self.params), sort_keys=True))

    def to_dict(self, include_runtime: bool = True) -> Dict[str, Any]:
        data = {
            "claim_id": self.claim_id,
            "ref": self.ref,
            "statement": self.statement,
            "params": self.params,
            "expected": self.expected,
            "observed": self.observed,
            "status": self.status.value,
            "mode": self.mode,
            "details": self.details,
        }
        if include_runtime:
            data["runtime_ms"] = self.runtime_ms
        return to_jsonable(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClaimReport":
        try:
            return cls(
                claim_id=data["claim_id"],
                statement=data["statement"],
                params=dict(data.get("params") or {}),
                expected=data.get("expected"),
                observed=data.get("observed"),
                status=ClaimStatus(data["status"]),
                mode=dict(data.get("mode") or EXHAUSTIVE),
                runtime_ms=int(data.get("runtime_ms", 0)),
                details=dict(data.get("details") or {}),
                ref=str(data.get("ref") or ""),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"malformed report entry: {exc}") from exc


def to_jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Restriction):
        return str(value)
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if hasattr(value, "item"):
        # numpy scalars
        return value.item()
    return value


def sort_reports(reports: Iterable[ClaimReport]) -> List[ClaimReport]:
    return sorted(reports, key=lambda report: report.sort_key)


def overall_exit_code(reports: Sequence[ClaimReport], strict: bool = False) -> int:
    statuses = {report.status for report in reports}
    if ClaimStatus.FAIL in statuses:
        return 1
    if strict and ClaimStatus.SKIPPED in statuses:
        return 3
    return 0


def _flat(value: Any) -> str:
    value = to_jsonable(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    if value is None:
        return ""
    return str(value)


_COLUMNS = ("claim_id", "ref", "statement", "params", "expected", "observed", "status", "mode", "runtime_ms")


def _rows(reports: Sequence[ClaimReport], include_runtime: bool) -> List[List[str]]:
    columns = [c for c in _COLUMNS if include_runtime or c != "runtime_ms"]
    rows = []
    for report in reports:
        data = report.to_dict(include_runtime=include_runtime)
        row = []
        for column in columns:
            if column == "params":
                row.append(";".join(f"{key}={_flat(data['params'][key])}" for key in sorted(data["params"])))
            elif column == "mode":
                row.append(_flat(data["mode"].get("kind")) if len(data["mode"]) == 1 else _flat(data["mode"]))
            else:
                row.append(_flat(data[column]))
        rows.append(row)
    return [columns] + rows


def export(
    reports: Sequence[ClaimReport],
    fmt: str = "json",
    config: Optional[Dict[str, Any]] = None,
    include_runtime: bool = True,
) -> str:
    """Render ``reports`` as a document; JSON keeps everything, CSV/markdown flatten params."""
    ordered = sort_reports(reports)
    if fmt == "json":
        document = {
            "config": to_jsonable(config or {}),
            "reports": [report.to_dict(include_runtime=include_runtime) for report in ordered],
        }
        return json.dumps(document, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(_rows(ordered, include_runtime))
        return buffer.getvalue()
    if fmt == "markdown":
        header, *body = _rows(ordered, include_runtime)
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        for row in body:
            lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unknown export format {fmt!r}; use json, csv or markdown")


def load_reports(text: str) -> List[ClaimReport]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"report document is not valid JSON: {exc}") from exc
    entries = document.get("reports") if isinstance(document, dict) else document
    if not isinstance(entries, list):
        raise UsageError("report document must hold a list of reports")
    return [ClaimReport.from_dict(entry) for entry in entries]
