"""Line-delimited JSON verification reports.

Layout: the first line is a header object (``"type": "header"``), followed by
one ``"type": "trial"`` line per trial in trial-index order. Everything except
the header's ``timing`` entry is deterministic for a fixed configuration and
package version.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ..errors import ReportEmissionError

HEADER_TYPE = "header"
TRIAL_TYPE = "trial"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def aggregate_records(records: list[dict]) -> dict:
    """Aggregate statistics, a pure function of the trial records."""
    residuals = [v for rec in records for v in rec["residuals"].values() if v is not None]
    margins = [rec["margin"] for rec in records if rec["margin"] is not None]
    return {
        "max_residual": max(residuals) if residuals else None,
        "min_margin": min(margins) if margins else None,
        "passed": sum(1 for rec in records if rec["pass"]),
        "total": len(records),
    }


@dataclass
class VerificationReport:
    config: dict
    records: list[dict]
    aggregate: dict
    version: str
    generator_id: str
    started_at: str = ""
    duration_s: float = 0.0

    @property
    def all_passed(self) -> bool:
        return self.aggregate["passed"] == self.aggregate["total"]

    def header(self) -> dict:
        return {
            "type": HEADER_TYPE,
            **self.config,
            "aggregate": self.aggregate,
            "version": self.version,
            "generator_id": self.generator_id,
            "timing": {"started_at": self.started_at, "wall_clock_s": self.duration_s},
        }

    def lines(self) -> list[str]:
        out = [_dumps(self.header())]
        out.extend(_dumps({"type": TRIAL_TYPE, **rec}) for rec in self.records)
        return out

    def deterministic_text(self) -> str:
        """The report without its timing entry, as emitted text."""
        return deterministic_section(self.lines())


def deterministic_section(lines: list[str]) -> str:
    header = json.loads(lines[0])
    header.pop("timing", None)
    return "\n".join([_dumps(header), *lines[1:]]) + "\n"


def emit_report(report: VerificationReport, path) -> Path:
    """Write ``report`` to ``path`` atomically.

    Raises:
        ReportEmissionError: the file could not be written; no partial file
            is left behind.
    """
    path = Path(path)
    tmp = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for line in report.lines():
                fh.write(line + "\n")
        os.replace(tmp, path)
    except (OSError, ValueError) as exc:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise ReportEmissionError(f"could not write report to {path}: {exc}") from exc
    return path


def read_report(path) -> tuple[dict, list[dict]]:
    """Parse an emitted report into ``(header, records)``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("type") != HEADER_TYPE:
        raise ValueError(f"{path} does not start with a report header")
    records = []
    for line in lines[1:]:
        rec = json.loads(line)
        if rec.pop("type", None) != TRIAL_TYPE:
            raise ValueError(f"unexpected line in {path}: {line[:80]}")
        records.append(rec)
    return header, records


def read_deterministic_section(path) -> str:
    return deterministic_section(Path(path).read_text(encoding="utf-8").splitlines())
