"""
Benchmark records
CSV persistence and the scaling check over recorded timings
"""
import csv
import logging
import math
from pathlib import Path
from statistics import mean
from typing import Iterable, List, Optional, Union

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "variable", "value", "task", "repeat", "wall_ms", "baseline_ms",
    "result_size", "timeout", "peak_kib", "extension", "error",
]

BASELINE_TASK = "baseline"
TASKS = ("conformance", "obligation", "derivation")

# Timer jitter tolerated when a net time comes out negative
JITTER_MS = 1.0


class BenchRecord(BaseModel):
    """One timed run; baseline rows time policy loading alone"""
    variable: str
    value: int
    task: str = Field(..., description="baseline, conformance, obligation, derivation, or conformance:<kind>")
    repeat: int
    wall_ms: float = Field(..., description="Load plus task time; the timeout for timed-out runs")
    baseline_ms: float = Field(..., description="Load time of the same run")
    result_size: int = Field(default=0, description="Conflicts, obligations or derived terms")
    timeout: bool = False
    peak_kib: Optional[float] = Field(default=None, description="Peak traced memory, when tracked")
    extension: bool = Field(default=False, description="Variable outside the published study")
    error: Optional[str] = Field(default=None, description="Exception of a run that failed")

    @property
    def net_ms(self) -> float:
        return self.wall_ms - self.baseline_ms


def emit_csv(records: Iterable[BenchRecord], path: Union[str, Path]) -> None:
    """Write records with the CSV_COLUMNS header"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow([
                record.variable, record.value, record.task, record.repeat,
                repr(record.wall_ms), repr(record.baseline_ms), record.result_size,
                "true" if record.timeout else "false",
                "" if record.peak_kib is None else repr(record.peak_kib),
                "true" if record.extension else "false",
                record.error or "",
            ])
            rows += 1
    logger.info(f"Wrote {rows} benchmark records to {path}")


def read_csv(path: Union[str, Path]) -> List[BenchRecord]:
    """Parse a file written by emit_csv"""
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        return [
            BenchRecord(
                variable=row["variable"],
                value=int(row["value"]),
                task=row["task"],
                repeat=int(row["repeat"]),
                wall_ms=float(row["wall_ms"]),
                baseline_ms=float(row["baseline_ms"]),
                result_size=int(row["result_size"]),
                timeout=row["timeout"] == "true",
                peak_kib=float(row["peak_kib"]) if row.get("peak_kib") else None,
                extension=row.get("extension") == "true",
                error=row.get("error") or None,
            )
            for row in reader
        ]


class ScalingVerdict(BaseModel):
    variable: str
    task: str
    low_ms: float
    high_ms: float
    ratio: float
    verdict: str = Field(..., description="PASS when ratio <= threshold")


def net_time(records: Iterable[BenchRecord], variable: str, task: str, value: int) -> Optional[float]:
    """
    Mean net reasoning time at one value

    Returns:
        None when no run was recorded, inf when any run timed out or failed
    """
    runs = [r for r in records if r.variable == variable and r.task == task and r.value == value]
    if not runs:
        return None
    if any(r.timeout or r.error for r in runs):
        return math.inf
    for run in runs:
        if run.net_ms < -JITTER_MS:
            logger.warning(f"Negative net time {run.net_ms:.3f}ms for {variable}={value} {task}")
    return mean(max(run.net_ms, 0.0) for run in runs)


def check_scaling(records: Iterable[BenchRecord], variable: str, task: str,
                  low: int = 100, high: int = 1000, threshold: float = 15.0) -> ScalingVerdict:
    """
    Ratio of net times t(high) / t(low)

    Linear growth predicts high/low; the check passes when the ratio stays
    within `threshold`.

    Raises:
        ValueError: records do not cover both values for the pair
    """
    records = list(records)
    low_ms = net_time(records, variable, task, low)
    high_ms = net_time(records, variable, task, high)
    if low_ms is None or high_ms is None:
        raise ValueError(f"records must cover {variable}={low} and {variable}={high} for task {task}")
    ratio = high_ms / max(low_ms, 1e-6)
    verdict = "PASS" if ratio <= threshold else "FAIL"
    logger.info(f"Scaling {variable} {task}: t({high})/t({low}) = {ratio:.2f} -> {verdict}")
    return ScalingVerdict(variable=variable, task=task, low_ms=low_ms, high_ms=high_ms, ratio=ratio, verdict=verdict)
