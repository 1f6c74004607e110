"""
Run reports, metrics CSV files and summary tables.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from ..exceptions import DataError

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ["step", "train_loss", "train_acc", "test_acc", "wall_ms", "clamp_count"]
TABLE_HEADER = "structure | param_count | best_acc(%) | final_acc(%)"
METRICS_FILE = "metrics.csv"
REPORT_FILE = "report.json"


class EvalRecord(BaseModel):
    """One evaluation point of a training run."""
    step: int
    train_loss: float
    train_acc: float
    test_acc: float
    wall_ms: float = 0.0
    clamp_count: int = 0


class RunReport(BaseModel):
    """Outcome of one classification run, with the effective configuration echoed."""
    model: str
    param_count: int
    n_in: int
    n_out: int
    feature_extractor: str = "raw"
    series: List[EvalRecord] = Field(default_factory=list)
    final_acc: float
    best_acc: float
    best_step: int = 0
    max_test_acc: float
    steps_run: int = 0
    stopped_early: bool = False
    initial_clamp_count: int = 0
    config: Dict[str, Any] = Field(default_factory=dict)


class FitReport(BaseModel):
    """Outcome of a regression fit."""
    model: str
    param_count: int
    target: str = "custom"
    seed: int = 0
    series: List[Dict[str, float]] = Field(default_factory=list)
    final_mse: float


def _fmt(value: Union[int, float]) -> str:
    return str(value) if isinstance(value, int) else f"{value:.17g}"


def emit_metrics_csv(report: RunReport, path: Union[str, Path]) -> None:
    """Write the evaluation series with 17 significant digits per float."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(METRICS_COLUMNS)
            for record in report.series:
                writer.writerow([_fmt(getattr(record, column)) for column in METRICS_COLUMNS])
    except OSError as e:
        raise DataError(f"Cannot write metrics to {path}: {e}")


def emit_table(reports: Sequence[RunReport]) -> str:
    """Summary rows in input order, accuracies in percent with two decimals."""
    lines = [TABLE_HEADER]
    for report in reports:
        lines.append(
            f"{report.model} | {report.param_count} | {100.0 * report.best_acc:.2f} | {100.0 * report.final_acc:.2f}"
        )
    return "\n".join(lines) + "\n"


def write_run(report: RunReport, out_dir: Union[str, Path]) -> Path:
    """Store metrics.csv and report.json under out_dir."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        emit_metrics_csv(report, out_dir / METRICS_FILE)
        (out_dir / REPORT_FILE).write_text(report.model_dump_json(indent=2))
    except OSError as e:
        raise DataError(f"Cannot write run outputs to {out_dir}: {e}")
    logger.info(f"Wrote run outputs to {out_dir}")
    return out_dir


def load_report(run_dir: Union[str, Path]) -> RunReport:
    path = Path(run_dir)
    if path.is_dir():
        path = path / REPORT_FILE
    if not path.exists():
        raise DataError(f"No run report at {path}")
    try:
        return RunReport.model_validate_json(path.read_text())
    except ValueError as e:
        raise DataError(f"Run report {path} is unreadable: {e}")


def write_fit(report: FitReport, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2))
    except OSError as e:
        raise DataError(f"Cannot write fit report to {path}: {e}")
