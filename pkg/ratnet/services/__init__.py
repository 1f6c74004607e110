"""
Services for ratnet: objectives, optimization, Padé oracle, data and experiment running.
"""

from .optim import Adam, EarlyStopController, Decision
from .training import Trainer, run_experiment, fit_function
from .reports import RunReport, FitReport, EvalRecord, emit_metrics_csv, emit_table

__all__ = ["Adam", "EarlyStopController", "Decision", "Trainer", "run_experiment", "fit_function", "RunReport", "FitReport", "EvalRecord", "emit_metrics_csv", "emit_table"]
