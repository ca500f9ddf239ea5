# reports.py
"""
CSV / JSON emission for trial records, quantile curves, verdicts and samples.

Every table has a fixed header that is written even when there are no rows.
Floats go out with repr(), the shortest string that parses back to the same
double, so two runs with the same seed produce identical bytes.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, List, Literal, Sequence, Union

import numpy as np

from errors import DomainError
from experiments import BoundVerdict, ProofCheckReport, QuantileCurve, TrialRecord

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "json"]

TRIALS_COLUMNS = ["alpha_mode", "n", "threshold_exponent", "trial_index", "count"]
CURVES_COLUMNS = ["alpha_mode", "n", "threshold_exponent", "scaled", "q25", "q50", "q75"]
VERDICTS_COLUMNS = [
    "alpha_mode", "n", "threshold_exponent", "bound", "k", "epsilon",
    "theoretical_lower_bound", "trials", "successes", "empirical_success_rate",
    "confidence_lower", "rerun", "pass", "resolvable",
]

Cell = Union[str, int, float, bool]


def format_cell(value: Cell) -> str:
    """CSV text for one cell: lowercase booleans, repr() floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def trial_rows(records: Iterable[TrialRecord]) -> List[List[Cell]]:
    rows = []
    for record in sorted(records, key=lambda r: (r.n, r.trial_index)):
        for c in sorted(record.counts):
            rows.append([record.alpha_mode, record.n, c, record.trial_index, record.counts[c]])
    return rows


def curve_rows(curves: Iterable[QuantileCurve]) -> List[List[Cell]]:
    return [
        [curve.alpha_mode, curve.n, curve.threshold_exponent, curve.scaled_by_log_n, curve.q25, curve.q50, curve.q75]
        for curve in curves
    ]


def verdict_rows(verdicts: Iterable[BoundVerdict]) -> List[List[Cell]]:
    return [
        [
            v.alpha_mode,
            v.event.n,
            v.threshold_exponent if v.threshold_exponent is not None else "",
            v.bound_name,
            v.event.k,
            v.event.epsilon,
            v.theoretical_lower_bound,
            v.trials,
            v.successes,
            v.empirical_success_rate,
            v.confidence_lower,
            v.rerun,
            v.passed,
            v.resolvable,
        ]
        for v in verdicts
    ]


def sample_rows(log_points: np.ndarray) -> List[List[Cell]]:
    return [[float(value) for value in row] for row in np.atleast_2d(log_points)]


def sample_columns(n: int) -> List[str]:
    return [f"log_x{i}" for i in range(1, n + 1)]


def write_table(
    directory: Union[str, Path],
    name: str,
    columns: Sequence[str],
    rows: Sequence[Sequence[Cell]],
    output_format: OutputFormat = "csv",
) -> Path:
    """
    Write `rows` under `directory` as `<name>.csv` or `<name>.json`.

    Args:
        directory: Output directory, created if missing
        name: File stem (trials, curves, verdicts, samples)
        columns: Header, one entry per cell in each row
        rows: Table body
        output_format: "csv" or "json" (a list of column -> value objects)

    Returns:
        Path of the written file
    """
    if output_format not in ("csv", "json"):
        raise DomainError(f"Unknown output format '{output_format}', expected csv or json")

    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DomainError(f"Output directory {directory} is not writable: {e}") from e

    path = directory / f"{name}.{output_format}"
    for row in rows:
        if len(row) != len(columns):
            raise DomainError(f"{name}: row has {len(row)} cells, header has {len(columns)}")

    if output_format == "csv":
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
    else:
        objects = [dict(zip(columns, row)) for row in rows]
        path.write_text(json.dumps(objects, indent=2) + "\n", encoding="utf-8")

    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def write_trials(directory, records, output_format: OutputFormat = "csv") -> Path:
    return write_table(directory, "trials", TRIALS_COLUMNS, trial_rows(records), output_format)


def write_curves(directory, curves, output_format: OutputFormat = "csv") -> Path:
    return write_table(directory, "curves", CURVES_COLUMNS, curve_rows(curves), output_format)


def write_verdicts(directory, verdicts, output_format: OutputFormat = "csv") -> Path:
    return write_table(directory, "verdicts", VERDICTS_COLUMNS, verdict_rows(verdicts), output_format)


def write_samples(directory, log_points: np.ndarray, output_format: OutputFormat = "csv") -> Path:
    n = np.atleast_2d(log_points).shape[1]
    return write_table(directory, "samples", sample_columns(n), sample_rows(log_points), output_format)


def write_proof_report(directory, report: ProofCheckReport) -> Path:
    """Full proof-check report as JSON (nested, not tabular)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "proof_checks.json"
    payload = report.model_dump(mode="json")
    payload["all_within_slack"] = report.all_within_slack
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote proof-check report to {path}")
    return path
