"""
Diagnostics output: long-format CSV and whitespace-separated gnuplot tables.
"""

import csv
from pathlib import Path

import numpy as np

from src.numerics.schema import DiagnosticsSeries


def write_csv(series: DiagnosticsSeries, path: Path) -> None:
    """One row per (time, density) with columns time, density_name, value, drift."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["time", "density_name", "value", "drift"])
        for name, values in series.integrals.items():
            for time, value in zip(series.times, values):
                writer.writerow([repr(time), name, repr(value), repr(value - values[0])])


def write_gnuplot(series: DiagnosticsSeries, path: Path) -> None:
    names = list(series.integrals)
    columns = [series.times] + [series.integrals[name] for name in names]
    if series.power:
        columns.append(series.power)
        names.append("power")
    np.savetxt(Path(path), np.column_stack(columns), header=" ".join(["time", *names]), fmt="%.17g")
