"""CSV time-history and JSON report emission."""
from __future__ import annotations

import json

from .integrators import TimeHistory
from .metrics import DiagnosticReport

__all__ = ["write_timehistory", "write_report", "timehistory_header"]

_FMT = "%.17e"


def timehistory_header(history: TimeHistory) -> list[str]:
    cols = (["t"]
            + ["ut%d" % i for i in range(1, 5)]
            + ["vt%d" % i for i in range(1, 5)]
            + ["at%d" % i for i in range(1, 5)]
            + ["lam_y", "lam_z", "lam_thx"])
    for _ in history.probes:
        cols += ["ub_n", "ub_b", "ab_n", "ab_b"]
    return cols


def write_timehistory(history: TimeHistory, out) -> None:
    """Write the run as CSV: header then one full-precision row per step."""
    probe_series = list(history.probes.values())
    with open(out, "w", newline="\n") as f:
        f.write(",".join(timehistory_header(history)) + "\n")
        for i in range(len(history.t)):
            row = [history.t[i]]
            row.extend(history.ut[i])
            row.extend(history.vt[i])
            row.extend(history.at[i])
            row.extend(history.lam[i])
            for series in probe_series:
                row.extend(series[i])
            f.write(",".join(_FMT % x for x in row) + "\n")


def write_report(report: DiagnosticReport, out) -> None:
    """Write the diagnostic report as JSON at full double precision."""
    with open(out, "w") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")
