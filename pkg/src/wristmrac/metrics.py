"""Tracking metrics for simulated step responses."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    settling_time: float  # inf when the response never settles
    steady_state_error: float
    band_fraction: float
    window: float

    @property
    def settled(self):
        return math.isfinite(self.settling_time)


def rmse(trace):
    """Root mean square of y_plant - y_ref over all samples."""
    if len(trace) == 0:
        raise DomainError("RMSE of an empty trace")
    err = np.asarray(trace.y_plant) - np.asarray(trace.y_ref)
    return float(np.sqrt(np.mean(err * err)))


def settling_time(trace, band=0.02):
    """Earliest time after which y_plant stays within ``band * |r_final|`` of r_final.

    Returns ``math.inf`` if the final sample is still outside the band.
    """
    if len(trace) == 0:
        raise DomainError("settling time of an empty trace")
    r_final = float(trace.r[-1])
    if r_final == 0.0:
        raise DomainError("settling band is undefined for a zero final reference")
    outside = np.abs(np.asarray(trace.y_plant) - r_final) > band * abs(r_final)
    if not outside.any():
        return float(trace.t[0])
    last_out = int(np.flatnonzero(outside)[-1])
    if last_out == len(trace) - 1:
        return math.inf
    return float(trace.t[last_out + 1])


def steady_state_error(trace, window=1.0):
    """|mean(y_plant - r_final)| over the last ``window`` seconds."""
    if len(trace) == 0 or not window < trace.duration:
        raise DomainError(f"window ({window} s) must be shorter than the trace ({trace.duration} s)")
    n = max(int(round(window / trace.dt)), 1)
    tail = np.asarray(trace.y_plant[-n:]) - float(trace.r[-1])
    return float(abs(np.mean(tail)))


def evaluate(trace, band=0.02, window=1.0):
    return MetricsReport(
        rmse=rmse(trace),
        settling_time=settling_time(trace, band),
        steady_state_error=steady_state_error(trace, window),
        band_fraction=band,
        window=window,
    )


def average(reports):
    """Mean of each metric over several reports (the 'average' row)."""
    reports = list(reports)
    if not reports:
        raise DomainError("no reports to average")
    return MetricsReport(
        rmse=float(np.mean([m.rmse for m in reports])),
        settling_time=float(np.mean([m.settling_time for m in reports])),
        steady_state_error=float(np.mean([m.steady_state_error for m in reports])),
        band_fraction=reports[0].band_fraction,
        window=reports[0].window,
    )
