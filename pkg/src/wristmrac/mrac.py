"""Conventional MRAC (MIT rule) used to generate controller training data.

The controller is a single adjustable feedforward gain, ``u = theta * r``,
adapted by the MIT gradient rule ``theta' = -gamma * e * y_m`` where the
reference-model output ``y_m`` stands in for the error sensitivity.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, ParseError

DATASET_HEADER = ("t", "r", "y_plant", "y_model", "e", "u_force_N", "theta")


@dataclass(frozen=True)
class MitRuleState:
    theta: float
    gamma: float
    y_m: float = 0.0

    def __post_init__(self):
        if not self.gamma >= 0:
            raise DomainError(f"adaptation gain must be >= 0, got {self.gamma!r}")


@dataclass(frozen=True)
class DatasetRecord:
    t: float
    r: float
    y_plant: float
    y_model: float
    e: float
    u_force_N: float
    theta: float

    def as_row(self):
        return (self.t, self.r, self.y_plant, self.y_model, self.e, self.u_force_N, self.theta)


def mit_update(state, e, y_m, dt):
    """Forward-Euler step of the MIT rule."""
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt!r}")
    theta = state.theta + dt * (-state.gamma * e * y_m)
    if not math.isfinite(theta):
        raise DivergenceError(f"adaptive gain became non-finite (theta={theta!r})")
    return MitRuleState(theta=theta, gamma=state.gamma, y_m=y_m)


def _as_signal(trajectory):
    if callable(trajectory):
        return trajectory
    value = float(trajectory)
    return lambda t: value


def square_wave(amplitude, period, offset=0.0):
    """Square wave starting high: +amplitude for the first half period."""

    def signal(t):
        return offset + (amplitude if (t % period) < period / 2 else -amplitude)

    return signal


def run_mrac(plant, refmodel, trajectory, gamma, duration, theta0=0.0,
             ref_input_scale=1.0, blowup_limit=1e6):
    """Simulate the MIT-rule MRAC loop and record every sample.

    ``trajectory`` is either a constant or a callable ``r(t)``. The reference
    model is driven by ``ref_input_scale * r`` so that a model with non-unit
    DC gain can still be made to settle at ``r``. Records are taken before
    each update, so ``duration / dt + 1`` records are returned with the first
    at t = 0 from rest.
    """
    if plant.dt != refmodel.dt:
        raise DomainError(f"plant and reference model sample periods differ ({plant.dt} vs {refmodel.dt})")
    if not duration > 0:
        raise DomainError(f"duration must be > 0, got {duration!r}")
    dt = plant.dt
    r_of = _as_signal(trajectory)
    plant.reset()
    refmodel.reset()
    state = MitRuleState(theta=float(theta0), gamma=float(gamma))
    n_steps = int(round(duration / dt))
    records = []
    for k in range(n_steps + 1):
        t = k * dt
        r = r_of(t)
        y_p = plant.output()
        y_m = refmodel.output()
        e = y_p - y_m
        u = state.theta * r
        records.append(DatasetRecord(t, r, y_p, y_m, e, u, state.theta))
        if not (abs(e) <= blowup_limit and abs(state.theta) <= blowup_limit):
            raise DivergenceError(
                f"MRAC diverged at t={t:.6g}: |e|={abs(e):.3g}, |theta|={abs(state.theta):.3g}",
                partial=records,
            )
        if k == n_steps:
            break
        try:
            state = mit_update(state, e, y_m, dt)
        except DivergenceError as exc:
            raise DivergenceError(str(exc), partial=records) from None
        plant.step(u)
        refmodel.step(ref_input_scale * r)
    return records


def _fmt(value):
    return repr(float(value))


def export_dataset(records, path, comment=None):
    """Write records as CSV; an optional ``# comment`` line precedes the header."""
    if not records:
        raise DomainError("cannot export an empty dataset")
    with open(path, "w", newline="") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for rec in records:
            writer.writerow([_fmt(v) for v in rec.as_row()])


def read_dataset(path):
    """Read a dataset CSV back into records, skipping ``#`` comment lines."""
    records = []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if not header_seen:
                if tuple(fields) != DATASET_HEADER:
                    raise ParseError(f"expected header {','.join(DATASET_HEADER)}", path, lineno)
                header_seen = True
                continue
            if len(fields) != len(DATASET_HEADER):
                raise ParseError(f"expected {len(DATASET_HEADER)} columns, got {len(fields)}", path, lineno)
            try:
                records.append(DatasetRecord(*(float(v) for v in fields)))
            except ValueError:
                raise ParseError("non-numeric field", path, lineno) from None
    if not header_seen:
        raise ParseError("missing header", path)
    return records


def dataset_arrays(records):
    """Column arrays keyed by the CSV header names."""
    data = np.array([rec.as_row() for rec in records], dtype=float).reshape(-1, len(DATASET_HEADER))
    return {name: data[:, i] for i, name in enumerate(DATASET_HEADER)}
