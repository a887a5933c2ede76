"""Closed-loop NN-MRAC simulation of the wrist in each motion direction.

Per sample the reference model is driven toward the commanded deflection,
the tracking error ``e = y_plant - y_ref`` (plus any extra features) is fed
to the trained network, and the network's force is split over the tendon
pair for the requested direction before it reaches the plant.
"""

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import beam
from .errors import DivergenceError, DomainError, ParseError
from .lti import TransferFunction, realize

TRACE_HEADER = ("t", "r", "y_ref", "y_plant", "e", "u_force_N", "tendon1", "tendon2", "tendon4", "tendon5")
TENDONS = (1, 2, 4, 5)
FEATURES = ("e", "y_ref")


class Direction(enum.Enum):
    RADIAL = "radial"
    ULNAR = "ulnar"
    FLEXION = "flexion"
    EXTENSION = "extension"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise DomainError(f"unknown direction {name!r}; expected one of {[d.value for d in cls]}") from None


TENDON_PAIRS = {
    Direction.RADIAL: (1, 2),
    Direction.ULNAR: (4, 5),
    Direction.EXTENSION: (1, 4),
    Direction.FLEXION: (2, 5),
}


@dataclass(frozen=True)
class TendonCommand:
    tendon1: float = 0.0
    tendon2: float = 0.0
    tendon4: float = 0.0
    tendon5: float = 0.0
    slack: bool = False

    def as_tuple(self):
        return (self.tendon1, self.tendon2, self.tendon4, self.tendon5)

    @property
    def total(self):
        return sum(self.as_tuple())


def allocate_tendons(direction, u):
    """Split force ``u`` equally over the direction's tendon pair.

    Tendons cannot push: a negative command produces zero tension and sets
    ``slack``.
    """
    direction = Direction.parse(direction)
    if not math.isfinite(u):
        raise DomainError(f"non-finite force command {u!r}")
    slack = u < 0
    half = max(u, 0.0) / 2.0
    tensions = {f"tendon{i}": (half if i in TENDON_PAIRS[direction] else 0.0) for i in TENDONS}
    return TendonCommand(**tensions, slack=slack)


def reference_for(direction, angle, params):
    """Tip-deflection step (m) for a commanded bending angle (rad).

    Uses the constant-curvature arc R = L / angle and y = R (1 - cos angle).
    Every direction is simulated in its own plane, so the sign is positive.
    """
    Direction.parse(direction)
    if not math.isfinite(angle) or not 0.0 <= angle <= math.pi / 2:
        raise DomainError(f"bending angle must lie in [0, pi/2], got {angle!r}")
    if angle == 0.0:
        return 0.0
    radius = params.length / angle
    return radius * (1.0 - math.cos(angle))


@dataclass
class PlantModel:
    """Beam static gain cascaded with a unit-DC second-order actuator lag."""

    static_gain: float
    zeta: float = 0.7
    omega_n: float = 3.0
    dt: float = 1e-3
    system: object = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.static_gain > 0 and self.zeta > 0 and self.omega_n > 0):
            raise DomainError("plant gain, damping and natural frequency must be > 0")
        wn2 = self.omega_n**2
        tf = TransferFunction((self.static_gain * wn2,), (1.0, 2.0 * self.zeta * self.omega_n, wn2))
        self.system = realize(tf, self.dt)

    @classmethod
    def from_beam(cls, params, zeta=0.7, omega_n=3.0, dt=1e-3):
        return cls(beam.static_gain(params), zeta, omega_n, dt)


@dataclass
class NNController:
    """Trained network plus its normalizer and input-feature ordering."""

    net: object
    normalizer: object
    features: tuple = FEATURES

    def __post_init__(self):
        self.features = tuple(self.features)
        unknown = set(self.features) - set(FEATURES)
        if unknown:
            raise DomainError(f"unknown controller features {sorted(unknown)}; available: {FEATURES}")
        if self.net.n_inputs != len(self.features) or self.net.n_outputs != 1:
            raise DomainError(
                f"network with sizes {self.net.sizes} does not fit {len(self.features)} input feature(s)"
            )

    def _input(self, signals):
        raw = np.array([signals[name] for name in self.features])
        return self.normalizer.normalize_input(raw)

    def force(self, signals):
        x = self._input(signals)
        return float(self.normalizer.inverse_output(self.net.forward(x))[0])

    def adapt(self, signals, e, sensitivity, eta):
        """One gradient step on e^2/2, with d(y_plant)/du approximated by ``sensitivity``."""
        x = self._input(signals)
        du_dp = self.normalizer.output_span[0] * self.net.jacobian(x)[0]
        self.net = self.net.with_params(self.net.params - eta * e * sensitivity * du_dp)


@dataclass
class SimTrace:
    dt: float
    t: np.ndarray
    r: np.ndarray
    y_ref: np.ndarray
    y_plant: np.ndarray
    e: np.ndarray
    u_force: np.ndarray
    tendons: np.ndarray
    direction: object = None
    config_digest: str = ""
    slack: bool = False

    def __post_init__(self):
        n = len(self.t)
        for name in ("r", "y_ref", "y_plant", "e", "u_force"):
            if len(getattr(self, name)) != n:
                raise DomainError(f"trace column {name} has length {len(getattr(self, name))}, expected {n}")
        if self.tendons.shape != (n, len(TENDONS)):
            raise DomainError("tendon array must have one row per sample and four columns")

    @classmethod
    def from_signals(cls, y_plant, y_ref, r, dt=1e-3, direction=None, u_force=None):
        """Build a trace from raw signals (scalars broadcast); t and e are derived."""
        y_plant = np.asarray(y_plant, dtype=float)
        n = len(y_plant)
        y_ref = np.broadcast_to(np.asarray(y_ref, dtype=float), (n,)).copy()
        r = np.broadcast_to(np.asarray(r, dtype=float), (n,)).copy()
        u = np.zeros(n) if u_force is None else np.asarray(u_force, dtype=float)
        return cls(dt=dt, t=np.arange(n) * dt, r=r, y_ref=y_ref, y_plant=y_plant, e=y_plant - y_ref,
                   u_force=u, tendons=np.zeros((n, len(TENDONS))), direction=direction)

    def __len__(self):
        return len(self.t)

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0]) if len(self.t) else 0.0


class _TraceBuilder:
    def __init__(self, dt, direction, digest):
        self.dt, self.direction, self.digest = dt, direction, digest
        self.rows = []
        self.slack = False

    def append(self, t, r, y_ref, y_plant, e, u, cmd):
        self.rows.append((t, r, y_ref, y_plant, e, u) + cmd.as_tuple())
        self.slack = self.slack or cmd.slack

    def build(self):
        data = np.array(self.rows, dtype=float).reshape(-1, len(TRACE_HEADER))
        return SimTrace(dt=self.dt, t=data[:, 0], r=data[:, 1], y_ref=data[:, 2], y_plant=data[:, 3],
                        e=data[:, 4], u_force=data[:, 5], tendons=data[:, 6:], direction=self.direction,
                        config_digest=self.digest, slack=self.slack)


def run_nn_mrac(controller, plant, refmodel, direction, angle, duration, params,
                online=False, eta=0.0, config_digest=""):
    """Simulate the network-controlled loop for one direction.

    ``plant`` is a :class:`PlantModel`, ``refmodel`` an LTISystem. The
    reference model input is scaled by the inverse of its DC gain so its
    output settles at the commanded deflection. With ``online`` enabled the
    controller is fine-tuned every sample (it is copied first, so the caller's
    network is never modified).
    """
    direction = Direction.parse(direction)
    sys_p = plant.system
    if sys_p.dt != refmodel.dt:
        raise DomainError(f"plant and reference model sample periods differ ({sys_p.dt} vs {refmodel.dt})")
    if not duration > 0:
        raise DomainError(f"duration must be > 0, got {duration!r}")
    if online:
        controller = NNController(controller.net.copy(), controller.normalizer, controller.features)
    dt = sys_p.dt
    r = reference_for(direction, angle, params)
    ref_scale = 1.0 / refmodel.dc_gain()
    sys_p.reset()
    refmodel.reset()
    builder = _TraceBuilder(dt, direction, config_digest)
    n_steps = int(round(duration / dt))
    for k in range(n_steps + 1):
        t = k * dt
        y_p = sys_p.output()
        y_ref = refmodel.output()
        e = y_p - y_ref
        signals = {"e": e, "y_ref": y_ref}
        u = controller.force(signals)
        if not (math.isfinite(u) and math.isfinite(y_p) and math.isfinite(y_ref)):
            raise DivergenceError(f"non-finite loop state at t={t:.6g} ({direction.value})",
                                  partial=builder.build() if builder.rows else None)
        cmd = allocate_tendons(direction, u)
        builder.append(t, r, y_ref, y_p, e, u, cmd)
        if k == n_steps:
            break
        if online and eta:
            controller.adapt(signals, e, plant.static_gain, eta)
        sys_p.step(cmd.total)
        refmodel.step(ref_scale * r)
    return builder.build()


def run_all_directions(controller, plant_factory, refmodel_factory, angle, duration, params,
                       directions=tuple(Direction), **kwargs):
    """Run every direction on fresh plant/reference instances.

    Results are keyed by :class:`Direction` in enum order. Errors are re-raised
    with the failing direction named.
    """
    traces = {}
    for direction in directions:
        direction = Direction.parse(direction)
        try:
            traces[direction] = run_nn_mrac(controller, plant_factory(), refmodel_factory(), direction,
                                            angle, duration, params, **kwargs)
        except DivergenceError as exc:
            raise DivergenceError(f"{direction.value}: {exc}", partial=exc.partial) from exc
    return traces


def write_trace(trace, path, comment=None):
    with open(path, "w", newline="") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for k in range(len(trace)):
            row = (trace.t[k], trace.r[k], trace.y_ref[k], trace.y_plant[k], trace.e[k], trace.u_force[k],
                   *trace.tendons[k])
            writer.writerow([repr(float(v)) for v in row])


def read_trace(path):
    """Parse a trace CSV. ``key=value`` pairs on comment lines become metadata."""
    meta = {}
    rows = []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        key, _, value = tok.partition("=")
                        meta[key] = value
                continue
            fields = line.split(",")
            if not header_seen:
                if tuple(fields) != TRACE_HEADER:
                    raise ParseError(f"expected header {','.join(TRACE_HEADER)}", path, lineno)
                header_seen = True
                continue
            if len(fields) != len(TRACE_HEADER):
                raise ParseError(f"expected {len(TRACE_HEADER)} columns, got {len(fields)}", path, lineno)
            try:
                rows.append([float(v) for v in fields])
            except ValueError:
                raise ParseError("non-numeric field", path, lineno) from None
    if not header_seen:
        raise ParseError("missing header", path)
    if not rows:
        raise ParseError("trace has no samples", path)
    data = np.array(rows)
    t = data[:, 0]
    dt = float(meta["dt"]) if "dt" in meta else (float(t[1] - t[0]) if len(t) > 1 else 1.0)
    direction = meta.get("direction")
    return SimTrace(dt=dt, t=t, r=data[:, 1], y_ref=data[:, 2], y_plant=data[:, 3], e=data[:, 4],
                    u_force=data[:, 5], tendons=data[:, 6:], direction=direction,
                    config_digest=meta.get("config_digest", ""))
