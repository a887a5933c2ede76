"""SISO transfer functions, state-space realization and RK4 simulation."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SimulationError, UnsupportedCaseError

# Second-order reference dynamics of the wrist, T(s) = -4 / (s^2 + 3 s + 5).
REFERENCE_NUM = (-4.0,)
REFERENCE_DEN = (1.0, 3.0, 5.0)


@dataclass(frozen=True)
class TransferFunction:
    """Rational transfer function, coefficients in descending powers of s."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num = tuple(float(c) for c in np.trim_zeros(np.atleast_1d(np.asarray(self.num, float)), "f")) or (0.0,)
        den = tuple(float(c) for c in np.atleast_1d(np.asarray(self.den, float)))
        if not den or den[0] == 0.0:
            raise DomainError("denominator leading coefficient must be nonzero")
        if not all(math.isfinite(c) for c in num + den):
            raise DomainError("transfer function coefficients must be finite")
        if len(num) > len(den):
            raise DomainError("transfer function is improper (numerator degree exceeds denominator degree)")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def order(self):
        return len(self.den) - 1

    def __call__(self, s):
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def dc_gain(self):
        return self.num[-1] / self.den[-1]


def reference_transfer_function():
    return TransferFunction(REFERENCE_NUM, REFERENCE_DEN)


def rk4_step(f, x, dt):
    """One classical fourth-order Runge-Kutta step of x' = f(x)."""
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class LTISystem:
    """Continuous-time SISO state-space model advanced with fixed-step RK4.

    The input is held constant across each step. For linear dynamics the RK4
    update is itself linear, ``x+ = Phi x + Gamma u``, so both matrices are
    formed once at construction.
    """

    def __init__(self, A, B, C, D, dt):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        n = A.shape[0]
        B = np.asarray(B, dtype=float).reshape(n)
        C = np.asarray(C, dtype=float).reshape(n)
        if A.shape != (n, n):
            raise DomainError(f"state matrix must be square, got {A.shape}")
        if not dt > 0:
            raise DomainError(f"sample period must be > 0, got {dt!r}")
        self.A, self.B, self.C, self.D = A, B, C, float(D)
        self.dt = float(dt)
        hA = self.dt * A
        eye = np.eye(n)
        hA2 = hA @ hA
        hA3 = hA2 @ hA
        self._phi = eye + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 @ hA / 24.0
        self._gamma = self.dt * (eye + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) @ B
        self.x = np.zeros(n)

    @property
    def order(self):
        return self.A.shape[0]

    def reset(self):
        self.x = np.zeros(self.order)

    def output(self, u=0.0):
        return float(self.C @ self.x + self.D * u)

    def output_rate(self):
        """dy/dt of the strictly proper part at the current state (zero input)."""
        return float(self.C @ (self.A @ self.x))

    def derivative(self, x, u):
        return self.A @ x + self.B * u

    def step(self, u):
        """Advance one sample period under input ``u``; returns the new output."""
        u = float(u)
        if not math.isfinite(u):
            raise SimulationError(f"non-finite input {u!r}")
        self.x = self._phi @ self.x + self._gamma * u
        return self.output(u)

    def simulate(self, u):
        """Outputs after each of ``len(u)`` steps, starting from the current state."""
        return np.array([self.step(uk) for uk in u])

    def dc_gain(self):
        return float(self.D - self.C @ np.linalg.solve(self.A, self.B))

    def transfer_function_at(self, s):
        n = self.order
        return complex(self.C @ np.linalg.solve(s * np.eye(n) - self.A, self.B) + self.D)


def realize(tf, dt):
    """Controllable canonical realization of ``tf`` with zero initial state."""
    den = np.asarray(tf.den) / tf.den[0]
    n = len(den) - 1
    num = np.zeros(n + 1)
    num[n + 1 - len(tf.num):] = np.asarray(tf.num) / tf.den[0]
    if n == 0:
        return LTISystem(np.zeros((0, 0)), np.zeros(0), np.zeros(0), num[0], dt)
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[1:][::-1]
    B = np.zeros(n)
    B[-1] = 1.0
    D = num[0]
    C = (num[1:] - D * den[1:])[::-1]
    return LTISystem(A, B, C, D, dt)


def second_order_parameters(tf):
    """(gain, zeta, omega_n) of ``k wn^2 / (s^2 + 2 zeta wn s + wn^2)``."""
    if tf.order != 2 or len(tf.num) != 1:
        raise UnsupportedCaseError("expected a second-order transfer function without zeros")
    _, a1, a0 = (c / tf.den[0] for c in tf.den)
    if a0 <= 0:
        raise UnsupportedCaseError("second-order system is not stable")
    wn = math.sqrt(a0)
    return tf.dc_gain(), a1 / (2.0 * wn), wn


def analytic_step_response(tf, t):
    """Closed-form unit-step response of an underdamped second-order system."""
    k, zeta, wn = second_order_parameters(tf)
    if not 0.0 < zeta < 1.0:
        raise UnsupportedCaseError(f"only underdamped systems are supported (zeta={zeta:.4g})")
    wd = wn * math.sqrt(1.0 - zeta**2)
    sigma = zeta * wn
    t = np.asarray(t, dtype=float)
    y = k * (1.0 - np.exp(-sigma * t) * (np.cos(wd * t) + sigma / wd * np.sin(wd * t)))
    return float(y) if y.ndim == 0 else y


def step_response(sys, duration, amplitude=1.0):
    """Sampled step response from rest: returns (t, y) including t = 0."""
    sys.reset()
    n = int(round(duration / sys.dt))
    t = np.arange(n + 1) * sys.dt
    y = np.empty(n + 1)
    y[0] = sys.output(amplitude)
    for k in range(1, n + 1):
        y[k] = sys.step(amplitude)
    return t, y
