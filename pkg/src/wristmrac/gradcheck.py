"""Finite-difference check of the network Jacobian.

The reference derivative is a central difference of a separate forward pass
evaluated in extended precision, so rounding in the difference quotient stays
far below the tolerances being tested. Affine networks (no hidden layer,
linear output) are rational in their parameters, so their difference quotient
is evaluated exactly with fractions.
"""

from fractions import Fraction

import numpy as np

from .nn import sigmoid

FD_STEP = 1e-6
REL_FLOOR = 1e-6


def forward_extended(net, params, x):
    """Forward pass of ``net``'s architecture at ``params`` in long double."""
    p = np.asarray(params, dtype=np.longdouble)
    a = np.asarray(x, dtype=np.longdouble)
    i = 0
    n_layers = len(net.sizes) - 1
    for layer, (n_in, n_out) in enumerate(zip(net.sizes[:-1], net.sizes[1:])):
        w = p[i:i + n_in * n_out].reshape(n_out, n_in)
        i += n_in * n_out
        b = p[i:i + n_out]
        i += n_out
        z = w @ a + b
        last = layer == n_layers - 1
        a = z if (last and net.output_activation == "linear") else sigmoid(z)
    return a


def _is_affine(net):
    return len(net.sizes) == 2 and net.output_activation == "linear"


def _affine_fd_jacobian(net, x, h):
    p0 = [Fraction(float(v)) for v in net.params]
    xs = [Fraction(float(v)) for v in np.atleast_1d(x)]
    n_in, n_out = net.sizes
    h = Fraction(h)

    def f(p):
        return [sum(p[o * n_in + i] * xs[i] for i in range(n_in)) + p[n_in * n_out + o] for o in range(n_out)]

    J = np.empty((n_out, len(p0)))
    for j in range(len(p0)):
        plus, minus = list(p0), list(p0)
        plus[j] += h
        minus[j] -= h
        J[:, j] = [float((a - b) / (2 * h)) for a, b in zip(f(plus), f(minus))]
    return J


def finite_difference_jacobian(net, x, h=FD_STEP):
    if _is_affine(net) and net.is_finite() and np.all(np.isfinite(x)):
        return _affine_fd_jacobian(net, x, h)
    p0 = np.asarray(net.params, dtype=np.longdouble)
    J = np.empty((net.n_outputs, p0.size))
    for j in range(p0.size):
        plus, minus = p0.copy(), p0.copy()
        plus[j] += h
        minus[j] -= h
        diff = (forward_extended(net, plus, x) - forward_extended(net, minus, x)) / (plus[j] - minus[j])
        J[:, j] = diff.astype(float)
    return J


def relative_error(J, J_ref, floor=REL_FLOOR):
    """Elementwise |J - J_ref| / max(|J|, |J_ref|, floor), maximised."""
    J = np.asarray(J, dtype=float)
    J_ref = np.asarray(J_ref, dtype=float)
    if not (np.all(np.isfinite(J)) and np.all(np.isfinite(J_ref))):
        return float("inf")
    denom = np.maximum(np.maximum(np.abs(J), np.abs(J_ref)), floor)
    return float(np.max(np.abs(J - J_ref) / denom))


def check(net, inputs, h=FD_STEP):
    """Largest relative Jacobian error over a batch of inputs."""
    worst = 0.0
    for x in np.atleast_2d(inputs):
        worst = max(worst, relative_error(net.jacobian(x), finite_difference_jacobian(net, x, h)))
    return worst
