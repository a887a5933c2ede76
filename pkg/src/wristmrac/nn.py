"""Feedforward network controller and its Levenberg-Marquardt trainer.

Parameters are flattened layer by layer: the weight matrix of a layer in
row-major order, then its bias vector. ``Network.params`` and the columns of
``jacobian`` both follow this order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, DomainError, ParseError, TrainingError

ACTIVATIONS = ("sigmoid", "linear")
DEFAULT_LAYERS = (1, 5, 5, 7, 1)


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def n_params(sizes):
    return sum(n_in * n_out + n_out for n_in, n_out in zip(sizes[:-1], sizes[1:]))


@dataclass
class Network:
    """Layer sizes, weights and biases; hidden layers are sigmoid."""

    sizes: tuple
    weights: list
    biases: list
    output_activation: str = "linear"

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            raise DomainError(f"invalid layer sizes {self.sizes}")
        if self.output_activation not in ACTIVATIONS:
            raise DomainError(f"output activation must be one of {ACTIVATIONS}")
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for layer, (n_in, n_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            if self.weights[layer].shape != (n_out, n_in) or self.biases[layer].shape != (n_out,):
                raise DomainError(f"layer {layer} parameters do not match sizes {self.sizes}")

    @classmethod
    def from_params(cls, sizes, params, output_activation="linear"):
        params = np.asarray(params, dtype=float)
        if params.shape != (n_params(sizes),):
            raise DomainError(f"expected {n_params(sizes)} parameters for {tuple(sizes)}, got {params.size}")
        weights, biases, i = [], [], 0
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            weights.append(params[i:i + n_in * n_out].reshape(n_out, n_in))
            i += n_in * n_out
            biases.append(params[i:i + n_out])
            i += n_out
        return cls(sizes, weights, biases, output_activation)

    @classmethod
    def initialize(cls, sizes=DEFAULT_LAYERS, seed=0, output_activation="linear"):
        """Seeded uniform initialization in [-0.5, 0.5]."""
        rng = np.random.default_rng(seed)
        return cls.from_params(sizes, rng.uniform(-0.5, 0.5, n_params(sizes)), output_activation)

    @classmethod
    def zeros(cls, sizes=DEFAULT_LAYERS, output_activation="linear"):
        return cls.from_params(sizes, np.zeros(n_params(sizes)), output_activation)

    @property
    def n_inputs(self):
        return self.sizes[0]

    @property
    def n_outputs(self):
        return self.sizes[-1]

    @property
    def params(self):
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def with_params(self, params):
        return Network.from_params(self.sizes, params, self.output_activation)

    def copy(self):
        return self.with_params(self.params.copy())

    def is_finite(self):
        return bool(np.all(np.isfinite(self.params)))

    def _activations(self, X):
        """Layer activations for a batch; X has shape (n_samples, n_inputs)."""
        a = X.T
        acts = [a]
        last = len(self.weights) - 1
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = w @ a + b[:, None]
            a = z if (layer == last and self.output_activation == "linear") else sigmoid(z)
            acts.append(a)
        return acts

    def _batch(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_inputs:
            raise DomainError(f"expected inputs of length {self.n_inputs}, got shape {np.shape(x)}")
        return X, single

    def forward(self, x):
        """Network output for one input vector or a (n_samples, n_inputs) batch."""
        X, single = self._batch(x)
        out = self._activations(X)[-1].T
        return out[0] if single else out

    __call__ = forward

    def jacobian(self, x):
        """d(output)/d(params) by reverse-mode accumulation.

        For a single input returns shape (n_outputs, n_params); for a batch,
        rows are stacked sample-major to (n_samples * n_outputs, n_params).
        """
        X, single = self._batch(x)
        acts = self._activations(X)
        n = X.shape[0]
        m = self.n_outputs
        out = acts[-1]
        # delta[k, j, s]: d output_k / d pre-activation_j of the current layer, sample s
        delta = np.broadcast_to(np.eye(m)[:, :, None], (m, m, n)).copy()
        if self.output_activation == "sigmoid":
            delta *= (out * (1.0 - out))[None, :, :]
        blocks = []
        for layer in range(len(self.weights) - 1, -1, -1):
            a_prev = acts[layer]
            d_w = delta[:, :, None, :] * a_prev[None, None, :, :]
            blocks.append((d_w.reshape(m, -1, n), delta))
            if layer > 0:
                a = acts[layer]
                delta = np.einsum("ji,kjs->kis", self.weights[layer], delta) * (a * (1.0 - a))[None, :, :]
        cols = [np.concatenate(pair, axis=1) for pair in reversed(blocks)]
        J = np.concatenate(cols, axis=1)  # (m, n_params, n)
        J = J.transpose(2, 0, 1).reshape(n * m, -1)
        return J if not single else J.reshape(m, -1)


@dataclass(frozen=True)
class Normalizer:
    """Per-dimension min-max scaling of inputs and outputs to [0, 1]."""

    in_min: tuple
    in_max: tuple
    out_min: tuple
    out_max: tuple

    def __post_init__(self):
        for name in ("in_min", "in_max", "out_min", "out_max"):
            object.__setattr__(self, name, tuple(float(v) for v in np.atleast_1d(getattr(self, name))))
        for lo, hi in ((self.in_min, self.in_max), (self.out_min, self.out_max)):
            if len(lo) != len(hi):
                raise DomainError("min/max lengths differ")
            if any(not (h > l) for l, h in zip(lo, hi)):
                raise DomainError(f"degenerate normalization range: min={lo}, max={hi}")

    @classmethod
    def fit(cls, inputs, outputs):
        X, Y = _as_columns(inputs), _as_columns(outputs)
        return cls(X.min(axis=0), X.max(axis=0), Y.min(axis=0), Y.max(axis=0))

    @staticmethod
    def _scale(v, lo, hi):
        return (np.asarray(v, dtype=float) - np.asarray(lo)) / (np.asarray(hi) - np.asarray(lo))

    @staticmethod
    def _unscale(v, lo, hi):
        return np.asarray(v, dtype=float) * (np.asarray(hi) - np.asarray(lo)) + np.asarray(lo)

    def normalize_input(self, x):
        return self._scale(x, self.in_min, self.in_max)

    def inverse_input(self, x):
        return self._unscale(x, self.in_min, self.in_max)

    def normalize_output(self, y):
        return self._scale(y, self.out_min, self.out_max)

    def inverse_output(self, y):
        return self._unscale(y, self.out_min, self.out_max)

    @property
    def output_span(self):
        return np.asarray(self.out_max) - np.asarray(self.out_min)

    def to_dict(self):
        return {"in_min": list(self.in_min), "in_max": list(self.in_max),
                "out_min": list(self.out_min), "out_max": list(self.out_max)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["in_min"], d["in_max"], d["out_min"], d["out_max"])


def _as_columns(a):
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


@dataclass(frozen=True)
class TrainingSet:
    inputs: np.ndarray
    targets: np.ndarray
    normalizer: Normalizer

    def __post_init__(self):
        X = _as_columns(self.inputs)
        Y = _as_columns(self.targets)
        if len(X) != len(Y):
            raise DomainError("training set needs equal numbers of inputs and targets")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", Y)

    @classmethod
    def from_raw(cls, inputs, targets):
        X, Y = _as_columns(inputs), _as_columns(targets)
        norm = Normalizer.fit(X, Y)
        return cls(norm.normalize_input(X), norm.normalize_output(Y), norm)

    def __len__(self):
        return len(self.inputs)

    def subset(self, idx):
        return TrainingSet(self.inputs[idx], self.targets[idx], self.normalizer)


@dataclass
class TrainReport:
    epochs: int
    train_sse: float
    val_sse: float
    test_sse: float
    n_train: int
    n_val: int
    n_test: int
    final_lambda: float
    gradient_norm: float
    stop_reason: str
    history: list = field(default_factory=list)

    @property
    def train_mse(self):
        return self.train_sse / max(self.n_train, 1)

    @property
    def val_mse(self):
        return self.val_sse / self.n_val if self.n_val else float("nan")

    @property
    def test_mse(self):
        return self.test_sse / self.n_test if self.n_test else float("nan")


def split_indices(n, val_fraction, test_fraction, seed):
    """Seeded shuffle into (train, validation, test) index arrays."""
    if not (0 <= val_fraction and 0 <= test_fraction and val_fraction + test_fraction < 1):
        raise DomainError("validation and test fractions must be >= 0 and sum to < 1")
    order = np.random.default_rng(seed).permutation(n)
    n_val = int(round(val_fraction * n))
    n_test = int(round(test_fraction * n))
    n_train = n - n_val - n_test
    if n_train < 1:
        raise DomainError("split leaves no training samples")
    return (np.sort(order[:n_train]), np.sort(order[n_train:n_train + n_val]),
            np.sort(order[n_train + n_val:]))


def sse(net, data):
    if len(data) == 0:
        return 0.0
    r = data.targets - net.forward(data.inputs)
    return float(np.sum(r * r))


def lm_step(J, r, lam):
    """Solve (J^T J + lam I) delta = J^T r."""
    JtJ = J.T @ J
    return np.linalg.solve(JtJ + lam * np.eye(JtJ.shape[0]), J.T @ r)


def train_lm(net, data, max_epochs=1000, lambda0=1e-3, lambda_up=10.0, lambda_down=0.1,
             lambda_max=1e10, grad_tol=1e-14, goal_sse=0.0, val_fraction=0.15,
             test_fraction=0.15, seed=0):
    """Levenberg-Marquardt on the sum of squared residuals of the training split.

    Returns ``(trained_network, report)``; ``net`` itself is not modified.
    ``goal_sse`` is compared to the training SSE. ``report.history`` holds the
    training SSE after every accepted step, starting with the initial value.
    """
    if len(data) == 0:
        raise DomainError("empty training set")
    if data.inputs.shape[1] != net.n_inputs or data.targets.shape[1] != net.n_outputs:
        raise DomainError("network dimensions do not match the training set")
    i_tr, i_val, i_te = split_indices(len(data), val_fraction, test_fraction, seed)
    train, val, test = data.subset(i_tr), data.subset(i_val), data.subset(i_te)
    X, Y = train.inputs, train.targets.ravel()

    p = net.params.copy()
    work = net.with_params(p)
    r = Y - work.forward(X).ravel()
    cur = float(r @ r)
    history = [cur]
    lam = lambda0
    epoch = 0
    reason = "max_epochs"
    grad_norm = float("nan")
    while True:
        J = work.jacobian(X)
        g = J.T @ r
        grad_norm = float(np.linalg.norm(g))
        if cur <= goal_sse:
            reason = "goal_sse"
            break
        if grad_norm <= grad_tol:
            reason = "grad_tol"
            break
        if epoch >= max_epochs:
            break
        JtJ = J.T @ J
        eye = np.eye(JtJ.shape[0])
        while True:
            try:
                delta = np.linalg.solve(JtJ + lam * eye, g)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None:
                trial = work.with_params(p + delta)
                r_trial = Y - trial.forward(X).ravel()
                new = float(r_trial @ r_trial)
                if not math.isfinite(new):
                    raise DivergenceError(f"non-finite training loss at epoch {epoch + 1}")
                if new < cur:
                    p, work, r, cur = p + delta, trial, r_trial, new
                    lam *= lambda_down
                    break
            elif lam >= lambda_max:
                raise TrainingError(f"normal matrix singular at lambda={lam:.3g}")
            lam *= lambda_up
            if lam > lambda_max:
                break
        if lam > lambda_max:
            reason = "lambda_max"
            epoch += 1
            break
        epoch += 1
        history.append(cur)

    report = TrainReport(
        epochs=epoch, train_sse=cur, val_sse=sse(work, val), test_sse=sse(work, test),
        n_train=len(train), n_val=len(val), n_test=len(test),
        final_lambda=lam, gradient_norm=grad_norm, stop_reason=reason, history=history,
    )
    return work, report


def evaluate_regression(net, data):
    """Pearson r between predictions and targets, and the mean squared error."""
    if len(data) == 0:
        raise DomainError("empty data")
    pred = net.forward(data.inputs).ravel()
    target = data.targets.ravel()
    if np.std(target) == 0:
        raise DomainError("correlation is undefined for zero-variance targets")
    mse = float(np.mean((pred - target) ** 2))
    if np.std(pred) == 0:
        return {"r_value": 0.0, "mse": mse}
    return {"r_value": float(np.corrcoef(pred, target)[0, 1]), "mse": mse}


def save_weights(net, path, comment=None):
    """Text format: layer sizes, then one parameter per line at repr precision."""
    with open(path, "w") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        fh.write(" ".join(str(s) for s in net.sizes) + "\n")
        for v in net.params:
            fh.write(repr(float(v)) + "\n")


def load_weights(path, output_activation="linear"):
    sizes = None
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if sizes is None:
                try:
                    sizes = tuple(int(tok) for tok in line.split())
                except ValueError:
                    raise ParseError("malformed layer-size header", path, lineno) from None
                if len(sizes) < 2 or min(sizes) < 1:
                    raise ParseError(f"invalid layer sizes {sizes}", path, lineno)
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(f"malformed parameter {line!r}", path, lineno) from None
    if sizes is None:
        raise ParseError("missing layer-size header", path)
    expected = n_params(sizes)
    if len(values) != expected:
        raise ParseError(f"expected {expected} parameters for sizes {sizes}, found {len(values)}", path)
    return Network.from_params(sizes, np.array(values), output_activation)
