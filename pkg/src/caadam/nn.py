"""Dense feed-forward networks with exact backpropagation.

A network is a chain of fully connected layers: ReLU on every hidden layer
and either a linear output (regression) or raw logits consumed by a softmax
cross-entropy loss (classification).  ``forward`` returns the prediction
together with the activation cache that ``backward`` needs to produce
analytic gradients for every weight and bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteError, ShapeError
from .linalg import Matrix, as_matrix, glorot_uniform

REGRESSION = "linear_regression"
CLASSIFICATION = "softmax_classification"

_PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class NetworkSpec:
    """Declarative layer layout: sizes plus activation/head choices."""

    input_dim: int
    hidden_sizes: tuple[int, ...]
    output_dim: int
    hidden_activation: str = "relu"
    output_head: str = REGRESSION

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(self.hidden_sizes))
        sizes = (self.input_dim, *self.hidden_sizes, self.output_dim)
        if any(s < 1 for s in sizes):
            raise ShapeError(f"all layer sizes must be >= 1, got {sizes}")
        if self.hidden_activation != "relu":
            raise ValueError(f"unsupported hidden activation {self.hidden_activation!r}")
        if self.output_head not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unsupported output head {self.output_head!r}")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) of every trainable layer, in forward order."""
        sizes = (self.input_dim, *self.hidden_sizes, self.output_dim)
        return list(zip(sizes[:-1], sizes[1:]))


@dataclass
class Network:
    spec: NetworkSpec
    layers: list[tuple[Matrix, np.ndarray]]  # (weights (fan_in, fan_out), bias (fan_out,))

    def parameters(self) -> list[np.ndarray]:
        """All parameter tensors in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in self.layers:
            out.append(w)
            out.append(b)
        return out

    def copy_weights(self) -> list[tuple[Matrix, np.ndarray]]:
        return [(w.copy(), b.copy()) for w, b in self.layers]

    def set_weights(self, snapshot: list[tuple[Matrix, np.ndarray]]) -> None:
        if len(snapshot) != len(self.layers):
            raise ShapeError("snapshot layer count does not match network")
        self.layers = [(w.copy(), b.copy()) for w, b in snapshot]


@dataclass
class GradientSet:
    """Per-layer (weight gradient, bias gradient), shape-congruent with a Network."""

    layers: list[tuple[Matrix, np.ndarray]]

    def flat(self) -> list[np.ndarray]:
        out = []
        for dw, db in self.layers:
            out.append(dw)
            out.append(db)
        return out


@dataclass
class ForwardCache:
    """Activation record from one forward pass, consumed by ``backward``."""

    batch_rows: int
    inputs: list[Matrix] = field(default_factory=list)  # input to each layer
    pre: list[Matrix] = field(default_factory=list)  # pre-activation of each layer


def init_network(spec: NetworkSpec, rng: np.random.Generator) -> Network:
    """Fresh network: Glorot-uniform weights, zero biases."""
    layers = []
    for fan_in, fan_out in spec.layer_dims:
        w = glorot_uniform(rng, fan_in, fan_out)
        b = np.zeros(fan_out)
        layers.append((w, b))
    return Network(spec=spec, layers=layers)


def forward(net: Network, batch: Matrix) -> tuple[Matrix, ForwardCache]:
    """Run the network on ``batch`` (rows are samples), keeping the cache."""
    x = as_matrix(batch)
    if x.shape[1] != net.spec.input_dim:
        raise ShapeError(
            f"batch has {x.shape[1]} features, network expects {net.spec.input_dim}"
        )
    cache = ForwardCache(batch_rows=x.shape[0])
    h = x
    last = len(net.layers) - 1
    with np.errstate(over="ignore", invalid="ignore"):
        for i, (w, b) in enumerate(net.layers):
            cache.inputs.append(h)
            z = h @ w + b
            cache.pre.append(z)
            h = z if i == last else np.maximum(z, 0.0)
    if not np.isfinite(h).all():
        raise NonFiniteError("forward pass produced non-finite activations")
    return h, cache


def softmax(logits: Matrix) -> Matrix:
    """Row-wise softmax, stabilized by max subtraction."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _class_indices(targets, n_rows: int, n_classes: int) -> np.ndarray:
    idx = np.asarray(targets).reshape(-1)
    if idx.shape[0] != n_rows:
        raise ShapeError(f"expected {n_rows} target rows, got {idx.shape[0]}")
    idx = idx.astype(np.int64)
    if idx.min() < 0 or idx.max() >= n_classes:
        raise ShapeError(
            f"class index out of range [0, {n_classes}): saw {idx.min()}..{idx.max()}"
        )
    return idx


def loss(prediction: Matrix, targets, head: str) -> float:
    """Batch loss: mean squared error, or sparse cross-entropy over logits.

    MSE averages the squared error over every element (batch rows times
    output dims), so its scale does not depend on batch size.  For
    classification ``targets`` holds integer class indices and the
    cross-entropy is the mean over rows of -log(softmax probability of the
    true class), with probabilities floored at 1e-12 inside the log.
    """
    p = as_matrix(prediction)
    if head == REGRESSION:
        y = as_matrix(targets)
        if p.shape != y.shape:
            raise ShapeError(f"prediction {p.shape} vs targets {y.shape}")
        with np.errstate(over="ignore"):
            value = float(np.mean((p - y) ** 2))
    elif head == CLASSIFICATION:
        idx = _class_indices(targets, p.shape[0], p.shape[1])
        probs = softmax(p)
        picked = probs[np.arange(p.shape[0]), idx]
        value = float(-np.mean(np.log(np.maximum(picked, _PROB_FLOOR))))
    else:
        raise ValueError(f"unsupported output head {head!r}")
    if not np.isfinite(value):
        raise NonFiniteError("loss is non-finite")
    return value


def backward(net: Network, cache: ForwardCache, targets) -> GradientSet:
    """Exact gradients of the batch loss for every weight and bias.

    ``cache`` must come from a ``forward`` call on this network; a stale or
    foreign cache is rejected by shape checks.
    """
    n_layers = len(net.layers)
    if len(cache.inputs) != n_layers or len(cache.pre) != n_layers:
        raise ShapeError("cache does not match network layer count")
    for (w, _), h, z in zip(net.layers, cache.inputs, cache.pre):
        if h.shape != (cache.batch_rows, w.shape[0]) or z.shape != (cache.batch_rows, w.shape[1]):
            raise ShapeError("cache shapes do not match network parameters")

    logits = cache.pre[-1]
    n, k = logits.shape
    if net.spec.output_head == REGRESSION:
        y = as_matrix(targets)
        if y.shape != logits.shape:
            raise ShapeError(f"prediction {logits.shape} vs targets {y.shape}")
        dz = 2.0 * (logits - y) / logits.size
    else:
        idx = _class_indices(targets, n, k)
        dz = softmax(logits)
        dz[np.arange(n), idx] -= 1.0
        dz /= n

    grads: list[tuple[Matrix, np.ndarray]] = [None] * n_layers
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_layers - 1, -1, -1):
            h = cache.inputs[i]
            dw = h.T @ dz
            db = dz.sum(axis=0)
            grads[i] = (dw, db)
            if i > 0:
                dh = dz @ net.layers[i][0].T
                dz = dh * (cache.pre[i - 1] > 0.0)
    out = GradientSet(layers=grads)
    for g in out.flat():
        if not np.isfinite(g).all():
            raise NonFiniteError("backward pass produced non-finite gradients")
    return out


def apply_update(net: Network, delta: GradientSet) -> Network:
    """Shift every parameter by the matching entry of ``delta``, in place."""
    if len(delta.layers) != len(net.layers):
        raise ShapeError("update layer count does not match network")
    for (w, b), (dw, db) in zip(net.layers, delta.layers):
        if w.shape != dw.shape or b.shape != db.shape:
            raise ShapeError("update shapes do not match network parameters")
        w += dw
        b += db
    return net
