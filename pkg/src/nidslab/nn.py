"""Minimal dense feed-forward networks with hand-written gradients.

Everything neural in the toolkit (autoencoders, the MLP detector, the
generator/discriminator pair) runs on this engine: plain matrices, ReLU or
sigmoid activations, stochastic gradient descent. Gradients are exact and
are verified against central finite differences in the test suite.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from .errors import ShapeMismatch

SIGMOID_CLIP = 50.0  # avoids overflow in exp; sigmoid saturates well before


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -SIGMOID_CLIP, SIGMOID_CLIP)))


_ACTS = {
    "relu": (lambda x: np.maximum(x, 0.0), lambda x, y: (x > 0).astype(float)),
    "sigmoid": (_sigmoid, lambda x, y: y * (1.0 - y)),
    "linear": (lambda x: x, lambda x, y: np.ones_like(x)),
}


class DenseNet:
    """Fully connected net; `sizes` includes input and output widths."""

    def __init__(self, sizes: List[int], hidden_activation: str = "relu",
                 output_activation: str = "sigmoid",
                 rng: Optional[np.random.Generator] = None):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if rng is None:
            rng = np.random.default_rng(0)
        self.sizes = list(int(s) for s in sizes)
        self.hidden_activation = hidden_activation
        self.output_activation = output_activation
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes, self.sizes[1:]):
            scale = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def _activation(self, layer: int):
        name = self.output_activation if layer == self.n_layers - 1 else self.hidden_activation
        return _ACTS[name]

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, list]:
        """Returns (output, cache); x is (batch, in) or (in,)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.sizes[0]:
            raise ShapeMismatch(f"input width {x.shape[1]}, expected {self.sizes[0]}")
        cache = [(None, x)]
        h = x
        for layer in range(self.n_layers):
            z = h @ self.weights[layer] + self.biases[layer]
            act, _ = self._activation(layer)
            h = act(z)
            cache.append((z, h))
        return h, cache

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, cache: list, d_out: np.ndarray) -> Tuple[list, np.ndarray]:
        """Backprop d(loss)/d(output) through the cache.

        Returns ([(dW, db) per layer], d(loss)/d(input)).
        """
        grads = [None] * self.n_layers
        delta = np.atleast_2d(d_out)
        for layer in range(self.n_layers - 1, -1, -1):
            z, h = cache[layer + 1]
            _, dact = self._activation(layer)
            delta = delta * dact(z, h)
            h_prev = cache[layer][1]
            grads[layer] = (h_prev.T @ delta, delta.sum(axis=0))
            delta = delta @ self.weights[layer].T
        return grads, delta

    def sgd_step(self, grads: list, lr: float) -> None:
        for layer, (dw, db) in enumerate(grads):
            self.weights[layer] -= lr * dw
            self.biases[layer] -= lr * db

    # -- flat parameter view (finite-difference checks) --------------------
    def get_flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def set_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for layer in range(self.n_layers):
            w, b = self.weights[layer], self.biases[layer]
            self.weights[layer] = flat[pos:pos + w.size].reshape(w.shape).copy()
            pos += w.size
            self.biases[layer] = flat[pos:pos + b.size].copy()
            pos += b.size

    @staticmethod
    def flatten_grads(grads: list) -> np.ndarray:
        parts = []
        for dw, db in grads:
            parts.append(dw.ravel())
            parts.append(db.ravel())
        return np.concatenate(parts)

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes,
            "hidden_activation": self.hidden_activation,
            "output_activation": self.output_activation,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @staticmethod
    def from_dict(obj: dict) -> "DenseNet":
        net = DenseNet(obj["sizes"], obj["hidden_activation"], obj["output_activation"])
        net.weights = [np.asarray(w, dtype=float) for w in obj["weights"]]
        net.biases = [np.asarray(b, dtype=float) for b in obj["biases"]]
        return net


def numeric_gradient(loss_fn, net: DenseNet, eps: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of a scalar loss over the flat parameters."""
    base = net.get_flat()
    grad = np.zeros_like(base)
    for i in range(len(base)):
        bumped = base.copy()
        bumped[i] = base[i] + eps
        net.set_flat(bumped)
        hi = loss_fn()
        bumped[i] = base[i] - eps
        net.set_flat(bumped)
        lo = loss_fn()
        grad[i] = (hi - lo) / (2.0 * eps)
    net.set_flat(base)
    return grad
