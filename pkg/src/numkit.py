"""Dense float64 matrix kernels shared by every other module.

A matrix is a two-dimensional ``numpy.ndarray`` of dtype float64. Kernels never
broadcast: operands with incompatible shapes raise :class:`ShapeError`.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import ShapeError

Matrix = np.ndarray

LEAKY_RELU_SLOPE = 0.2


class Pooled(NamedTuple):
    values: Matrix
    argmax: np.ndarray


def as_matrix(values, *, name: str = "matrix") -> Matrix:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2:
        raise ShapeError(f"{name} must be two-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeError(f"{name} contains non-finite entries")
    return array


def zeros(rows: int, cols: int) -> Matrix:
    return np.zeros((rows, cols), dtype=np.float64)


def frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects matrices, got shapes {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def relu(m: Matrix) -> Matrix:
    return np.maximum(m, 0.0)


def leaky_relu(m: Matrix, slope: float = LEAKY_RELU_SLOPE) -> Matrix:
    return np.where(m > 0.0, m, slope * m)


def row_max_pool(m: Matrix) -> Pooled:
    if m.ndim != 2 or m.shape[0] < 1:
        raise ShapeError(f"row_max_pool needs at least one row, got shape {m.shape}")
    # argmax returns the first maximal row on ties
    argmax = np.argmax(m, axis=0)
    values = m[argmax, np.arange(m.shape[1])].reshape(1, -1)
    return Pooled(values=values, argmax=argmax)


def softmax(logits: Matrix) -> Matrix:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=-1, keepdims=True)


def softmax_cross_entropy(logits: Matrix, label: int) -> tuple[float, Matrix]:
    if logits.ndim != 2 or logits.shape[0] != 1:
        raise ShapeError(f"logits must be a 1xK row, got shape {logits.shape}")
    num_classes = logits.shape[1]
    if num_classes < 2:
        raise ShapeError(f"need at least two classes, got {num_classes}")
    if not 0 <= label < num_classes:
        raise ValueError(f"label {label} out of range for {num_classes} classes")
    shifted = logits - np.max(logits)
    log_norm = np.log(np.sum(np.exp(shifted)))
    loss = float(log_norm - shifted[0, label])
    dlogits = np.exp(shifted - log_norm)
    dlogits[0, label] -= 1.0
    return loss, dlogits


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> Matrix:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def symmetrize(m: Matrix) -> Matrix:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"symmetrize needs a square matrix, got shape {m.shape}")
    out = 0.5 * (m + m.T)
    np.fill_diagonal(out, 0.0)
    return out


def numerical_grad(f: Callable[[Matrix], float], x: Matrix, eps: float = 1e-5) -> Matrix:
    """Central-difference gradient of scalar ``f`` at ``x``; ``x`` is restored afterwards."""
    grad = np.zeros_like(x, dtype=np.float64)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        index = it.multi_index
        original = x[index]
        x[index] = original + eps
        plus = f(x)
        x[index] = original - eps
        minus = f(x)
        x[index] = original
        grad[index] = (plus - minus) / (2.0 * eps)
    return grad


def relative_error(actual: np.ndarray, expected: np.ndarray, atol: float = 1e-8) -> float:
    scale = np.maximum(np.abs(actual), np.abs(expected))
    diff = np.abs(actual - expected)
    mask = diff > atol
    if not np.any(mask):
        return 0.0
    return float(np.max(diff[mask] / scale[mask]))
