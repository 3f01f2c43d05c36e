"""Dense layer primitives with explicit backward rules, the Adam
optimizer, and finite-difference gradient checking.

All matrices are float64 numpy arrays. The backward pass is written
per operation for the fixed network rather than through a general
autodiff tape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mvge.graph import NormalizedAdjacency

LOG_FLOOR = 1e-12


@dataclass
class Param:
    """A trainable matrix paired with its gradient accumulator."""

    value: np.ndarray
    grad: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=np.float64)
        if self.grad is None:
            self.grad = np.zeros_like(self.value)
        if self.grad.shape != self.value.shape:
            raise ValueError("grad shape must match value shape")

    def zero_grad(self) -> None:
        self.grad[...] = 0.0


def child_seed(seed: int, *key: int) -> int:
    """Derive an independent integer seed from a root seed and a key path."""
    return int(np.random.SeedSequence([int(seed), *map(int, key)]).generate_state(1)[0])


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform init in +-sqrt(6 / (fan_in + fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return a @ b


def matmul_backward(d_out: np.ndarray, a: np.ndarray, b: np.ndarray):
    """dA = dC @ B^T, dB = A^T @ dC."""
    return d_out @ b.T, a.T @ d_out


def spmm(s: NormalizedAdjacency, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product Y[v] = sum_u w(v, u) X[u]."""
    if s.matrix.shape[1] != x.shape[0]:
        raise ValueError(f"spmm shape mismatch: {s.matrix.shape} x {x.shape}")
    return s.matrix @ x


def spmm_backward(s: NormalizedAdjacency, d_out: np.ndarray) -> np.ndarray:
    # the operator is symmetric, so S^T dY == S dY
    return s.matrix @ d_out


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(d_out: np.ndarray, x: np.ndarray) -> np.ndarray:
    return d_out * (x > 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction for stability."""
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def concat_cols(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"concat row mismatch: {a.shape} vs {b.shape}")
    return np.concatenate([a, b], axis=1)


def concat_cols_backward(d_out: np.ndarray, cols_a: int):
    return d_out[:, :cols_a], d_out[:, cols_a:]


def softplus(x: np.ndarray) -> np.ndarray:
    """log(1 + exp(x)) computed without overflow."""
    # max(x, 0) + log1p(exp(-|x|)); cheaper than logaddexp on big arrays
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


class Adam:
    """Adam with bias correction; grads are zeroed after each step."""

    def __init__(self, params: dict[str, Param], lr: float = 0.01,
                 beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m = {k: np.zeros_like(p.value) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.value) for k, p in params.items()}

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k, p in self.params.items():
            g = p.grad
            self.m[k] = b1 * self.m[k] + (1.0 - b1) * g
            self.v[k] = b2 * self.v[k] + (1.0 - b2) * g * g
            m_hat = self.m[k] / (1.0 - b1 ** self.t)
            v_hat = self.v[k] / (1.0 - b2 ** self.t)
            p.value -= self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
            p.zero_grad()


def grad_check(
    loss_fn,
    params: dict[str, Param],
    epsilon: float = 1e-5,
    max_entries_per_param: int = 40,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``loss_fn()`` must recompute the loss from the current parameter
    values and leave the full analytic gradient in each param's ``grad``.
    A deterministic sample of entries per parameter is probed; the
    relative error is |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
    """
    rng = np.random.default_rng(seed)
    base = loss_fn()
    if not np.isfinite(base):
        raise FloatingPointError(f"non-finite loss {base!r} in grad_check")
    analytic = {k: p.grad.copy() for k, p in params.items()}
    for p in params.values():
        p.zero_grad()

    worst = 0.0
    for k, p in params.items():
        flat = p.value.reshape(-1)
        n = flat.size
        idx = np.arange(n) if n <= max_entries_per_param else rng.choice(
            n, size=max_entries_per_param, replace=False
        )
        for i in idx:
            orig = flat[i]
            flat[i] = orig + epsilon
            plus = loss_fn()
            flat[i] = orig - epsilon
            minus = loss_fn()
            flat[i] = orig
            for q in params.values():
                q.zero_grad()
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise FloatingPointError("non-finite loss during grad_check probe")
            numeric = (plus - minus) / (2.0 * epsilon)
            a = analytic[k].reshape(-1)[i]
            err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, err)
    loss_fn()  # restore gradient state for the caller
    return worst
