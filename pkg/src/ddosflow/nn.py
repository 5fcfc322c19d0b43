"""Dense numeric substrate: seeded RNG, activations, losses, Adam, gradient oracle.

Matrices and vectors are plain float64 numpy arrays (row-major). Everything
here is deterministic: the RNG is a counter-based splitmix64 stream, so a
seed fully determines every value ever drawn from it, independent of numpy's
own generator state.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    """splitmix64 output scrambler on uint64 arrays (wraps mod 2**64)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class Rng:
    """Deterministic splitmix64-derived stream.

    The i-th raw output is mix(seed + (i+1) * golden), so draws can be
    vectorized and the stream position is a plain integer counter. Identical
    seeds always yield identical streams.
    """

    algorithm = "splitmix64"

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._counter = 0

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        return _mix(np.uint64(self.seed) + idx * _GOLDEN)

    def uniform(self, size=None) -> np.ndarray | float:
        """Uniform float64 in [0, 1)."""
        if size is None:
            return float(self._raw(1)[0] >> np.uint64(11)) * 2.0**-53
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        out = (self._raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return out.reshape(shape)

    def normal(self, size=None) -> np.ndarray | float:
        """Standard normals via Box-Muller on stream pairs."""
        shape = (1,) if size is None else ((size,) if isinstance(size, int) else tuple(size))
        n = int(np.prod(shape)) if shape else 1
        pairs = (n + 1) // 2
        bits = self._raw(2 * pairs)
        u1 = ((bits[:pairs] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (bits[pairs:] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * math.pi) * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return float(z[0]) if size is None else z.reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) via stable key sort."""
        return np.argsort(self._raw(n), kind="stable")

    def integers(self, n: int, high: int) -> np.ndarray:
        """n integers in [0, high), uniform up to negligible modulo bias."""
        return (self._raw(n) % np.uint64(high)).astype(np.int64)

    def child(self, key: int) -> "Rng":
        """Independent stream derived from (seed, key); ignores stream position."""
        k = np.uint64((int(key) + 1) & 0xFFFFFFFFFFFFFFFF)
        derived = _mix(np.array([np.uint64(self.seed) ^ (k * _GOLDEN)], dtype=np.uint64))
        return Rng(int(derived[0]))


# ---------------------------------------------------------------------------
# activations


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_grad(x: np.ndarray) -> np.ndarray:
    # subgradient at exactly 0 is defined as 0
    return (x > 0.0).astype(np.float64)


def tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def tanh_grad(x: np.ndarray) -> np.ndarray:
    t = np.tanh(x)
    return 1.0 - t * t


ACTIVATIONS = {
    "relu": (relu, relu_grad),
    "tanh": (tanh, tanh_grad),
}


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """Stable softmax (max subtraction); rows sum to 1 within 1e-12."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


PROB_FLOOR = 1e-12


def categorical_crossentropy(probs: np.ndarray, onehot: np.ndarray) -> float:
    """-sum(onehot * log(probs)) with probs floored at 1e-12 before the log."""
    probs = np.asarray(probs, dtype=np.float64)
    onehot = np.asarray(onehot, dtype=np.float64)
    if probs.shape != onehot.shape:
        raise ValueError(f"shape mismatch: probs {probs.shape} vs onehot {onehot.shape}")
    return float(-np.sum(onehot * np.log(np.maximum(probs, PROB_FLOOR))))


def mse(x: np.ndarray, x_hat: np.ndarray) -> float:
    """Mean squared difference over all entries."""
    x = np.asarray(x, dtype=np.float64)
    x_hat = np.asarray(x_hat, dtype=np.float64)
    if x.shape != x_hat.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x_hat.shape}")
    d = x - x_hat
    return float(np.mean(d * d))


# ---------------------------------------------------------------------------
# Adam


@dataclass
class AdamState:
    """First/second moment accumulators keyed like the parameter dict."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    skipped: int = 0  # blocks skipped so far due to non-finite gradients

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], beta1: float = 0.9,
                   beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            beta1=beta1, beta2=beta2, epsilon=epsilon,
        )


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, lr: float) -> tuple[dict[str, np.ndarray], AdamState]:
    """One Adam update with bias correction. Pure: returns fresh params and state.

    Blocks whose gradient contains non-finite values are reported via a warning
    and skipped (parameters and moments untouched for that block).
    """
    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    t = state.step_count + 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    skipped = state.skipped
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape mismatch for {name}: {g.shape} vs {p.shape}")
        if not np.all(np.isfinite(g)):
            warnings.warn(f"non-finite gradient for block {name}; update skipped")
            skipped += 1
            new_params[name] = p.copy()
            new_m[name] = state.m[name].copy()
            new_v[name] = state.v[name].copy()
            continue
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * (g * g)
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(m=new_m, v=new_v, step_count=t, beta1=b1, beta2=b2,
                                 epsilon=eps, skipped=skipped)


# ---------------------------------------------------------------------------
# verification oracle and init


def finite_diff_grad(f, params: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function, one coordinate at a time."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    params = np.asarray(params, dtype=np.float64)
    grad = np.zeros_like(params)
    flat = params.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = f(params)
        flat[i] = orig - eps
        f_minus = f(params)
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2.0 * eps)
    return grad


def init_weights(shape, rng: Rng, scheme: str = "glorot_uniform") -> np.ndarray:
    """Seeded initializer. Glorot-uniform bounds use sqrt(6 / (fan_in + fan_out))."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    if scheme == "zeros":
        return np.zeros(shape, dtype=np.float64)
    if scheme == "glorot_uniform":
        if len(shape) >= 2:
            fan_in, fan_out = shape[0], shape[1]
        else:
            fan_in = fan_out = shape[0]
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return (rng.uniform(shape) * 2.0 - 1.0) * limit
    raise ValueError(f"unknown init scheme: {scheme}")


def global_norm(grads: dict[str, np.ndarray]) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    return math.sqrt(total)


def clip_by_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads
    scale = max_norm / norm
    return {k: g * scale for k, g in grads.items()}
