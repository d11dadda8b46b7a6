"""Dense float64 primitives: softmax, least squares, ADAM and a finite-difference oracle.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DegenerateSystemError, NumericDomainError, SizeError

RANK_TOLERANCE = 1e-10


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Return ``x`` as a finite 2-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise SizeError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericDomainError(f"{name} contains non-finite entries")
    return arr


def stable_softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise SizeError("softmax of an empty vector")
    if not np.all(np.isfinite(z)):
        raise NumericDomainError("softmax input contains non-finite values")
    return softmax_rows(z[None, :])[0] if z.ndim == 1 else softmax_rows(z)


def softmax_rows(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax of a 2-D array with max subtraction."""
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def log_softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def least_squares_solve(A, B) -> np.ndarray:
    """Return W minimising ``||A W - B||_F^2`` via the normal equations.

    Raises DegenerateSystemError when A has fewer rows than columns or when
    the ratio of its smallest to largest singular value is below 1e-10.
    """
    A = as_matrix(A, "A")
    B = np.asarray(B, dtype=np.float64)
    if B.ndim == 1:
        B = B[:, None]
    if A.shape[0] != B.shape[0]:
        raise SizeError(f"row mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}")
    n, d = A.shape
    if n < d:
        raise DegenerateSystemError(
            f"under-determined system: {n} rows for {d} unknown columns (rank deficient)"
        )
    sv = np.linalg.svd(A, compute_uv=False)
    ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if ratio < RANK_TOLERANCE:
        raise DegenerateSystemError(
            f"rank-deficient design matrix: singular value ratio {ratio:.3e} < {RANK_TOLERANCE:g}"
        )
    return np.linalg.solve(A.T @ A, A.T @ B)


@dataclass(frozen=True)
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    timestep: int = 0
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def zeros_like(cls, params: np.ndarray, learning_rate: float = 0.001, **kwargs) -> "AdamState":
        return cls(np.zeros_like(params, dtype=np.float64),
                   np.zeros_like(params, dtype=np.float64),
                   0, learning_rate, **kwargs)


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState):
    """One bias-corrected ADAM update. Returns ``(new_params, new_state)``."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.shape or state.first_moment.shape != params.shape:
        raise SizeError(f"shape mismatch: params {params.shape}, grads {grads.shape}, "
                        f"state {state.first_moment.shape}")
    t = state.timestep + 1
    m = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads
    v = state.beta2 * state.second_moment + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new_params = params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return new_params, replace(state, first_moment=m, second_moment=v, timestep=t)


def finite_difference_gradient(f: Callable[[np.ndarray], float], x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of scalar ``f`` at ``x`` (any shape)."""
    if h <= 0:
        raise NumericDomainError("step h must be positive")
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f(x)
        flat[i] = orig - h
        down = f(x)
        flat[i] = orig
        if not (np.isfinite(up) and np.isfinite(down)):
            raise NumericDomainError(f"objective is non-finite near entry {i}")
        gflat[i] = (up - down) / (2.0 * h)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """``||a - b|| / max(||a||, ||b||)``, zero when both vanish."""
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


def cosine_rows(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Cosine between matching rows of X and Y; zero-norm rows give 0."""
    num = np.sum(X * Y, axis=1)
    den = np.linalg.norm(X, axis=1) * np.linalg.norm(Y, axis=1)
    out = np.zeros_like(num)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return np.clip(out, -1.0, 1.0)


def unit_rows(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return X / norms
