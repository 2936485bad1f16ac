"""Empirical conditional mean embeddings and their importance re-weighted form.

For training inputs ``x_1..x_n`` the embedding of ``p(Y | x_i)`` is
represented by coefficients over the effect features ``psi(y_1..y_n)``:

    alpha_i = (K_x + lam*I)^{-1} k_{x_i}
    beta_i  = K_y alpha_i

``beta_i`` is what a projection ``Psi W`` sees, since ``(Psi W)^T Psi alpha_i =
W^T K_y alpha_i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .common import Direction, InputError, as_samples
from .kernels import median_heuristic, regularized_solve


@dataclass(frozen=True)
class EmbeddingSet:
    coeffs: np.ndarray  # column i is beta_i
    alphas: np.ndarray  # column i is alpha_i
    direction_label: Direction = Direction.XtoY

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]


class Reference(str, enum.Enum):
    Gaussian = "Gaussian"
    Laplace = "Laplace"


@dataclass(frozen=True)
class ReweightConfig:
    reference: Reference = Reference.Gaussian
    kde_bandwidth: Union[float, str] = "median-heuristic"
    weight_clip: Tuple[float, float] = (1e-3, 1e3)

    def __post_init__(self):
        object.__setattr__(self, "reference", Reference(self.reference))
        object.__setattr__(self, "weight_clip", tuple(float(w) for w in self.weight_clip))
        w_min, w_max = self.weight_clip
        if not (w_min > 0 and w_max >= w_min):
            raise InputError(f"invalid weight clip {self.weight_clip}")
        bw = self.kde_bandwidth
        if isinstance(bw, str):
            if bw != "median-heuristic":
                raise InputError(f"unknown KDE bandwidth rule {bw!r}")
        elif not bw > 0:
            raise InputError(f"KDE bandwidth must be positive, got {bw}")


def _check_square_pair(K_x, K_y):
    K_x = np.asarray(K_x, dtype=np.float64)
    K_y = np.asarray(K_y, dtype=np.float64)
    if K_x.ndim != 2 or K_x.shape[0] != K_x.shape[1]:
        raise InputError(f"K_x must be square, got {K_x.shape}")
    if K_y.shape != K_x.shape:
        raise InputError(f"K_x and K_y sizes differ: {K_x.shape} vs {K_y.shape}")
    return K_x, K_y


def conditional_embeddings(K_x, K_y, lam: float,
                           direction: Direction = Direction.XtoY) -> EmbeddingSet:
    K_x, K_y = _check_square_pair(K_x, K_y)
    alphas = regularized_solve(K_x, lam, K_x, name="K_x")
    return EmbeddingSet(coeffs=K_y @ alphas, alphas=alphas, direction_label=direction)


def embedding_norm_sq(emb: EmbeddingSet, K_y, i: int) -> float:
    """Squared RKHS norm ``alpha_i^T K_y alpha_i`` of the i-th embedding."""
    n = emb.alphas.shape[1]
    if not 0 <= i < n:
        raise InputError(f"index {i} out of range for {n} embeddings")
    a = emb.alphas[:, i]
    return max(float(a @ np.asarray(K_y) @ a), 0.0)


def embedding_norms_sq(emb: EmbeddingSet, K_y) -> np.ndarray:
    """All squared norms at once, clamped at zero."""
    vals = np.einsum("ai,ai->i", emb.alphas, np.asarray(K_y) @ emb.alphas)
    return np.maximum(vals, 0.0)


def _reference_density(x: np.ndarray, reference: Reference) -> np.ndarray:
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    if reference is Reference.Gaussian:
        z = (x - mu) / sd
        dens = np.exp(-0.5 * z**2) / (np.sqrt(2.0 * np.pi) * sd)
    else:
        scale = sd / np.sqrt(2.0)
        dens = np.exp(-np.abs(x - mu) / scale) / (2.0 * scale)
    return np.prod(dens, axis=1)


def _kde_at_samples(x: np.ndarray, bandwidths: np.ndarray) -> np.ndarray:
    z = (x[:, None, :] - x[None, :, :]) / bandwidths
    per_dim = np.exp(-0.5 * z**2) / (np.sqrt(2.0 * np.pi) * bandwidths)
    return np.prod(per_dim, axis=2).mean(axis=1)


def importance_weights(x_samples, cfg: ReweightConfig) -> np.ndarray:
    """Clipped density ratios ``u(x_i) / p_hat(x_i)``.

    ``u`` is the reference law moment-matched to each column; ``p_hat`` is a
    product Gaussian KDE. Columns are treated as independent in both.
    """
    x = as_samples(x_samples, "x_samples")
    n, d = x.shape
    if n < 2:
        raise InputError("importance weights need at least 2 samples")
    if np.any(x.std(axis=0) == 0):
        raise InputError("importance weights: zero-variance samples")
    if isinstance(cfg.kde_bandwidth, str):
        bw = np.array([median_heuristic(x[:, j]) for j in range(d)]) * n ** (-0.2)
    else:
        bw = np.full(d, float(cfg.kde_bandwidth))
    w = _reference_density(x, cfg.reference) / _kde_at_samples(x, bw)
    w_min, w_max = cfg.weight_clip
    w = np.clip(np.nan_to_num(w, nan=w_min, posinf=w_max), w_min, w_max)
    return w


def reweighted_conditional_embeddings(K_x, K_y, lam: float, weights,
                                      direction: Direction = Direction.XtoY) -> EmbeddingSet:
    """Centered, importance-weighted embeddings.

    ``alpha_i = H R^1/2 (R^1/2 H K_x H R^1/2 + lam*I)^{-1} R^1/2 H k_{x_i}``
    with ``H`` the centering matrix and ``R = diag(weights)``.
    """
    K_x, K_y = _check_square_pair(K_x, K_y)
    n = K_x.shape[0]
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape != (n,):
        raise InputError(f"expected {n} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InputError("weights must be finite and positive")
    r_half = np.sqrt(w)
    H = np.eye(n) - 1.0 / n
    HK = H @ K_x
    inner = r_half[:, None] * (HK @ H) * r_half[None, :]
    inner = 0.5 * (inner + inner.T)
    rhs = r_half[:, None] * HK
    solved = regularized_solve(inner, lam, rhs, name="R^1/2 H K_x H R^1/2")
    alphas = H @ (r_half[:, None] * solved)
    return EmbeddingSet(coeffs=K_y @ alphas, alphas=alphas, direction_label=direction)


def quadratic_featuremap_embedding(samples) -> np.ndarray:
    """Empirical mean of the explicit feature map ``x -> [1, x, x**2]``."""
    s = np.asarray(samples, dtype=np.float64).ravel()
    if s.size == 0:
        raise InputError("quadratic feature map embedding of an empty sample")
    return np.array([1.0, s.mean(), np.mean(s**2)])


def offset_matrix(b: float) -> np.ndarray:
    """Lower-triangular map carrying the quadratic embedding of S to that of S + b."""
    return np.array([[1.0, 0.0, 0.0], [b, 1.0, 0.0], [b * b, 2.0 * b, 1.0]])
