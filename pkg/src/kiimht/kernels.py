"""Kernel evaluations, gram matrices, bandwidth selection and ridge solves.

Three stationary kernels are supported:

* RBF, ``sf**2 * exp(-d2 / (2 * ls**2))``
* rational quadratic with unit scale, ``1 - d2 / (d2 + 1)``
* their pointwise product (the default everywhere in the package)

where ``d2`` is the squared Euclidean distance. Distances are always computed
from explicit differences in float64, so gram matrices are exactly symmetric
with an exact unit diagonal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.spatial.distance import pdist

from .common import InputError, NumericError, as_samples


class KernelFamily(str, enum.Enum):
    RBF = "RBF"
    RQ = "RQ"
    ProductRbfRq = "ProductRbfRq"


@dataclass(frozen=True)
class KernelConfig:
    """Kernel hyperparameters.

    ``length_scale=None`` means "pick it with :func:`median_heuristic` on
    whatever points the gram matrix is built from".
    """

    family: KernelFamily = KernelFamily.ProductRbfRq
    length_scale: Optional[float] = None
    amplitude: float = 1.0
    reg: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if self.length_scale is not None and not self.length_scale > 0:
            raise InputError(f"length_scale must be positive, got {self.length_scale}")
        if not self.amplitude > 0:
            raise InputError(f"amplitude must be positive, got {self.amplitude}")
        if not self.reg >= 0:
            raise InputError(f"reg must be nonnegative, got {self.reg}")


def _sq_dist(x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise InputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(diff @ diff)


def rbf_eval(x, y, length_scale: float, amplitude: float = 1.0) -> float:
    return amplitude**2 * np.exp(-_sq_dist(x, y) / (2.0 * length_scale**2))


def rq_eval(x, y) -> float:
    d2 = _sq_dist(x, y)
    return 1.0 - d2 / (d2 + 1.0)


def product_eval(x, y, config: KernelConfig) -> float:
    if config.family is not KernelFamily.ProductRbfRq:
        raise InputError(f"product_eval needs the ProductRbfRq family, got {config.family.value}")
    if config.length_scale is None:
        raise InputError("product_eval needs an explicit length_scale")
    return rbf_eval(x, y, config.length_scale, config.amplitude) * rq_eval(x, y)


def kernel_eval(x, y, config: KernelConfig) -> float:
    """Evaluate the kernel selected by ``config.family`` at one pair of points."""
    if config.family is KernelFamily.RQ:
        return rq_eval(x, y)
    if config.length_scale is None:
        raise InputError("kernel_eval needs an explicit length_scale")
    if config.family is KernelFamily.RBF:
        return rbf_eval(x, y, config.length_scale, config.amplitude)
    return product_eval(x, y, config)


def pairwise_sq_dists(points) -> np.ndarray:
    """Dense (n, n) matrix of squared Euclidean distances."""
    p = as_samples(points, "points")
    diff = p[:, None, :] - p[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def median_heuristic(points) -> float:
    """Median of all pairwise Euclidean distances.

    On heavily tied data (more than half the pairs coincide) the plain median
    is zero; the median over the strictly positive distances is used instead.
    """
    p = as_samples(points, "points")
    if p.shape[0] < 2:
        raise InputError("median heuristic needs at least 2 points")
    dists = pdist(p)
    med = float(np.median(dists))
    if med > 0:
        return med
    positive = dists[dists > 0]
    if positive.size == 0:
        raise InputError("median heuristic: all points are identical (zero bandwidth)")
    return float(np.median(positive))


def gram(points, config: KernelConfig) -> np.ndarray:
    """Gram matrix ``K[i, j] = k(p_i, p_j)`` for the configured kernel family."""
    p = as_samples(points, "points")
    d2 = pairwise_sq_dists(p)
    family = config.family
    if family is KernelFamily.RQ:
        return 1.0 - d2 / (d2 + 1.0)
    ls = config.length_scale
    if ls is None:
        ls = median_heuristic(p) if p.shape[0] > 1 else 1.0
    K = config.amplitude**2 * np.exp(-d2 / (2.0 * ls**2))
    if family is KernelFamily.ProductRbfRq:
        K = K * (1.0 - d2 / (d2 + 1.0))
    return K


def regularized_solve(K, lam: float, B, name: str = "K") -> np.ndarray:
    """Solve ``(K + lam*I) X = B`` with a Cholesky factorization.

    Raises :class:`NumericError` when ``K + lam*I`` is not numerically
    positive definite.
    """
    K = np.asarray(K, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InputError(f"{name} must be square, got shape {K.shape}")
    if B.shape[0] != K.shape[0]:
        raise InputError(f"right-hand side has {B.shape[0]} rows, {name} has {K.shape[0]}")
    if lam < 0:
        raise InputError(f"regularization must be nonnegative, got {lam}")
    A = K + lam * np.eye(K.shape[0])
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(
            f"Cholesky factorization of {name} + {lam:g}*I failed; "
            f"increase the regularization ({exc})"
        ) from exc
    return linalg.cho_solve(factor, B, check_finite=False)
