"""Input-dependent projection network, the pairwise deviance loss, and Adam.

The network maps an input ``x`` (length d) to an ``n x r`` projection matrix

    W(x) = reshape(W2^T relu(W1^T x + b1) + b2, (n, r))      # row-major

and the loss over training inputs with embedding coefficients ``beta_i`` is

    sum_{i>j} ||W(x_i)^T beta_i - W(x_j)^T beta_j||^2 + (lam_reg/n) sum_i 1/||W(x_i)||_F^2

Evaluating it never materializes the ``n x n x r`` stack of matrices. With
``h_i = [relu(W1^T x_i + b1), 1]`` and ``V = [W2; b2]`` viewed as an
``(h+1, n, r)`` tensor, ``W(x_i)^T beta_i = sum_k h_i[k] V[k]^T beta_i`` and
``||W(x_i)||_F^2 = h_i^T (V V^T) h_i``, so the cost is two matmuls of size
``(h+1) r x n x n`` per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Tuple

import numpy as np

from .common import InputError, NumericError, as_samples
from .embeddings import EmbeddingSet

PARAM_NAMES = ("W1", "b1", "W2", "b2")


@dataclass(frozen=True)
class ProjectionNetwork:
    W1: np.ndarray  # (d, h)
    b1: np.ndarray  # (h,)
    W2: np.ndarray  # (h, r*n)
    b2: np.ndarray  # (r*n,)
    n: int
    r: int

    @property
    def d(self) -> int:
        return self.W1.shape[0]

    @property
    def h(self) -> int:
        return self.W1.shape[1]

    def params(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_params(self, **params) -> "ProjectionNetwork":
        return replace(self, **params)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.params().values())


@dataclass(frozen=True)
class LossConfig:
    """Training hyperparameters for the projection network."""

    lambda_reg: float = 1e-3
    iterations: int = 100
    hidden: int = 20
    rank: int = 100
    learning_rate: float = 1e-3
    # multiply the pair sum by 2/(n(n-1)); off by default, ordering is unaffected
    normalize_pairs: bool = False

    def __post_init__(self):
        if not self.lambda_reg > 0:
            raise InputError(f"lambda_reg must be positive, got {self.lambda_reg}")
        if self.iterations < 1:
            raise InputError(f"iterations must be >= 1, got {self.iterations}")
        if self.hidden < 1 or self.rank < 1:
            raise InputError("hidden and rank must be positive")
        if not self.learning_rate > 0:
            raise InputError(f"learning_rate must be positive, got {self.learning_rate}")


@dataclass
class AdamState:
    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, net: ProjectionNetwork, lr: float = 1e-3) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in net.params().items()},
            v={k: np.zeros_like(p) for k, p in net.params().items()},
            lr=lr,
        )


def init_network(d: int, h: int, r: int, n: int, seed: int) -> ProjectionNetwork:
    """Every weight and bias uniform in +-1/sqrt(fan_in) of its layer.

    Zero-mean output weights matter: a positive output bias makes every
    projection share one large common component, which swamps the pairwise
    differences the loss is meant to compare.
    """
    if min(d, h, r, n) < 1:
        raise InputError("network dimensions must be positive")
    rng = np.random.default_rng(seed)
    lim1 = 1.0 / np.sqrt(d)
    lim2 = 1.0 / np.sqrt(h)
    return ProjectionNetwork(
        W1=rng.uniform(-lim1, lim1, size=(d, h)),
        b1=rng.uniform(-lim1, lim1, size=h),
        W2=rng.uniform(-lim2, lim2, size=(h, r * n)),
        b2=rng.uniform(-lim2, lim2, size=r * n),
        n=n,
        r=r,
    )


def forward(net: ProjectionNetwork, x) -> np.ndarray:
    """Projection matrix ``W(x)`` of shape (n, r) for a single input."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (net.d,):
        raise InputError(f"input has shape {x.shape}, network expects ({net.d},)")
    hidden = np.maximum(x @ net.W1 + net.b1, 0.0)
    return (hidden @ net.W2 + net.b2).reshape(net.n, net.r)


@dataclass
class LossParts:
    total: float
    pairwise: float
    regularizer: float
    grad: Dict[str, np.ndarray] = field(default_factory=dict)


def _check_inputs(net: ProjectionNetwork, emb: EmbeddingSet, x_samples) -> Tuple[np.ndarray, np.ndarray]:
    if not net.is_finite():
        raise NumericError("projection network has non-finite parameters")
    beta = np.asarray(emb.coeffs, dtype=np.float64)
    x = as_samples(x_samples, "x_samples")
    n = net.n
    if beta.shape != (n, n):
        raise InputError(f"embedding coefficients have shape {beta.shape}, network expects ({n}, {n})")
    if x.shape != (n, net.d):
        raise InputError(f"x_samples has shape {x.shape}, network expects ({n}, {net.d})")
    return beta, x


def evaluate(net: ProjectionNetwork, emb: EmbeddingSet, cfg: LossConfig, x_samples,
             with_grad: bool = True) -> LossParts:
    """Loss value split into its two terms, plus the gradient if requested.

    A zero-norm projection makes the regularizer infinite; the total is then
    ``inf`` and the zero-norm samples contribute nothing to the gradient.
    """
    beta, x = _check_inputs(net, emb, x_samples)
    n, r, h = net.n, net.r, net.h

    pre = x @ net.W1 + net.b1
    hid = np.empty((n, h + 1))
    hid[:, :h] = np.maximum(pre, 0.0)
    hid[:, h] = 1.0
    V = np.vstack([net.W2, net.b2[None, :]])  # (h+1, n*r)
    V3 = V.reshape(h + 1, n, r)

    # G[k, c, i] = sum_a V3[k, a, c] beta[a, i]
    G = (V3.transpose(0, 2, 1).reshape((h + 1) * r, n) @ beta).reshape(h + 1, r, n)
    proj = np.einsum("ik,kci->ic", hid, G)
    centered = proj - proj.mean(axis=0)
    scale = 2.0 / (n * (n - 1)) if cfg.normalize_pairs else 1.0
    pairwise = scale * n * float(np.sum(centered**2))

    Q = V @ V.T
    Qh = hid @ Q
    norms = np.einsum("ik,ik->i", hid, Qh)
    ok = norms > 0
    coef = cfg.lambda_reg / n
    if np.all(ok):
        regularizer = coef * float(np.sum(1.0 / norms))
    else:
        regularizer = float("inf")
    total = pairwise + regularizer
    if np.isnan(total):
        raise NumericError("loss evaluated to NaN")
    parts = LossParts(total=total, pairwise=pairwise, regularizer=regularizer)
    if not with_grad:
        return parts

    g_proj = (2.0 * n * scale) * centered  # (n, r)
    d_hid = np.einsum("kci,ic->ik", G, g_proj)
    M = (hid[:, :, None] * g_proj[:, None, :]).reshape(n, (h + 1) * r)
    dV = (beta @ M).reshape(n, h + 1, r).transpose(1, 0, 2).reshape(h + 1, n * r)

    d_norm = np.zeros(n)
    d_norm[ok] = -coef / norms[ok] ** 2
    d_hid += 2.0 * d_norm[:, None] * Qh
    dQ = hid.T @ (d_norm[:, None] * hid)
    dV += 2.0 * (dQ @ V)

    d_pre = d_hid[:, :h] * (pre > 0)
    parts.grad = {
        "W1": x.T @ d_pre,
        "b1": d_pre.sum(axis=0),
        "W2": dV[:h],
        "b2": dV[h],
    }
    return parts


def loss(net: ProjectionNetwork, embeddings: EmbeddingSet, cfg: LossConfig, x_samples) -> float:
    return evaluate(net, embeddings, cfg, x_samples, with_grad=False).total


def loss_grad(net: ProjectionNetwork, embeddings: EmbeddingSet, cfg: LossConfig,
              x_samples) -> Tuple[float, ProjectionNetwork]:
    """Loss and its gradient, packed in a network-shaped container."""
    parts = evaluate(net, embeddings, cfg, x_samples)
    return parts.total, net.with_params(**parts.grad)


def adam_step(net: ProjectionNetwork, grad: ProjectionNetwork,
              state: AdamState) -> Tuple[ProjectionNetwork, AdamState]:
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    new_params, m_new, v_new = {}, {}, {}
    for name, p in net.params().items():
        g = getattr(grad, name)
        if g.shape != p.shape:
            raise InputError(f"gradient for {name} has shape {g.shape}, expected {p.shape}")
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        new_params[name] = p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        m_new[name], v_new[name] = m, v
    new_state = replace(state, m=m_new, v=v_new, t=t)
    return net.with_params(**new_params), new_state
