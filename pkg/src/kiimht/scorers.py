"""Direction scores. Each maps (cause candidate, effect candidate) to a real
number; the lower one of the two directions is taken as causal."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

import numpy as np
from scipy import linalg

from .common import InputError, NumericError, ScorerError, as_samples
from .embeddings import (
    EmbeddingSet,
    ReweightConfig,
    conditional_embeddings,
    embedding_norms_sq,
    importance_weights,
    reweighted_conditional_embeddings,
)
from .kernels import KernelConfig, gram, median_heuristic
from .projection import AdamState, LossConfig, adam_step, evaluate, init_network


class Method(str, enum.Enum):
    KIIM_HT = "KIIM_HT"
    KCDC = "KCDC"
    KIIM = "KIIM"
    IGCI = "IGCI"


class IgciReference(str, enum.Enum):
    Uniform = "Uniform"
    Gaussian = "Gaussian"


@dataclass(frozen=True)
class ScoreConfig:
    kernel: KernelConfig = field(default_factory=KernelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    reweight: Optional[ReweightConfig] = None
    kiim_rank: int = 10  # clipped to n at scoring time
    igci_reference: IgciReference = IgciReference.Uniform
    seed: int = 0
    kcdc_n_lambda: bool = False

    def __post_init__(self):
        object.__setattr__(self, "igci_reference", IgciReference(self.igci_reference))
        if self.kiim_rank < 1:
            raise InputError(f"kiim_rank must be positive, got {self.kiim_rank}")

    def with_seed(self, seed: int) -> "ScoreConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=_jsonable))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class ScoreResult:
    value: float
    iterations_run: int = 0
    best_iteration: int = 0
    trace: List[float] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def _validate_pair(cause, effect):
    x = as_samples(cause, "cause")
    y = as_samples(effect, "effect")
    if x.shape[0] != y.shape[0]:
        raise InputError(f"cause has {x.shape[0]} samples, effect has {y.shape[0]}")
    if x.shape[0] < 2:
        raise ScorerError("at least 2 samples are required")
    for name, arr in (("cause", x), ("effect", y)):
        if np.any(np.ptp(arr, axis=0) == 0):
            raise ScorerError(f"{name} has a constant column; direction is not identifiable")
    return x, y


def _grams(x: np.ndarray, y: np.ndarray, kernel: KernelConfig):
    """Gram matrices with bandwidths chosen per variable."""
    kx = kernel if kernel.length_scale is not None else replace(kernel, length_scale=median_heuristic(x))
    ky = kernel if kernel.length_scale is not None else replace(kernel, length_scale=median_heuristic(y))
    return gram(x, kx), gram(y, ky)


def _embeddings(x, K_x, K_y, cfg: ScoreConfig) -> EmbeddingSet:
    lam = cfg.kernel.reg
    if cfg.reweight is not None:
        weights = importance_weights(x, cfg.reweight)
        return reweighted_conditional_embeddings(K_x, K_y, lam, weights)
    return conditional_embeddings(K_x, K_y, lam)


def optimize_projection(emb: EmbeddingSet, x_inputs, loss_cfg: LossConfig, seed: int) -> ScoreResult:
    """Run Adam on the pairwise loss; the score is the lowest loss seen.

    The trace holds the loss before every step plus the final one, so it has
    ``iterations + 1`` entries. Non-finite losses are never taken as best.
    """
    x = as_samples(x_inputs, "x_inputs")
    n, d = x.shape
    net = init_network(d, loss_cfg.hidden, loss_cfg.rank, n, seed)
    state = AdamState.zeros_like(net, lr=loss_cfg.learning_rate)
    trace: List[float] = []
    best, best_it, best_pair = float("inf"), -1, float("nan")
    for it in range(loss_cfg.iterations + 1):
        parts = evaluate(net, emb, loss_cfg, x, with_grad=it < loss_cfg.iterations)
        trace.append(parts.total)
        if np.isfinite(parts.total) and parts.total < best:
            best, best_it, best_pair = parts.total, it, parts.pairwise
        if it < loss_cfg.iterations:
            grad = net.with_params(**parts.grad)
            net, state = adam_step(net, grad, state)
            if not net.is_finite():
                raise NumericError(f"projection network diverged at step {it + 1}")
    if best_it < 0:
        raise NumericError("every loss evaluation was non-finite (zero-norm projections)")
    return ScoreResult(
        value=best,
        iterations_run=loss_cfg.iterations,
        best_iteration=best_it,
        trace=trace,
        diagnostics={"pairwise_at_best": best_pair},
    )


def kiim_ht_score(cause, effect, cfg: ScoreConfig) -> ScoreResult:
    x, y = _validate_pair(cause, effect)
    K_x, K_y = _grams(x, y, cfg.kernel)
    emb = _embeddings(x, K_x, K_y, cfg)
    return optimize_projection(emb, x, cfg.loss, cfg.seed)


def kcdc_from_embeddings(emb: EmbeddingSet, K_y) -> float:
    """Variance of the conditional embedding norms."""
    norms = np.sqrt(embedding_norms_sq(emb, K_y))
    return float(np.mean((norms - norms.mean()) ** 2))


def kcdc_score(cause, effect, cfg: ScoreConfig) -> ScoreResult:
    x, y = _validate_pair(cause, effect)
    K_x, K_y = _grams(x, y, cfg.kernel)
    lam = cfg.kernel.reg * (x.shape[0] if cfg.kcdc_n_lambda else 1)
    emb = conditional_embeddings(K_x, K_y, lam)
    return ScoreResult(value=kcdc_from_embeddings(emb, K_y))


def kiim_from_embeddings(emb: EmbeddingSet, K_y, rank: int, jitter: float) -> float:
    """Sum of the ``rank`` smallest eigenvalues of ``(K_y C K_y) v = mu (K_y + jitter I) v``.

    ``C`` is the scatter of the embedding coefficients around their mean; this
    is the minimum of the global-projection deviance over ``B`` with
    ``B^T (K_y + jitter I) B = I``.
    """
    K_y = np.asarray(K_y, dtype=np.float64)
    n = K_y.shape[0]
    rank = min(rank, n)
    centered = emb.alphas - emb.alphas.mean(axis=1, keepdims=True)
    S = K_y @ centered
    a = S @ S.T
    b = K_y + jitter * np.eye(n)
    try:
        evals = linalg.eigh(0.5 * (a + a.T), b, eigvals_only=True, subset_by_index=[0, rank - 1])
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"generalized eigenproblem failed: {exc}") from exc
    return float(np.sum(np.maximum(evals, 0.0)))


def kiim_score(cause, effect, cfg: ScoreConfig) -> ScoreResult:
    x, y = _validate_pair(cause, effect)
    K_x, K_y = _grams(x, y, cfg.kernel)
    emb = _embeddings(x, K_x, K_y, cfg)
    jitter = max(cfg.kernel.reg, 1e-10)
    return ScoreResult(value=kiim_from_embeddings(emb, K_y, cfg.kiim_rank, jitter))


def _normalize(v: np.ndarray, reference: IgciReference) -> np.ndarray:
    if reference is IgciReference.Uniform:
        return (v - v.min()) / (v.max() - v.min())
    return (v - v.mean()) / v.std()


def igci_slope(cause_1d: np.ndarray, effect_1d: np.ndarray, reference: IgciReference) -> float:
    """Slope-based IGCI estimate for one pair of columns."""
    n = cause_1d.shape[0]
    if np.unique(cause_1d).size < 2:
        raise ScorerError("IGCI needs at least 2 distinct cause values")
    if np.ptp(effect_1d) == 0:
        raise ScorerError("IGCI: effect is constant")
    c = _normalize(cause_1d, reference)
    e = _normalize(effect_1d, reference)
    order = np.argsort(c, kind="stable")
    dc = np.diff(c[order])
    de = np.diff(e[order])
    keep = (dc != 0) & (de != 0)
    return float(np.sum(np.log(np.abs(de[keep] / dc[keep]))) / (n - 1))


def igci_score(cause, effect, cfg: ScoreConfig) -> ScoreResult:
    x, y = _validate_pair(cause, effect)
    if x.shape[1] != y.shape[1]:
        raise ScorerError(
            f"IGCI pairs dimensions one-to-one; got {x.shape[1]} cause and {y.shape[1]} effect dims"
        )
    total = sum(igci_slope(x[:, j], y[:, j], cfg.igci_reference) for j in range(x.shape[1]))
    return ScoreResult(value=float(total))


_DISPATCH = {
    Method.KIIM_HT: kiim_ht_score,
    Method.KCDC: kcdc_score,
    Method.KIIM: kiim_score,
    Method.IGCI: igci_score,
}


def score(method, cause, effect, cfg: ScoreConfig) -> ScoreResult:
    try:
        method = Method(method)
    except ValueError:
        raise InputError(f"unknown method {method!r}") from None
    return _DISPATCH[method](cause, effect, cfg)
