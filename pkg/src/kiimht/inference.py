"""Score both directions of a pair and turn the two scores into a decision."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .common import Direction, InputError, KiimhtError
from .scorers import Method, ScoreConfig, ScoreResult, score


@dataclass
class DirectionDecision:
    decision: Direction
    score_xy: float
    score_yx: float
    method: Method
    seed: int
    result_xy: Optional[ScoreResult] = field(default=None, repr=False)
    result_yx: Optional[ScoreResult] = field(default=None, repr=False)


def decide(score_xy: float, score_yx: float) -> Direction:
    if math.isnan(score_xy) or math.isnan(score_yx):
        raise InputError("cannot decide a direction from NaN scores")
    if score_xy < score_yx:
        return Direction.XtoY
    if score_xy > score_yx:
        return Direction.YtoX
    return Direction.Undecided


def _directional(method, cause, effect, cfg, label):
    try:
        return score(method, cause, effect, cfg)
    except KiimhtError as exc:
        raise type(exc)(f"[{label}] {exc}") from exc


def infer_pair(dataset, method, cfg: ScoreConfig) -> DirectionDecision:
    """Run the scorer as x->y and as y->x and apply the decision rule.

    Both directions use ``cfg.seed``. The y->x call is the x->y call on swapped
    arguments, so swapping the dataset swaps the scores bit for bit.
    """
    method = Method(method)
    res_xy = _directional(method, dataset.x, dataset.y, cfg, "x->y")
    res_yx = _directional(method, dataset.y, dataset.x, cfg, "y->x")
    return DirectionDecision(
        decision=decide(res_xy.value, res_yx.value),
        score_xy=res_xy.value,
        score_yx=res_yx.value,
        method=method,
        seed=cfg.seed,
        result_xy=res_xy,
        result_yx=res_yx,
    )


@dataclass
class AccuracyRecord:
    accuracy: float
    correct: int
    incorrect: int
    undecided: int
    total: int


def evaluate_accuracy(decisions: Sequence, truths: Sequence[Direction],
                      weights: Optional[Sequence[float]] = None) -> AccuracyRecord:
    """Fraction of correct decisions; Undecided always counts as wrong.

    ``decisions`` may hold :class:`DirectionDecision` objects or bare
    :class:`Direction` values. With ``weights`` the accuracy is the weighted
    fraction, the counts stay unweighted.
    """
    if len(decisions) != len(truths):
        raise InputError(f"{len(decisions)} decisions but {len(truths)} truths")
    labels = [Direction(getattr(d, "decision", d)) for d in decisions]
    hits = np.array([lab == Direction(t) for lab, t in zip(labels, truths)], dtype=bool)
    undecided = sum(lab is Direction.Undecided for lab in labels)
    total = len(labels)
    if total == 0:
        acc = float("nan")
    elif weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (total,):
            raise InputError("weights must match the number of decisions")
        acc = float(np.sum(w * hits) / np.sum(w))
    else:
        acc = float(hits.mean())
    correct = int(hits.sum())
    return AccuracyRecord(
        accuracy=acc,
        correct=correct,
        incorrect=total - correct - undecided,
        undecided=undecided,
        total=total,
    )
