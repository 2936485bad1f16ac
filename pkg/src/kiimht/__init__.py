"""Bivariate causal direction inference with kernel deviance scores.

The main entry points are :func:`infer_pair` (score both directions and
decide) and :func:`score` (a single directional score).
"""

__version__ = "0.1.0"

from .common import Direction, InputError, KiimhtError, NumericError, ScorerError
from .datagen import PairDataset
from .inference import DirectionDecision, decide, evaluate_accuracy, infer_pair
from .scorers import Method, ScoreConfig, ScoreResult, score

__all__ = [
    "Direction",
    "DirectionDecision",
    "InputError",
    "KiimhtError",
    "Method",
    "NumericError",
    "PairDataset",
    "ScoreConfig",
    "ScoreResult",
    "ScorerError",
    "decide",
    "evaluate_accuracy",
    "infer_pair",
    "score",
]
