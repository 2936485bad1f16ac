"""Exceptions, direction labels and array validation shared across the package."""

from __future__ import annotations

import enum

import numpy as np


class KiimhtError(Exception):
    """Base class for every error raised by this package."""


class InputError(KiimhtError, ValueError):
    """Malformed or out-of-contract input."""


class NumericError(KiimhtError, ArithmeticError):
    """A factorization, solve or optimization produced an unusable result."""


class ScorerError(KiimhtError, ValueError):
    """The data cannot be scored (constant variables, too few distinct values)."""


class Direction(str, enum.Enum):
    XtoY = "XtoY"
    YtoX = "YtoX"
    Undecided = "Undecided"

    def mirrored(self) -> "Direction":
        if self is Direction.XtoY:
            return Direction.YtoX
        if self is Direction.YtoX:
            return Direction.XtoY
        return self


def as_samples(a, name: str = "samples") -> np.ndarray:
    """Return `a` as a float64 (n, d) matrix; 1-D input becomes a single column."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 0:
        raise InputError(f"{name}: expected a vector or matrix, got a scalar")
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputError(f"{name}: expected at most 2 dimensions, got {arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"{name}: empty sample matrix")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: non-finite entries")
    return arr
