"""Synthetic cause-effect pairs.

Causes are standard normal. Noise is standard normal or U(0, 1). Every draw
comes from numpy's PCG64 generator seeded explicitly, so a (spec, seed) pair
always yields the same dataset.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .common import Direction, InputError, as_samples


class Mechanism(str, enum.Enum):
    ANM1 = "ANM1"
    ANM2 = "ANM2"
    MNM1 = "MNM1"
    MNM2 = "MNM2"
    CNM = "CNM"

    @property
    def label(self) -> str:
        return {"ANM1": "ANM-1", "ANM2": "ANM-2", "MNM1": "MNM-1", "MNM2": "MNM-2", "CNM": "CNM"}[self.value]


class Noise(str, enum.Enum):
    StdNormal = "StdNormal"
    StdUniform = "StdUniform"

    @property
    def short(self) -> str:
        return "N" if self is Noise.StdNormal else "U"


@dataclass(frozen=True)
class MechanismSpec:
    mechanism: Mechanism
    noise: Noise
    n: int = 100
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        object.__setattr__(self, "noise", Noise(self.noise))
        if self.n < 2:
            raise InputError(f"n must be at least 2, got {self.n}")


@dataclass
class PairDataset:
    x: np.ndarray
    y: np.ndarray
    truth: Direction = Direction.XtoY
    provenance: str = ""

    def __post_init__(self):
        self.x = as_samples(self.x, "x")
        self.y = as_samples(self.y, "y")
        if self.x.shape[0] != self.y.shape[0]:
            raise InputError(f"x has {self.x.shape[0]} rows, y has {self.y.shape[0]}")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def swapped(self) -> "PairDataset":
        return PairDataset(self.y, self.x, Direction(self.truth).mirrored(), self.provenance)


def apply_mechanism(mechanism: Mechanism, x, eps) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    mechanism = Mechanism(mechanism)
    if mechanism is Mechanism.ANM1:
        return x**3 + x + eps
    if mechanism is Mechanism.ANM2:
        return x + eps
    if mechanism is Mechanism.MNM1:
        return (x**3 + x) * np.exp(eps)
    if mechanism is Mechanism.MNM2:
        return (np.sin(10.0 * x) + np.exp(3.0 * x)) * np.exp(eps)
    return np.log(x**6 + 5.0) + x**5 - np.sin(x**2 * np.abs(eps))


def draw_noise(rng: np.random.Generator, noise: Noise, size) -> np.ndarray:
    if Noise(noise) is Noise.StdNormal:
        return rng.standard_normal(size)
    return rng.random(size)


def generate_scalar(spec: MechanismSpec) -> PairDataset:
    rng = np.random.default_rng(spec.seed)
    x = rng.standard_normal(spec.n)
    eps = draw_noise(rng, spec.noise, spec.n)
    y = apply_mechanism(spec.mechanism, x, eps)
    return PairDataset(x[:, None], y[:, None], Direction.XtoY,
                       f"{spec.mechanism.value}/{spec.noise.value}/n={spec.n}/seed={spec.seed}")


def generate_2d(spec_a: MechanismSpec, spec_b: MechanismSpec, n: int, seed: int) -> PairDataset:
    """Stack two independent scalar mechanisms into 2-D cause and effect vectors."""
    if spec_a.mechanism is spec_b.mechanism:
        raise InputError("two-dimensional pairs combine two different mechanisms")
    if spec_a.noise is not spec_b.noise:
        raise InputError("both dimensions of a two-dimensional pair share one noise law")
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 2))
    eps = draw_noise(rng, spec_a.noise, (n, 2))
    y = np.column_stack([
        apply_mechanism(spec_a.mechanism, x[:, 0], eps[:, 0]),
        apply_mechanism(spec_b.mechanism, x[:, 1], eps[:, 1]),
    ])
    return PairDataset(x, y, Direction.XtoY,
                       f"{spec_a.mechanism.value}+{spec_b.mechanism.value}/{spec_a.noise.value}/n={n}/seed={seed}")


class SettingKind(str, enum.Enum):
    Scalar = "Scalar"
    TwoDim = "TwoDim"


@dataclass(frozen=True)
class Setting:
    """One row of a results table: a mechanism (or pair of them) and a noise law."""

    mechanisms: Tuple[Mechanism, ...]
    noise: Noise

    @property
    def key(self) -> str:
        return "+".join(m.value for m in self.mechanisms) + "-" + self.noise.short

    @property
    def label(self) -> str:
        return " ".join(m.label for m in self.mechanisms)

    def generate(self, n: int, seed: int) -> PairDataset:
        if len(self.mechanisms) == 1:
            return generate_scalar(MechanismSpec(self.mechanisms[0], self.noise, n, seed))
        a, b = self.mechanisms
        return generate_2d(MechanismSpec(a, self.noise, n, seed), MechanismSpec(b, self.noise, n, seed), n, seed)


def enumerate_settings(kind) -> List[Setting]:
    """Settings in table order: mechanism(s) first, then Gaussian before uniform noise."""
    kind = SettingKind(kind)
    mechs = list(Mechanism)
    groups = [(m,) for m in mechs] if kind is SettingKind.Scalar else list(itertools.combinations(mechs, 2))
    return [Setting(tuple(g), noise) for g in groups for noise in (Noise.StdNormal, Noise.StdUniform)]


def derive_seed(*parts: int) -> int:
    """Independent 63-bit seed from a tuple of integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0] >> 1)


def export_dataset(dataset: PairDataset, path: Union[str, Path], header: Optional[str] = None) -> None:
    """Write whitespace-separated columns, x dims then y dims, with a '#' header."""
    lines = [f"# {header or dataset.provenance}",
             f"# columns: x={dataset.x.shape[1]} y={dataset.y.shape[1]}"]
    data = np.hstack([dataset.x, dataset.y])
    lines += [" ".join(repr(float(v)) for v in row) for row in data]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_columns_header(lines: Sequence[str]) -> Optional[Tuple[int, int]]:
    for line in lines:
        if line.startswith("# columns:"):
            fields = dict(tok.split("=") for tok in line.split(":", 1)[1].split())
            return int(fields["x"]), int(fields["y"])
    return None
