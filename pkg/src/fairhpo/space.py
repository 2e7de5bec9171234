"""Hyperparameter search spaces, genotype encoding, and the real-coded
variation operators (SBX crossover, polynomial mutation).

Genotypes live in the normalized hypercube [0,1]^k; integer parameters are
realized only at decode time (round half-up, clamped to the bounds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class LearnerId(str, Enum):
    RANDOM_FOREST = "rf"
    GRAD_BOOST = "gbt"
    MLP = "mlp"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class HyperparamDef:
    name: str
    kind: str   # "int" | "float"
    lo: float
    hi: float
    scale: str  # "uniform" | "log"

    def __post_init__(self):
        if self.kind not in ("int", "float"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.scale not in ("uniform", "log"):
            raise ValueError(f"bad scale {self.scale!r}")
        if not self.lo < self.hi:
            raise ValueError(f"{self.name}: lo must be < hi")
        if self.scale == "log" and self.lo <= 0:
            raise ValueError(f"{self.name}: log scale requires lo > 0")

    def decode(self, g: float) -> float | int:
        if self.scale == "log":
            v = math.exp(math.log(self.lo) + g * (math.log(self.hi) - math.log(self.lo)))
        else:
            v = self.lo + g * (self.hi - self.lo)
        if self.kind == "int":
            return int(min(max(math.floor(v + 0.5), self.lo), self.hi))
        return v

    def encode(self, v: float) -> float:
        if self.scale == "log":
            g = (math.log(v) - math.log(self.lo)) / (math.log(self.hi) - math.log(self.lo))
        else:
            g = (v - self.lo) / (self.hi - self.lo)
        return min(max(g, 0.0), 1.0)

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind, "lo": self.lo,
                "hi": self.hi, "scale": self.scale}


@dataclass(frozen=True)
class SearchSpace:
    learner_id: LearnerId
    params: tuple[HyperparamDef, ...]

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")

    @property
    def dim(self) -> int:
        return len(self.params)

    def to_json(self) -> dict:
        return {"learner_id": self.learner_id.value,
                "params": [p.to_json() for p in self.params]}


@dataclass(frozen=True)
class Configuration:
    genotype: np.ndarray
    values: dict[str, float | int]

    def __post_init__(self):
        g = np.asarray(self.genotype, dtype=np.float64)
        g.setflags(write=False)
        object.__setattr__(self, "genotype", g)


_SPACES = {
    LearnerId.RANDOM_FOREST: (
        HyperparamDef("max_depth", "int", 1, 50, "log"),
        HyperparamDef("min_samples_split", "int", 2, 128, "log"),
        HyperparamDef("min_samples_leaf", "int", 1, 20, "uniform"),
        HyperparamDef("max_features", "float", 0.0, 1.0, "uniform"),
        HyperparamDef("n_estimators", "int", 1, 200, "log"),
    ),
    LearnerId.GRAD_BOOST: (
        HyperparamDef("eta", "float", 2.0 ** -10, 1.0, "log"),
        HyperparamDef("max_depth", "int", 1, 50, "log"),
        HyperparamDef("colsample_bytree", "float", 0.1, 1.0, "uniform"),
        HyperparamDef("reg_lambda", "float", 2.0 ** -10, 2.0 ** 10, "log"),
        HyperparamDef("n_estimators", "int", 1, 200, "log"),
    ),
    LearnerId.MLP: (
        HyperparamDef("depth", "int", 1, 3, "uniform"),
        HyperparamDef("width", "int", 16, 1024, "log"),
        HyperparamDef("batch_size", "int", 4, 256, "log"),
        HyperparamDef("alpha", "float", 1e-8, 1.0, "log"),
        HyperparamDef("learning_rate_init", "float", 1e-5, 1.0, "log"),
        HyperparamDef("n_iter_no_change", "int", 1, 20, "log"),
    ),
}


def builtin_space(learner: LearnerId | str) -> SearchSpace:
    learner = LearnerId(learner)
    return SearchSpace(learner_id=learner, params=_SPACES[learner])


def decode(space: SearchSpace, genotype) -> Configuration:
    g = np.asarray(genotype, dtype=np.float64)
    if g.shape != (space.dim,):
        raise ValueError(f"genotype length {g.shape} != space dim {space.dim}")
    if np.any(g < 0.0) or np.any(g > 1.0):
        raise ValueError("genotype entries must lie in [0, 1]")
    values = {p.name: p.decode(float(gi)) for p, gi in zip(space.params, g)}
    return Configuration(genotype=g.copy(), values=values)


def encode(space: SearchSpace, values: dict[str, float | int]) -> Configuration:
    g = np.array([p.encode(float(values[p.name])) for p in space.params])
    return Configuration(genotype=g, values=dict(values))


def sample(space: SearchSpace, rng: np.random.Generator) -> Configuration:
    return decode(space, rng.random(space.dim))


def sbx_crossover(a, b, eta_c: float, p_cx: float, rng: np.random.Generator):
    """Per-gene simulated binary crossover; children stay in [0,1].

    Each gene recombines with probability p_cx; the two children are
    symmetric around the parent mean and randomly swapped per gene.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("parent genotypes must share length")
    if eta_c <= 0:
        raise ValueError("eta_c must be > 0")
    k = a.size
    apply = rng.random(k) < p_cx
    u = rng.random(k)
    swap = rng.random(k) < 0.5

    beta = np.where(u <= 0.5,
                    (2.0 * u) ** (1.0 / (eta_c + 1.0)),
                    (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta_c + 1.0)))
    mean = 0.5 * (a + b)
    diff = 0.5 * np.abs(b - a)
    c1 = mean - beta * diff
    c2 = mean + beta * diff
    c1, c2 = np.where(swap, c2, c1), np.where(swap, c1, c2)

    active = apply & (np.abs(a - b) > 1e-14)
    child1 = np.where(active, np.clip(c1, 0.0, 1.0), a)
    child2 = np.where(active, np.clip(c2, 0.0, 1.0), b)
    return child1, child2


def polynomial_mutation(g, eta_m: float, p_m: float, rng: np.random.Generator):
    """Deb's polynomial mutation on [0,1] bounds, clipped."""
    if not 0.0 <= p_m <= 1.0:
        raise ValueError("p_m must be in [0, 1]")
    g = np.asarray(g, dtype=np.float64)
    k = g.size
    apply = rng.random(k) < p_m
    u = rng.random(k)
    # bounds are 0 and 1, so delta1 = g and delta2 = 1 - g
    exp = 1.0 / (eta_m + 1.0)
    low = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - g) ** (eta_m + 1.0)
    high = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * g ** (eta_m + 1.0)
    delta = np.where(u <= 0.5, low ** exp - 1.0, 1.0 - high ** exp)
    out = np.where(apply, np.clip(g + delta, 0.0, 1.0), g)
    return out
