"""Cost-sequence generators for the expert game.

Includes the two-expert alternating sequence that defeats follow-the-leader,
i.i.d. stochastic generators, CSV replay, and a plugin hook for adaptive
rules that may condition on the algorithm's past choices.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import ExpertId, RngStream, loss_matrix_from_csv
from .errors import ConfigurationError, DataError


def ftl_killer_losses(t: int, n: int = 2) -> np.ndarray:
    """Round-t losses of the alternating sequence that ruins follow-the-leader.

    (0, 0.5) on the first round, then (1, 0) on even rounds and (0, 1) on odd
    ones. The leader flips every round from round 2 on, so FTL pays nearly
    every round while either fixed expert pays only about half the rounds.
    """
    if n != 2:
        raise ConfigurationError(f"the alternating sequence is defined for 2 experts, got n={n}")
    if t < 1:
        raise ValueError("rounds are 1-indexed")
    if t == 1:
        return np.array([0.0, 0.5])
    if t % 2 == 0:
        return np.array([1.0, 0.0])
    return np.array([0.0, 1.0])


class FtlKillerAdversary:
    n = 2

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray:
        return ftl_killer_losses(t)


class BernoulliAdversary:
    """Independent 0/1 losses, expert i losing with probability p[i] each round."""

    def __init__(self, p: Sequence[float]):
        p = np.asarray(p, dtype=float)
        if np.any(p < 0) or np.any(p > 1):
            raise ConfigurationError("Bernoulli probabilities must lie in [0,1]")
        self.p = p
        self.n = p.size

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray:
        gen = rng.child(t).generator()
        return (gen.random(self.n) < self.p).astype(float)


class UniformAdversary:
    """I.i.d. losses uniform on [low, high] for every expert."""

    def __init__(self, n: int, low: float = 0.0, high: float = 1.0):
        if not (np.isfinite(low) and np.isfinite(high) and low <= high):
            raise ConfigurationError(f"need finite low <= high, got [{low}, {high}]")
        self.n = n
        self.low = low
        self.high = high

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray:
        gen = rng.child(t).generator()
        return self.low + (self.high - self.low) * gen.random(self.n)


class ReplayAdversary:
    """Replays a fixed loss matrix, one row per round."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise ConfigurationError("replay matrix must be 2-d with at least one row")
        if not np.all(np.isfinite(matrix)):
            raise DataError("replay matrix contains non-finite values")
        self.matrix = matrix
        self.n = matrix.shape[1]

    @classmethod
    def from_csv(cls, path: str | Path) -> "ReplayAdversary":
        return cls(loss_matrix_from_csv(Path(path).read_text()))

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray:
        if t > self.matrix.shape[0]:
            raise DataError(f"replay exhausted: round {t} requested, only {self.matrix.shape[0]} rows")
        return self.matrix[t - 1]


class AdaptiveAdversary:
    """Delegates to a user rule that sees only the choices from earlier rounds."""

    def __init__(self, n: int, rule: Callable[[int, Sequence[ExpertId]], Sequence[float]]):
        self.n = n
        self.rule = rule

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray:
        out = np.asarray(self.rule(t, past_choices), dtype=float)
        if not np.all(np.isfinite(out)):
            raise DataError(f"round {t}: adaptive rule emitted non-finite losses")
        return out


def adversary_from_config(d: dict):
    """Build an adversary from config keys {kind, ...params}."""
    kind = d.get("kind")
    if kind == "ftl-killer":
        return FtlKillerAdversary()
    if kind == "bernoulli":
        return BernoulliAdversary(d["p"])
    if kind == "uniform":
        return UniformAdversary(int(d["n"]), float(d.get("low", 0.0)), float(d.get("high", 1.0)))
    if kind == "replay":
        return ReplayAdversary.from_csv(d["path"])
    raise ConfigurationError(f"unknown adversary kind {kind!r}")
