"""Exponential weighted average forecaster and its 0/1-loss specialization.

Expert i is played with probability proportional to exp(-beta * L_i), where
L_i is its cumulative loss. With 0/1 losses and multiplier gamma = exp(-beta)
this is exactly randomized weighted majority.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ChoiceDistribution, ExpertId, LossHistory, RngStream, sample_choice
from .errors import DataError


@dataclass(frozen=True)
class HedgeParams:
    """Learning rate for the exponential update."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")


def hedge_distribution(history: LossHistory, params: HedgeParams) -> ChoiceDistribution:
    """Softmax of the negated cumulative losses, shifted for stability.

    Subtracting the minimum loss before exponentiating leaves the ratios
    unchanged and keeps exp() away from underflow at large horizons.
    """
    cumulative = history.cumulative
    if not np.all(np.isfinite(cumulative)):
        raise DataError("cumulative losses are not finite")
    shifted = cumulative - cumulative.min()
    weights = np.exp(-params.beta * shifted)
    return ChoiceDistribution(weights / weights.sum())


def hedge_pair_probability(c: float, beta: float) -> float:
    """Probability the trailing expert gets picked in a two-expert game.

    For cumulative losses (L, L+c) the softmax gives the trailing expert
    exp(-beta*c)/(1+exp(-beta*c)); strictly decreasing in c, 0.5 at c=0.
    """
    if c < 0:
        raise ValueError("c must be >= 0 (normalize the loss gap first)")
    if beta <= 0:
        raise ValueError("beta must be positive")
    w = math.exp(-beta * c)
    return w / (1.0 + w)


class HedgeForecaster:
    """Forecaster contract wrapper around hedge_distribution."""

    def __init__(self, n: int, params: HedgeParams):
        self.n = n
        self.params = params

    def distribution(self, history: LossHistory, rng: RngStream) -> ChoiceDistribution:
        return hedge_distribution(history, self.params)

    def choose(self, history: LossHistory, dist: ChoiceDistribution, rng: RngStream) -> ExpertId:
        return sample_choice(dist, rng.child(history.t + 1))


def rwm_forecaster(n: int, gamma: float) -> HedgeForecaster:
    """Randomized weighted majority: multiplicative updates with factor gamma.

    gamma in (0,1) is the penalty multiplier applied to an expert's weight per
    unit of loss; equivalent to the exponential forecaster at beta = -ln(gamma).
    """
    if not (0 < gamma < 1):
        raise ValueError(f"gamma must be in (0,1), got {gamma}")
    return HedgeForecaster(n, HedgeParams(beta=-math.log(gamma)))
