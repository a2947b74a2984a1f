"""Follow-the-leader and follow-the-perturbed-leader over cumulative losses.

FTL plays the argmin of cumulative loss; FPL first offsets every cumulative
loss with an independent noise draw. No weight state is kept, so the same
scheme drives any problem with a minimization oracle. With Gumbel noise under
the subtract convention the selection law has a closed form: it equals the
exponential weighted average distribution at beta = 1/scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ChoiceDistribution,
    ExpertId,
    LossHistory,
    RngLike,
    RngStream,
    as_generator,
)
from .hedge import HedgeParams, hedge_distribution
from .perturbation import Family, PerturbationSpec, Sign, pair_probability_closed_form, sample_array


@dataclass(frozen=True)
class FplParams:
    """Noise family plus whether a fresh perturbation is drawn every round."""

    perturbation: PerturbationSpec
    fresh_noise_each_round: bool = True


def ftl_choose(history: LossHistory) -> ExpertId:
    """Expert with minimal cumulative loss; ties go to the smallest index."""
    return int(np.argmin(history.cumulative))


def fpl_choose(history: LossHistory, params: FplParams, rng: RngLike) -> ExpertId:
    """One perturbed-leader draw: argmin of cumulative losses offset by noise."""
    noise = sample_array(params.perturbation, history.n, rng)
    if params.perturbation.sign is Sign.SUBTRACT:
        return int(np.argmin(history.cumulative - noise))
    return int(np.argmin(history.cumulative + noise))


# Per-call cap on the noise matrix size, to bound peak memory.
_CHUNK = 1 << 21


def fpl_distribution(
    history: LossHistory, params: FplParams, samples: int, rng: RngLike
) -> ChoiceDistribution:
    """Monte Carlo estimate of the perturbed-leader selection law.

    Empirical frequency of the argmin over `samples` independent noise draws.
    The counts are exact integers summing to `samples`; the returned float
    vector carries them at frequency resolution, nudged so its sum sits at
    1.0 up to one rounding step.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    gen = as_generator(rng)
    n = history.n
    cumulative = history.cumulative
    subtract = params.perturbation.sign is Sign.SUBTRACT
    counts = np.zeros(n, dtype=np.int64)
    remaining = samples
    rows = max(_CHUNK // n, 1)
    while remaining > 0:
        m = min(rows, remaining)
        noise = sample_array(params.perturbation, (m, n), gen)
        scores = cumulative - noise if subtract else cumulative + noise
        counts += np.bincount(np.argmin(scores, axis=1), minlength=n)
        remaining -= m
    probs = counts / float(samples)
    # Park the float rounding residue on the smallest positive entry, where
    # the ulp is finest; the residue is ~1e-16, far below one count.
    nonzero = np.flatnonzero(probs)
    j = int(nonzero[np.argmin(probs[nonzero])])
    for _ in range(4):
        residue = 1.0 - float(probs.sum())
        if residue == 0.0:
            break
        probs[j] += residue
    return ChoiceDistribution(probs)


def fpl_exact_distribution_gumbel(history: LossHistory, scale: float) -> ChoiceDistribution:
    """Closed-form selection law of FPL with subtracted Gumbel(0, scale) noise.

    Identical to the exponential weighted average distribution with
    beta = 1/scale: subtracting Gumbel noise from loss L is an argmax of
    Gumbel(-L, scale) variables, whose winner is softmax-distributed.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    return hedge_distribution(history, HedgeParams(beta=1.0 / scale))


class FtlForecaster:
    """Deterministic follow-the-leader; the distribution is a point mass."""

    def __init__(self, n: int):
        self.n = n

    def distribution(self, history: LossHistory, rng: RngStream) -> ChoiceDistribution:
        return ChoiceDistribution.point_mass(ftl_choose(history), self.n)

    def choose(self, history: LossHistory, dist: ChoiceDistribution, rng: RngStream) -> ExpertId:
        return ftl_choose(history)


class FplForecaster:
    """Perturbed-leader forecaster with exact distributions where they exist.

    The emitted distribution is exact for Gumbel noise under the subtract
    convention (softmax closed form), for any point-mass noise (reduces to
    FTL), and for two experts via the pairwise closed forms. Otherwise it is
    a Monte Carlo estimate with `mc_samples` draws. With
    fresh_noise_each_round=False the same noise vector is reused every round,
    making the run deterministic given its stream; the emitted distribution
    is then the conditional point mass at the realized choice.
    """

    def __init__(self, n: int, params: FplParams, mc_samples: int = 100_000):
        self.n = n
        self.params = params
        self.mc_samples = mc_samples

    @property
    def _spec(self) -> PerturbationSpec:
        return self.params.perturbation

    def _noise_stream(self, history: LossHistory, rng: RngStream) -> RngStream:
        if self.params.fresh_noise_each_round:
            return rng.child(history.t + 1)
        return rng.child(0)

    def distribution(self, history: LossHistory, rng: RngStream) -> ChoiceDistribution:
        spec = self._spec
        if self.n == 1 or spec.family is Family.POINT_MASS_ZERO:
            return ChoiceDistribution.point_mass(ftl_choose(history), self.n)
        if not self.params.fresh_noise_each_round:
            # Choice is deterministic given the single draw; report it as such.
            return ChoiceDistribution.point_mass(
                fpl_choose(history, self.params, self._noise_stream(history, rng)), self.n
            )
        if spec.family is Family.GUMBEL and spec.sign is Sign.SUBTRACT and spec.location == 0.0:
            return fpl_exact_distribution_gumbel(history, spec.scale)
        if self.n == 2:
            # Pairwise law is the same under both sign conventions for i.i.d. noise.
            gap = float(history.cumulative[1] - history.cumulative[0])
            q = pair_probability_closed_form(spec, abs(gap))
            p_trailing = np.array([q, 1.0 - q] if gap < 0 else [1.0 - q, q])
            return ChoiceDistribution(p_trailing)
        return fpl_distribution(history, self.params, self.mc_samples, rng.child(history.t + 1, 1))

    def choose(self, history: LossHistory, dist: ChoiceDistribution, rng: RngStream) -> ExpertId:
        if not self.params.fresh_noise_each_round:
            # The drawn-once distribution is already the realized point mass;
            # play it rather than re-deriving noise from a different stream.
            return int(np.argmax(dist.probs))
        return fpl_choose(history, self.params, self._noise_stream(history, rng))


def gumbel_fpl_forecaster(n: int, scale: float) -> FplForecaster:
    """FPL with subtracted Gumbel(0, scale) noise; exact-distribution mode."""
    return FplForecaster(n, FplParams(PerturbationSpec.gumbel(scale)))
