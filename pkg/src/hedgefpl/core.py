"""Expert-advice game: loss accounting, forecaster/adversary contracts, round loop.

Experts are indexed 0..n-1. Each round the forecaster emits a probability
distribution over experts and plays one of them; the adversary then reveals
the loss of every expert (full-information feedback). Regret is accounted
against the best fixed expert in hindsight, using the exact per-round
expectation under the emitted distribution rather than the sampled cost.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Protocol, Sequence, Union, runtime_checkable

import numpy as np

from .errors import ConfigurationError, DataError

ExpertId = int

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    # Standard splitmix64 finalizer; cheap, well-distributed 64-bit mixing.
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """Value-typed random stream: (seed, stream_id) fully determines the draws.

    ``generator()`` builds a fresh numpy Generator every call, so the same
    stream always replays the same sample sequence. Distinct stream ids give
    statistically independent sequences. ``child`` derives sub-streams
    deterministically, one per (round, purpose) or any other key tuple.
    """

    seed: int
    stream_id: int = 0

    def child(self, *keys: int) -> "RngStream":
        sid = self.stream_id
        for k in keys:
            sid = _splitmix64(sid ^ _splitmix64(k & _MASK64))
        return RngStream(self.seed, sid)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed & _MASK64, self.stream_id]))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept either an RngStream (fresh generator) or a live stateful Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


class LossHistory:
    """Per-round loss table of shape (t, n) plus its cumulative column sums."""

    __slots__ = ("per_round", "cumulative")

    def __init__(self, per_round: np.ndarray):
        per_round = np.asarray(per_round, dtype=float)
        if per_round.ndim != 2:
            raise ValueError(f"per_round must be 2-d (rounds x experts), got shape {per_round.shape}")
        if not np.all(np.isfinite(per_round)):
            raise DataError("loss table contains non-finite values")
        self.per_round = per_round
        self.cumulative = per_round.sum(axis=0)

    @classmethod
    def empty(cls, n: int) -> "LossHistory":
        if n < 1:
            raise ValueError("need at least one expert")
        return cls(np.zeros((0, n)))

    @classmethod
    def from_cumulative(cls, cumulative: Sequence[float]) -> "LossHistory":
        """Single-row history carrying the given cumulative losses."""
        return cls(np.asarray(cumulative, dtype=float).reshape(1, -1))

    @property
    def n(self) -> int:
        return self.per_round.shape[1]

    @property
    def t(self) -> int:
        return self.per_round.shape[0]

    def append(self, losses: np.ndarray) -> "LossHistory":
        losses = np.asarray(losses, dtype=float).reshape(1, -1)
        if losses.shape[1] != self.n:
            raise ConfigurationError(f"expected {self.n} losses, got {losses.shape[1]}")
        return LossHistory(np.concatenate([self.per_round, losses], axis=0))


@dataclass(frozen=True)
class ChoiceDistribution:
    """Probability vector over experts; entries nonnegative, summing to one."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("probs must be a nonempty vector")
        if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"not a probability vector: sum={probs.sum()!r}, min={probs.min()!r}")

    @property
    def n(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "ChoiceDistribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, i: ExpertId, n: int) -> "ChoiceDistribution":
        p = np.zeros(n)
        p[i] = 1.0
        return cls(p)


def sample_choice(dist: ChoiceDistribution, rng: RngLike) -> ExpertId:
    """Draw one expert index from the distribution via inverse CDF."""
    u = as_generator(rng).random()
    return int(min(np.searchsorted(np.cumsum(dist.probs), u, side="right"), dist.n - 1))


@dataclass(frozen=True)
class RoundRecord:
    """Outcome of one round: what was forecast, played, revealed, and paid."""

    t: int
    distribution: ChoiceDistribution
    chosen: ExpertId
    losses: np.ndarray
    algorithm_cost: float
    expected_cost: float


@runtime_checkable
class Forecaster(Protocol):
    """Contract every algorithm satisfies: emit a distribution, then play.

    Both methods receive a game-constant stream and derive per-round
    sub-streams internally from ``history.t``, so drawn-once noise variants
    can reuse a fixed sub-stream.
    """

    n: int

    def distribution(self, history: LossHistory, rng: RngStream) -> ChoiceDistribution: ...

    def choose(self, history: LossHistory, dist: ChoiceDistribution, rng: RngStream) -> ExpertId: ...


@runtime_checkable
class Adversary(Protocol):
    """Loss generator; may condition on past choices but never on the current round."""

    n: int

    def losses(self, t: int, past_choices: Sequence[ExpertId], rng: RngStream) -> np.ndarray: ...


# Stream namespaces inside run_game; distinct so forecaster estimation,
# choice sampling and adversary draws never share randomness.
_NS_FORECAST = 0x66
_NS_CHOICE = 0x63
_NS_ADVERSARY = 0x61


def run_game(forecaster, adversary, T: int, rng: RngStream) -> list[RoundRecord]:
    """Play T rounds of the full-information expert game.

    At round t the forecaster sees only losses from rounds < t; the adversary
    sees only choices from rounds < t. Returns one RoundRecord per round.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if forecaster.n != adversary.n:
        raise ConfigurationError(
            f"forecaster has {forecaster.n} experts but adversary has {adversary.n}"
        )
    n = forecaster.n
    f_stream = rng.child(_NS_FORECAST)
    c_stream = rng.child(_NS_CHOICE)
    a_stream = rng.child(_NS_ADVERSARY)

    records: list[RoundRecord] = []
    history = LossHistory.empty(n)
    choices: list[ExpertId] = []
    for t in range(1, T + 1):
        dist = forecaster.distribution(history, f_stream)
        chosen = forecaster.choose(history, dist, c_stream)
        losses = np.asarray(adversary.losses(t, tuple(choices), a_stream), dtype=float)
        if losses.shape != (n,):
            raise DataError(f"round {t}: adversary emitted shape {losses.shape}, expected ({n},)")
        if not np.all(np.isfinite(losses)):
            raise DataError(f"round {t}: adversary emitted non-finite loss {losses!r}")
        records.append(
            RoundRecord(
                t=t,
                distribution=dist,
                chosen=chosen,
                losses=losses,
                algorithm_cost=float(losses[chosen]),
                expected_cost=float(dist.probs @ losses),
            )
        )
        history = history.append(losses)
        choices.append(chosen)
    return records


def regret(records: Sequence[RoundRecord]) -> float:
    """Cumulative expected cost minus the best fixed expert's cumulative loss."""
    if not records:
        raise ValueError("records must be nonempty")
    total = sum(r.expected_cost for r in records)
    cumulative = np.sum([r.losses for r in records], axis=0)
    return float(total - cumulative.min())


def regret_trajectory(records: Sequence[RoundRecord]) -> np.ndarray:
    """Running regret after each round, against the best expert so far."""
    if not records:
        raise ValueError("records must be nonempty")
    losses = np.array([r.losses for r in records])
    expected = np.array([r.expected_cost for r in records])
    return np.cumsum(expected) - np.cumsum(losses, axis=0).min(axis=1)


def records_to_csv(records: Sequence[RoundRecord]) -> str:
    """Serialize rounds to CSV: t, chosen, expected_cost, algorithm_cost, losses, probs."""
    if not records:
        raise ValueError("records must be nonempty")
    n = records[0].distribution.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t", "chosen", "expected_cost", "algorithm_cost"]
    header += [f"loss_{i}" for i in range(n)] + [f"prob_{i}" for i in range(n)]
    writer.writerow(header)
    for r in records:
        row = [r.t, r.chosen, repr(r.expected_cost), repr(r.algorithm_cost)]
        row += [repr(float(x)) for x in r.losses]
        row += [repr(float(p)) for p in r.distribution.probs]
        writer.writerow(row)
    return buf.getvalue()


def loss_matrix_from_csv(text: str) -> np.ndarray:
    """Read the loss_0..loss_{n-1} columns back out of a round CSV."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV") from None
    loss_cols = [i for i, name in enumerate(header) if name.startswith("loss_")]
    if not loss_cols:
        raise DataError("CSV has no loss_* columns")
    rows = [[float(row[i]) for i in loss_cols] for row in reader if row]
    if not rows:
        raise DataError("CSV has no data rows")
    return np.asarray(rows, dtype=float)
