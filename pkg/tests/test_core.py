import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hedgefpl import (
    ChoiceDistribution,
    FtlForecaster,
    FtlKillerAdversary,
    HedgeForecaster,
    HedgeParams,
    LossHistory,
    RngStream,
    loss_matrix_from_csv,
    records_to_csv,
    regret,
    regret_trajectory,
    run_game,
)
from hedgefpl.adversary import ftl_killer_losses
from hedgefpl.core import RoundRecord, sample_choice
from hedgefpl.errors import ConfigurationError, DataError


class ZeroAdversary:
    def __init__(self, n):
        self.n = n

    def losses(self, t, past_choices, rng):
        return np.zeros(self.n)


class MatrixAdversary:
    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)
        self.n = self.matrix.shape[1]

    def losses(self, t, past_choices, rng):
        return self.matrix[t - 1]


def test_single_expert_game_has_zero_regret():
    records = run_game(HedgeForecaster(1, HedgeParams(1.0)), ZeroAdversary(1), 5, RngStream(3))
    assert len(records) == 5
    assert all(r.chosen == 0 for r in records)
    assert regret(records) == 0.0


def test_zero_losses_give_zero_regret():
    records = run_game(HedgeForecaster(4, HedgeParams(1.0)), ZeroAdversary(4), 10, RngStream(3))
    assert regret(records) == pytest.approx(0.0, abs=1e-12)


def ftl_cost_by_hand(T):
    # Independent leader simulation: track cumulative losses, follow the argmin.
    cum = [0.0, 0.0]
    cost = 0.0
    for t in range(1, T + 1):
        leader = 0 if cum[0] <= cum[1] else 1
        losses = ftl_killer_losses(t)
        cost += losses[leader]
        cum[0] += losses[0]
        cum[1] += losses[1]
    return cost


def test_hedge_beats_ftl_on_the_alternating_sequence():
    T = 11
    hedge_records = run_game(HedgeForecaster(2, HedgeParams(1.0)), FtlKillerAdversary(), T, RngStream(0))
    ftl_records = run_game(FtlForecaster(2), FtlKillerAdversary(), T, RngStream(0))
    ftl_cost = sum(r.expected_cost for r in ftl_records)
    assert ftl_cost == ftl_cost_by_hand(T)
    hedge_cost = sum(r.expected_cost for r in hedge_records)
    assert hedge_cost < ftl_cost


@pytest.mark.parametrize("m", [1, 5, 20])
def test_ftl_regret_grows_linearly_on_alternating_sequence(m):
    records = run_game(FtlForecaster(2), FtlKillerAdversary(), 2 * m + 1, RngStream(0))
    assert regret(records) >= m - 1


def test_regret_single_round_examples():
    rec = RoundRecord(
        t=1,
        distribution=ChoiceDistribution(np.array([1.0, 0.0])),
        chosen=0,
        losses=np.array([0.3, 0.7]),
        algorithm_cost=0.3,
        expected_cost=0.3,
    )
    assert regret([rec]) == pytest.approx(0.0, abs=1e-12)
    rec = RoundRecord(
        t=1,
        distribution=ChoiceDistribution(np.array([0.5, 0.5])),
        chosen=0,
        losses=np.array([0.3, 0.7]),
        algorithm_cost=0.3,
        expected_cost=0.5,
    )
    assert regret([rec]) == pytest.approx(0.2, abs=1e-12)


def test_round_records_satisfy_their_invariants():
    matrix = np.random.default_rng(5).random((20, 3)) * 4
    records = run_game(HedgeForecaster(3, HedgeParams(0.7)), MatrixAdversary(matrix), 20, RngStream(11))
    for r in records:
        assert r.algorithm_cost == r.losses[r.chosen]
        assert r.expected_cost == pytest.approx(float(r.distribution.probs @ r.losses), abs=1e-9)
        np.testing.assert_array_equal(r.losses, matrix[r.t - 1])
    traj = regret_trajectory(records)
    assert traj[-1] == pytest.approx(regret(records), abs=1e-12)


def test_identical_seeds_reproduce_bit_identical_runs():
    def play():
        return run_game(HedgeForecaster(3, HedgeParams(1.0)), MatrixAdversary(np.random.default_rng(2).random((15, 3))), 15, RngStream(42))

    a, b = play(), play()
    for ra, rb in zip(a, b):
        assert ra.chosen == rb.chosen
        assert ra.expected_cost == rb.expected_cost
        np.testing.assert_array_equal(ra.distribution.probs, rb.distribution.probs)
        np.testing.assert_array_equal(ra.losses, rb.losses)


def test_forecaster_sees_exactly_t_minus_1_rows():
    seen = []

    class Instrumented(HedgeForecaster):
        def distribution(self, history, rng):
            seen.append(history.t)
            return super().distribution(history, rng)

    run_game(Instrumented(2, HedgeParams(1.0)), ZeroAdversary(2), 7, RngStream(0))
    assert seen == [t - 1 for t in range(1, 8)]


def test_adversary_sees_past_choices_only():
    lengths = []

    class Probe:
        n = 2

        def losses(self, t, past_choices, rng):
            lengths.append((t, len(past_choices)))
            return np.zeros(2)

    run_game(HedgeForecaster(2, HedgeParams(1.0)), Probe(), 6, RngStream(0))
    assert lengths == [(t, t - 1) for t in range(1, 7)]


def test_mismatched_expert_counts_raise():
    with pytest.raises(ConfigurationError):
        run_game(HedgeForecaster(3, HedgeParams(1.0)), ZeroAdversary(2), 3, RngStream(0))


def test_non_finite_loss_names_the_round():
    class Bad:
        n = 2

        def losses(self, t, past_choices, rng):
            return np.array([0.0, np.inf]) if t == 4 else np.zeros(2)

    with pytest.raises(DataError, match="round 4"):
        run_game(HedgeForecaster(2, HedgeParams(1.0)), Bad(), 10, RngStream(0))


def test_loss_history_invariants():
    matrix = np.random.default_rng(0).random((12, 4))
    hist = LossHistory(matrix)
    assert hist.t == 12 and hist.n == 4
    np.testing.assert_allclose(hist.cumulative, matrix.sum(axis=0), atol=1e-9)
    grown = LossHistory.empty(4)
    for row in matrix:
        grown = grown.append(row)
    np.testing.assert_allclose(grown.cumulative, hist.cumulative, atol=1e-12)
    with pytest.raises(DataError):
        LossHistory(np.array([[np.nan, 1.0]]))


def test_choice_distribution_rejects_bad_vectors():
    with pytest.raises(ValueError):
        ChoiceDistribution(np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        ChoiceDistribution(np.array([-0.2, 1.2]))


def test_rng_stream_reproducible_and_independent():
    a = RngStream(9, 4).generator().random(10)
    b = RngStream(9, 4).generator().random(10)
    np.testing.assert_array_equal(a, b)
    c = RngStream(9, 5).generator().random(10)
    assert not np.array_equal(a, c)
    assert RngStream(9).child(1, 2) == RngStream(9).child(1, 2)
    assert RngStream(9).child(1, 2) != RngStream(9).child(2, 1)


@given(st.lists(st.floats(min_value=0.01, max_value=0.99), min_size=1, max_size=6), st.integers(0, 2**32))
def test_sample_choice_is_in_range_and_deterministic(weights, seed):
    probs = np.asarray(weights) / np.sum(weights)
    dist = ChoiceDistribution(probs)
    i = sample_choice(dist, RngStream(seed))
    assert 0 <= i < dist.n
    assert i == sample_choice(dist, RngStream(seed))


def test_csv_round_trip_and_layout():
    matrix = np.random.default_rng(1).random((6, 3))
    records = run_game(HedgeForecaster(3, HedgeParams(1.0)), MatrixAdversary(matrix), 6, RngStream(5))
    text = records_to_csv(records)
    header = text.splitlines()[0].split(",")
    assert header == ["t", "chosen", "expected_cost", "algorithm_cost",
                      "loss_0", "loss_1", "loss_2", "prob_0", "prob_1", "prob_2"]
    np.testing.assert_array_equal(loss_matrix_from_csv(text), matrix)
    assert records_to_csv(records) == text
