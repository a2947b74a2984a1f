"""Acceptance suite: one test per exit criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is fixed here; nothing is tuned at runtime.
"""

import math

import numpy as np
import pytest

from hedgefpl import (
    BernoulliAdversary,
    FplForecaster,
    FplParams,
    FtlForecaster,
    FtlKillerAdversary,
    HedgeParams,
    LossHistory,
    PerturbationSpec,
    RngStream,
    Sign,
    brute_force_best_path,
    check_run_against_bounds,
    equivalence_corpus,
    fpl_distribution,
    fpl_exact_distribution_gumbel,
    ftl_killer_edge_times,
    hedge_distribution,
    pair_probability_closed_form,
    pair_probability_quadrature,
    parallel_edge_graph,
    perturbed_shortest_path,
    run_game,
    run_online_path_game,
    rwm_forecaster,
)
from helpers import random_dag

BETAS = (0.5, 1.0, 2.0)
CORPUS = equivalence_corpus()  # 50 pinned histories, n <= 6, cumulative losses in [0, 10]


def report(criterion: int, name: str, ok: bool):
    print(f"[acceptance] criterion {criterion} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok


def test_criterion_1_closed_form_gumbel_equivalence():
    worst = 0.0
    for history in CORPUS:
        for beta in BETAS:
            target = hedge_distribution(history, HedgeParams(beta)).probs
            got = fpl_exact_distribution_gumbel(history, scale=1.0 / beta).probs
            worst = max(worst, float(np.abs(got - target).max()))
    report(1, f"exact Gumbel law equals exponential weights, max dev {worst:.2e}", worst <= 1e-12)


def test_criterion_2_sampled_gumbel_equivalence():
    samples = 10**6
    rng = RngStream(20240802)
    worst = 0.0
    for i, history in enumerate(CORPUS):
        for j, beta in enumerate(BETAS):
            target = hedge_distribution(history, HedgeParams(beta)).probs
            params = FplParams(PerturbationSpec.gumbel(1.0 / beta))
            got = fpl_distribution(history, params, samples, rng.child(i, j)).probs
            worst = max(worst, float(np.abs(got - target).max()))
    report(2, f"10^6-draw Gumbel frequencies match exponential weights, max dev {worst:.4f}", worst <= 0.005)


def _grid(scales=(0.25, 0.5, 1.0, 2.0, 4.0), fracs=(0.0, 0.4, 1.1, 2.9)):
    return [(s, f * s) for s in scales for f in fracs]  # 20 (scale, gap) points


def _mc_pair_probability(spec: PerturbationSpec, c: float, seed: int, samples: int = 10**6) -> float:
    # Two-expert perturbed-leader simulation through the real machinery.
    hist = LossHistory.from_cumulative([0.0, c])
    return float(fpl_distribution(hist, FplParams(spec), samples, RngStream(seed)).probs[1])


def test_criterion_3_pairwise_selection_probabilities():
    ok = True
    seed = 0
    for scale, c in _grid():
        spec = PerturbationSpec.exponential(scale)
        closed = pair_probability_closed_form(spec, c)
        ok &= closed - 0.5 * math.exp(-scale * c) == 0.0
        ok &= abs(closed - pair_probability_quadrature(spec, c, tol=1e-8)) <= 1e-7
        ok &= abs(closed - _mc_pair_probability(spec, c, seed := seed + 1)) <= 0.005
    for scale, c in _grid():
        spec = PerturbationSpec.uniform(scale)
        closed = pair_probability_closed_form(spec, c)
        expected = (scale - c) ** 2 / (2 * scale * scale) if c < scale else 0.0
        ok &= closed == expected
        if c >= scale:
            ok &= closed == 0.0
        ok &= abs(closed - pair_probability_quadrature(spec, c, tol=1e-8)) <= 1e-7
        ok &= abs(closed - _mc_pair_probability(spec, c, seed := seed + 1)) <= 0.005
    for scale, c in _grid():
        spec = PerturbationSpec.gumbel(scale)
        closed = pair_probability_closed_form(spec, c)
        w = math.exp(-c / scale)
        ok &= abs(closed - w / (1 + w)) <= 1e-15
        ok &= abs(closed - pair_probability_quadrature(spec, c, tol=1e-8)) <= 1e-7
        ok &= abs(closed - _mc_pair_probability(spec, c, seed := seed + 1)) <= 0.005
    report(3, "pairwise closed forms vs quadrature and 10^6-draw simulation", bool(ok))


@pytest.mark.parametrize("m", [5, 50, 500])
def test_criterion_4_leader_following_fails(m):
    T = 2 * m + 1
    records = run_game(FtlForecaster(2), FtlKillerAdversary(), T, RngStream(0))
    total = sum(r.expected_cost for r in records)
    best = float(np.sum([r.losses for r in records], axis=0).min())
    ok = total >= 2 * m - 1 and best <= m + 0.5
    report(4, f"m={m}: leader-following pays {total:g}, best expert pays {best:g}", ok)


def test_criterion_5_weighted_majority_certificate():
    violations = 0
    runs = 0
    for gamma in (0.25, 0.5, 0.75):
        for n in (2, 4, 8):
            forecaster = rwm_forecaster(n, gamma)
            for seed in range(100):
                p = np.random.default_rng([n, seed]).random(n)
                records = run_game(forecaster, BernoulliAdversary(p), 200, RngStream(seed))
                result = check_run_against_bounds(records, forecaster, bounds=["rwm"])
                runs += 1
                violations += 0 if result.all_bounds_satisfied else 1
    report(5, f"multiplicative-update loss bound held in {runs - violations}/{runs} runs", violations == 0)


def test_criterion_6_perturbed_leader_certificates():
    adversaries = {
        "alternating": FtlKillerAdversary,
        "bernoulli": lambda: BernoulliAdversary([0.3, 0.7]),
    }
    violations = 0
    runs = 0
    for eps in (0.01, 0.1, 1.0):
        specs = [
            PerturbationSpec.uniform(1.0 / eps),  # additive bound at parameter eps
            PerturbationSpec.exponential(eps),
        ]
        for spec in specs:
            bounds = ["fpl", "fpl_star"] if spec.family.value == "exponential" else ["fpl"]
            for make in adversaries.values():
                forecaster = FplForecaster(2, FplParams(spec))
                for seed in range(100):
                    records = run_game(forecaster, make(), 100, RngStream(seed))
                    result = check_run_against_bounds(records, forecaster, bounds=bounds)
                    runs += 1
                    violations += 0 if result.all_bounds_satisfied else 1
    report(6, f"perturbed-leader cost bounds held in {runs - violations}/{runs} runs", violations == 0)


def test_criterion_7_path_oracle_equivalence():
    gen = np.random.default_rng(314159)
    zero = PerturbationSpec.point_mass_zero(Sign.ADD)
    mismatches = 0
    for i in range(100):
        g = random_dag(gen)
        if perturbed_shortest_path(g, zero, RngStream(i)).edges != brute_force_best_path(g).edges:
            mismatches += 1
    report(7, f"zero-noise routing equals brute force on {100 - mismatches}/100 random DAGs", mismatches == 0)


# Pinned on the first verified run (seed 0); regression constants, not theory.
PINNED_FTL_PATH_REGRET = 499.5
PINNED_FPL_PATH_REGRET = 3.0


def test_criterion_8_path_game_regret_profile():
    T = 1000
    g = parallel_edge_graph(2)
    ftl_report = run_online_path_game(
        g, PerturbationSpec.point_mass_zero(Sign.ADD), ftl_killer_edge_times(g), T, RngStream(0)
    )
    eps = math.sqrt(2.0 / T)  # sqrt(D/(R*A*T)) for this instance
    fpl_report = run_online_path_game(
        g, PerturbationSpec.exponential(eps, sign=Sign.ADD), ftl_killer_edge_times(g), T, RngStream(0)
    )
    ok = (
        ftl_report.regret > 0.4 * T
        and fpl_report.regret < 0.25 * T
        and ftl_report.regret == pytest.approx(PINNED_FTL_PATH_REGRET, abs=1e-9)
        and fpl_report.regret == pytest.approx(PINNED_FPL_PATH_REGRET, abs=1e-9)
    )
    report(
        8,
        f"path regrets at T={T}: leader-following {ftl_report.regret:g}, perturbed {fpl_report.regret:g}",
        ok,
    )


def test_criterion_9_property_suite_configuration():
    # The executable content of this criterion is the rest of the suite being
    # green; here we check the suite runs under the fixed deterministic profile.
    from hypothesis import settings

    ok = settings().derandomize
    report(9, "module property suites run under the fixed deterministic profile", bool(ok))
