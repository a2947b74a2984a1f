"""Online decision algorithms: exponential weights, perturbed leaders, and their
closed-form selection laws, with bound certificates and an online shortest-path
application."""

__version__ = "0.1.0"

from .adversary import (
    AdaptiveAdversary,
    BernoulliAdversary,
    FtlKillerAdversary,
    ReplayAdversary,
    UniformAdversary,
    ftl_killer_losses,
)
from .analytics import (
    BoundParams,
    EquivalenceReport,
    RegretReport,
    build_report,
    check_run_against_bounds,
    equivalence_corpus,
    fpl_cost_bound,
    fpl_star_cost_bound,
    rwm_loss_bound,
    verify_gumbel_hedge_equivalence,
)
from .core import (
    ChoiceDistribution,
    LossHistory,
    RngStream,
    RoundRecord,
    loss_matrix_from_csv,
    records_to_csv,
    regret,
    regret_trajectory,
    run_game,
    sample_choice,
)
from .fpl import (
    FplForecaster,
    FplParams,
    FtlForecaster,
    fpl_choose,
    fpl_distribution,
    fpl_exact_distribution_gumbel,
    ftl_choose,
    gumbel_fpl_forecaster,
)
from .hedge import HedgeForecaster, HedgeParams, hedge_distribution, hedge_pair_probability, rwm_forecaster
from .perturbation import (
    Family,
    PerturbationSpec,
    Sign,
    gumbel_difference_cdf,
    pair_probability_closed_form,
    pair_probability_quadrature,
    sample,
    sample_array,
)
from .spath import (
    EdgeGraph,
    PathChoice,
    PathGameReport,
    brute_force_best_path,
    edge_times_from_csv,
    edge_times_to_csv,
    ftl_killer_edge_times,
    parallel_edge_graph,
    perturbed_shortest_path,
    run_online_path_game,
)
