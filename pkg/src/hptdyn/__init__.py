"""Heuristic payoff tables, exact expected payoffs, and replicator dynamics.

The package turns heuristic payoff tables (HPTs) of symmetric and
2-population multiplayer games into expected-payoff functions, phase
portraits, and equilibrium reports, keeps the older approximate formulas
around for error comparisons, and estimates HPTs from simulated episodes.
"""

from .dynamics import (
    DirectionField,
    Equilibrium,
    EquilibriumSearch,
    IntegrationError,
    ReplicatorField,
    Trajectory,
    direction_field,
    find_equilibria,
    integrate_final_states,
    integrate_trajectory,
    make_field,
    rd_velocity_single,
    rd_velocity_two,
)
from .egta import (
    EpisodeRecord,
    HptEstimate,
    WolfpackConfig,
    estimate_hpt,
    sample_policy_assignment,
    simulate_wolfpack_episode,
    wolfpack_episode_source,
)
from .legacy import (
    DecomposedPair,
    LegacyPayoff,
    decompose_asymmetric,
    legacy_error_report,
    legacy_expected_payoff,
)
from .nfg import (
    NormalFormGame,
    SymmetryError,
    brute_force_expected_payoff,
    check_population_interchangeable,
    check_symmetric,
    from_bimatrix,
    nfg_to_hpt_asymmetric,
    nfg_to_hpt_symmetric,
)
from .payoff import (
    expected_payoff,
    expected_payoff_asymmetric,
    expected_payoff_symmetric,
    row_probability_asymmetric,
    row_probability_symmetric,
)
from .tables import (
    AsymmetricHpt,
    CapacityError,
    InvalidTableError,
    SymmetricHpt,
    UnsupportedShapeError,
    ValidationReport,
    as_profile,
    co_player_multinomial,
    compositions,
    enumerate_rows_asymmetric,
    enumerate_rows_symmetric,
    make_asymmetric_hpt,
    make_symmetric_hpt,
    multinomial,
    validate_hpt,
)

__version__ = "0.1.0"
