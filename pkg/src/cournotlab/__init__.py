"""Laboratory platform for extortion-driven collusion in a repeated Cournot duopoly."""

from .agents import AGENT_KINDS, AgentSpec, decide
from .engine import (
    GameConfig,
    RoundRecord,
    SessionRecord,
    dump_session,
    load_session,
    load_session_file,
    replay,
    round_half_up,
    run_session,
    save_session_file,
    step,
)
from .extortion import (
    CycleEvaluation,
    ExtortionConfig,
    config_for_market,
    cycle_payoff,
    deviation_curve,
    find_best_cycle,
    max_valid_k,
    response_surface,
    solve_response,
    stationary_best_response,
    stationary_payoff,
)
from .market import (
    EquilibriumPoint,
    MarketParams,
    DEFAULT_MARKET,
    ReferencePoints,
    WalrasianPoint,
    best_response,
    competitive_total_quantity,
    price,
    profit_pair,
    reference_points,
)
from .metrics import (
    CollusionMetrics,
    SummaryStats,
    collusion_metrics,
    deadweight_loss,
    degree_of_collusion,
    median_timeseries,
    paired_t_test,
    payout_yuan,
    per_session_means,
    rank_sum_test,
    summarize,
)

__version__ = "0.1.0"
