"""Solver and simulator for an overlapping-generations security dilemma with
one-sided costly signaling, publicity (leaks), and cheap-talk benchmarks."""

from .beliefs import (
    BeliefEnvironment,
    FeasibleInterval,
    InfeasibleMix,
    OffPathMessage,
    SignalingMix,
    feasible_s_interval,
    implement_cutoff,
    kappa,
    posterior_given_m0,
    posterior_given_m1,
)
from .cheap_talk import (
    BabblingCertificate,
    CheapTalkCosts,
    TalkProfile,
    babbling_scan,
    epsilon_cost_equilibrium,
)
from .config import ProfileOptions, WorldConfig, load_config, parse_config, preset, serialize_config
from .dynamics import (
    GroupType,
    PeriodOutcome,
    PrivateState,
    PublicRecord,
    StrategyProfile,
    Trace,
    WorldState,
    absorption_time,
    conflict_trap_profile,
    initial_state,
    iter_replications,
    no_message_profile,
    peace_trap_profile,
    private_mixed_profile,
    profile_from_config,
    run,
    step,
    write_trace_csv,
)
from .equilibrium import (
    ICCheck,
    MixedSignalingEquilibrium,
    NoSignalRegime,
    Regime,
    UniquenessCertificate,
    build_equilibrium,
    classify_regime,
    solve_q1,
    uniqueness_scan,
    verify_equilibrium,
)
from .metrics import (
    AllCensored,
    DurationSummary,
    EmpiricalBeliefs,
    InsufficientData,
    NoOpportunities,
    SpellStatistics,
    WelfareReport,
    classify_outcome,
    conflict_fraction,
    duration_stats,
    estimate_belief_environment,
    ks_distance_geometric,
    onset_hazard,
    simulate_and_aggregate,
    spell_statistics,
    welfare_report,
)
from .params import Primitives, symmetric_primitives
from .stage_game import (
    Action,
    Cutoffs,
    Preference,
    StagePayoffs,
    compute_cutoffs,
    payoff_difference,
    receiver_best_response,
    sender_best_action,
    sender_value,
    stage_payoff,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
