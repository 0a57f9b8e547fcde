"""Outcome statistics over simulation traces: onset hazard, spell durations,
conflict fraction, welfare, and empirical belief estimates.

All statistics condition on normal-normal periods (both groups normal) unless
noted. Two conflict definitions are supported: "canonical" counts a period as
conflict when at least one side plays C; "both_c" only when both do. Spell
and hazard statistics are accumulated in mergeable counters so replications
can be combined in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .config import WorldConfig
from .dynamics import (
    AbsorptionResult,
    GroupType,
    PeriodOutcome,
    StrategyProfile,
    Trace,
    absorption_time,
    iter_replications,
)
from .params import Primitives
from .stage_game import Action


class NoOpportunities(Exception):
    """Raised when a hazard is requested but no onset opportunity occurred."""


class AllCensored(Exception):
    """Raised when duration statistics are requested but no spell completed."""


class InsufficientData(Exception):
    """Raised when the trace sample cannot identify an empirical quantity."""


def conflict_mask(trace: Trace, definition: str = "canonical") -> np.ndarray:
    old_c = trace.action_old == int(Action.C)
    young_c = trace.action_young == int(Action.C)
    if definition == "canonical":
        return old_c | young_c
    if definition == "both_c":
        return old_c & young_c
    raise ValueError(f"unknown conflict definition {definition!r}")


def classify_outcome(outcome: PeriodOutcome, definition: str = "canonical") -> str:
    """Classify a single period as 'peace' or 'conflict'."""
    if definition == "canonical":
        conflict = outcome.action_old == Action.C or outcome.action_young == Action.C
    elif definition == "both_c":
        conflict = outcome.action_old == Action.C and outcome.action_young == Action.C
    else:
        raise ValueError(f"unknown conflict definition {definition!r}")
    return "conflict" if conflict else "peace"


@dataclass
class SpellStatistics:
    """Mergeable spell/hazard counters over normal-normal periods.

    An onset opportunity is a normal-normal period with the old in the
    alarming state whose previous normal-normal period was peace (or which
    starts the run); an onset is an opportunity realized as conflict.
    """

    definition: str = "canonical"
    onset_opportunities: int = 0
    onsets: int = 0
    spell_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    spell_censored: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    conflict_periods: int = 0
    total_periods: int = 0

    def merge(self, other: "SpellStatistics") -> "SpellStatistics":
        if self.definition != other.definition:
            raise ValueError("cannot merge statistics under different conflict definitions")
        return SpellStatistics(
            definition=self.definition,
            onset_opportunities=self.onset_opportunities + other.onset_opportunities,
            onsets=self.onsets + other.onsets,
            spell_lengths=np.concatenate([self.spell_lengths, other.spell_lengths]),
            spell_censored=np.concatenate([self.spell_censored, other.spell_censored]),
            conflict_periods=self.conflict_periods + other.conflict_periods,
            total_periods=self.total_periods + other.total_periods,
        )


def spell_statistics(trace: Trace, definition: str = "canonical") -> SpellStatistics:
    """Segment the normal-normal subsequence of a trace into peace gaps and
    conflict spells; the final spell is censored when it touches the end."""
    nn = (trace.type_old == int(GroupType.NORMAL)) & (trace.type_young == int(GroupType.NORMAL))
    conflict = conflict_mask(trace, definition)[nn]
    h_old = trace.h_old[nn]
    n = len(conflict)
    stats = SpellStatistics(definition=definition, total_periods=n,
                            conflict_periods=int(conflict.sum()))
    if n == 0:
        return stats

    prev_peace = np.empty(n, dtype=bool)
    prev_peace[0] = True  # run start counts as an opportunity context
    prev_peace[1:] = ~conflict[:-1]
    opportunity = prev_peace & (h_old == 1)
    stats.onset_opportunities = int(opportunity.sum())
    stats.onsets = int((opportunity & conflict).sum())

    edges = np.diff(np.concatenate([[0], conflict.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    stats.spell_lengths = (ends - starts).astype(np.int64)
    censored = np.zeros(len(starts), dtype=bool)
    if len(ends) and ends[-1] == n:
        censored[-1] = True
    stats.spell_censored = censored
    return stats


def onset_hazard(stats: SpellStatistics) -> tuple[float, float]:
    """Empirical per-opportunity onset probability with its binomial SE."""
    if stats.onset_opportunities == 0:
        raise NoOpportunities("no onset opportunities observed")
    n = stats.onset_opportunities
    p = stats.onsets / n
    return p, float(np.sqrt(p * (1 - p) / n))


@dataclass(frozen=True)
class DurationSummary:
    mean: float
    sd: float
    n_completed: int
    n_censored: int
    censored_fraction: float
    geometric_fit_p: float
    censored_adjusted_mean: float


def duration_stats(stats: SpellStatistics) -> DurationSummary:
    """Spell-duration summary. `mean`/`sd` cover completed spells only;
    `censored_adjusted_mean` is total spell exposure over completed count
    (the geometric MLE of the mean under right censoring)."""
    completed = stats.spell_lengths[~stats.spell_censored]
    n_cens = int(stats.spell_censored.sum())
    if len(completed) == 0:
        raise AllCensored("no completed spells")
    mean = float(completed.mean())
    sd = float(completed.std(ddof=1)) if len(completed) > 1 else 0.0
    total = len(stats.spell_lengths)
    return DurationSummary(
        mean=mean,
        sd=sd,
        n_completed=int(len(completed)),
        n_censored=n_cens,
        censored_fraction=n_cens / total,
        geometric_fit_p=1.0 / mean,
        censored_adjusted_mean=float(stats.spell_lengths.sum()) / len(completed),
    )


def conflict_fraction(stats: SpellStatistics) -> float:
    """Stationary fraction of normal-normal periods in conflict."""
    if stats.total_periods == 0:
        raise InsufficientData("no normal-normal periods")
    return stats.conflict_periods / stats.total_periods


def ks_distance_geometric(lengths: np.ndarray, p: float) -> float:
    """Kolmogorov-Smirnov distance between the empirical distribution of
    positive integer durations and Geometric(p) with support 1,2,..."""
    lengths = np.asarray(lengths, dtype=np.int64)
    if len(lengths) == 0:
        raise ValueError("no samples")
    if lengths.min() < 1:
        raise ValueError("durations must be >= 1")
    top = int(lengths.max())
    counts = np.bincount(lengths, minlength=top + 1)[1:]
    ecdf = np.cumsum(counts) / len(lengths)
    d = np.arange(1, top + 1)
    cdf = 1.0 - (1.0 - p) ** d
    return float(np.max(np.abs(ecdf - cdf)))


# ---------------------------------------------------------------------------
# Welfare


@dataclass(frozen=True)
class WelfareReport:
    """Stationary welfare among normal-normal meetings plus the
    population-weighted extension. w_nn_bar excludes signaling costs, which
    accumulate separately in signaling_cost_total (whole trace)."""

    w_nn_bar: float
    conflict_share: float
    w_conflict_mean: float
    w_pop: float
    signaling_cost_total: float
    nn_periods: int
    identity_gap: float
    definition: str


def _welfare_counts(trace: Trace, primitives: Primitives, definition: str):
    nn = (trace.type_old == int(GroupType.NORMAL)) & (trace.type_young == int(GroupType.NORMAL))
    payoff_old, payoff_young = trace.payoff_columns(primitives)
    w = (payoff_old + payoff_young)[nn]
    conflict = conflict_mask(trace, definition)[nn]
    cost = primitives.k * int(trace.message.sum())
    return (int(nn.sum()), float(w.sum()), int(conflict.sum()),
            float(w[conflict].sum()), cost)


def welfare_report(
    traces: Trace | Iterable[Trace],
    primitives: Primitives,
    w_nb: float = -0.5,
    w_bb: float = 0.0,
    definition: str = "canonical",
) -> WelfareReport:
    """Welfare aggregated over one trace or an iterable of traces.

    w_nn_bar is the per-period mean of W_NN over normal-normal periods, with
    W_NN(N,N)=2, W_NN(C,C)=0 and g-ell for one-sided conflict. The population
    figure weights by (1-mu)^2 and uses the configured w_nb <= 0 and w_bb for
    meetings involving bad groups (those values cancel in cross-environment
    differences).
    """
    if isinstance(traces, Trace):
        traces = [traces]
    n_nn = 0
    w_sum = 0.0
    n_conf = 0
    w_conf_sum = 0.0
    cost = 0.0
    for trace in traces:
        a, b, c, d, e = _welfare_counts(trace, primitives, definition)
        n_nn += a
        w_sum += b
        n_conf += c
        w_conf_sum += d
        cost += e
    if n_nn == 0:
        raise InsufficientData("no normal-normal periods for welfare")
    w_nn_bar = w_sum / n_nn
    lam = n_conf / n_nn
    w_conf_mean = w_conf_sum / n_conf if n_conf else 0.0
    mu = primitives.mu
    w_pop = (1 - mu) ** 2 * w_nn_bar + 2 * mu * (1 - mu) * w_nb + mu**2 * w_bb
    identity_gap = abs(w_nn_bar - ((1 - lam) * 2.0 + lam * w_conf_mean))
    return WelfareReport(
        w_nn_bar=w_nn_bar,
        conflict_share=lam,
        w_conflict_mean=w_conf_mean,
        w_pop=w_pop,
        signaling_cost_total=cost,
        nn_periods=n_nn,
        identity_gap=identity_gap,
        definition=definition,
    )


# ---------------------------------------------------------------------------
# Empirical belief environment


@dataclass(frozen=True)
class EmpiricalBeliefs:
    pi_b: float
    mu_b: float
    mu_g: float
    normal_old_periods: int


def estimate_belief_environment(traces: Trace | Iterable[Trace]) -> EmpiricalBeliefs:
    """Empirical counterparts of (pi_b, mu_b, mu_g) from normal-old periods.

    pi_b is the fraction of normal-old periods in the alarming state; mu_h is
    the frequency of a bad opponent group conditional on the old's state,
    which only identifies across runs whose types were drawn from the prior.
    The first period of each trace is skipped (its h is configured, not an
    observation).
    """
    if isinstance(traces, Trace):
        traces = [traces]
    n_old_normal = 0
    n_alarming = 0
    bad_opp = {0: 0, 1: 0}
    state_count = {0: 0, 1: 0}
    for trace in traces:
        if trace.horizon < 2:
            continue
        normal_old = trace.type_old[1:] == int(GroupType.NORMAL)
        h = trace.h_old[1:][normal_old]
        opp_bad = (trace.type_young[1:][normal_old] == int(GroupType.BAD))
        n_old_normal += int(normal_old.sum())
        n_alarming += int((h == 1).sum())
        for state in (0, 1):
            sel = h == state
            state_count[state] += int(sel.sum())
            bad_opp[state] += int(opp_bad[sel].sum())
    if n_old_normal == 0:
        raise InsufficientData("no normal-old periods after the first")
    if state_count[0] == 0 or state_count[1] == 0:
        raise InsufficientData("normal olds never occupied both private states")
    return EmpiricalBeliefs(
        pi_b=n_alarming / n_old_normal,
        mu_b=bad_opp[1] / state_count[1],
        mu_g=bad_opp[0] / state_count[0],
        normal_old_periods=n_old_normal,
    )


# ---------------------------------------------------------------------------
# Replication driver


@dataclass
class AggregateResult:
    """Merged statistics over all replications of one configuration. The
    welfare report is None when no normal-normal period occurred (for
    unforced type draws where some group came out bad)."""

    config: WorldConfig
    stats: dict[str, SpellStatistics]
    welfare: Optional[WelfareReport]
    per_rep_w_nn: np.ndarray
    per_rep_conflict_share: np.ndarray
    absorption: list[AbsorptionResult]
    replications: int


def simulate_and_aggregate(
    config: WorldConfig,
    profile: Optional[StrategyProfile] = None,
    definitions: tuple[str, ...] = ("canonical", "both_c"),
    w_nb: float = -0.5,
    w_bb: float = 0.0,
) -> AggregateResult:
    """Run all replications and fold their statistics together. Aggregation
    is a commutative merge, so the result does not depend on ordering."""
    merged = {d: SpellStatistics(definition=d) for d in definitions}
    per_rep_w = []
    per_rep_lam = []
    absorption = []
    counts = [0, 0.0, 0, 0.0, 0.0]
    prim = config.primitives
    definition = config.conflict_definition
    for trace in iter_replications(config, profile=profile):
        for d in definitions:
            merged[d] = merged[d].merge(spell_statistics(trace, d))
        n_nn, w_sum, n_conf, w_conf_sum, cost = _welfare_counts(trace, prim, definition)
        counts[0] += n_nn
        counts[1] += w_sum
        counts[2] += n_conf
        counts[3] += w_conf_sum
        counts[4] += cost
        if n_nn > 0:
            per_rep_w.append(w_sum / n_nn)
            per_rep_lam.append(n_conf / n_nn)
        absorption.append(absorption_time(trace))

    n_nn, w_sum, n_conf, w_conf_sum, cost = counts
    if n_nn > 0:
        w_nn_bar = w_sum / n_nn
        lam = n_conf / n_nn
        w_conf_mean = w_conf_sum / n_conf if n_conf else 0.0
        mu = prim.mu
        welfare = WelfareReport(
            w_nn_bar=w_nn_bar,
            conflict_share=lam,
            w_conflict_mean=w_conf_mean,
            w_pop=(1 - mu) ** 2 * w_nn_bar + 2 * mu * (1 - mu) * w_nb + mu**2 * w_bb,
            signaling_cost_total=cost,
            nn_periods=n_nn,
            identity_gap=abs(w_nn_bar - ((1 - lam) * 2.0 + lam * w_conf_mean)),
            definition=definition,
        )
    else:
        welfare = None
    return AggregateResult(
        config=config,
        stats=merged,
        welfare=welfare,
        per_rep_w_nn=np.array(per_rep_w),
        per_rep_conflict_share=np.array(per_rep_lam),
        absorption=absorption,
        replications=config.replications,
    )
