"""Trace statistics: spells, hazards, durations, welfare, belief estimates."""

import numpy as np
import pytest

from olg_signaling.config import WorldConfig
from olg_signaling.dynamics import PeriodOutcome, PrivateState, PublicRecord, Trace, run
from olg_signaling.metrics import (
    AllCensored,
    InsufficientData,
    NoOpportunities,
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
from olg_signaling.params import symmetric_primitives
from olg_signaling.stage_game import Action

PRIM = symmetric_primitives(mu=0.6, eps=0.1, k=0.3, g=0.3, ell=0.6)


def synthetic_trace(action_old, action_young, h_old=None, types_old=None,
                    types_young=None, message=None):
    n = len(action_old)
    z = np.zeros(n, dtype=np.uint8)
    ao = np.array(action_old, dtype=np.uint8)
    ay = np.array(action_young, dtype=np.uint8)
    return Trace(
        horizon=n,
        record_before=z.copy(),
        h_old=np.array(h_old, dtype=np.uint8) if h_old is not None else z.copy(),
        type_old=np.array(types_old, dtype=np.uint8) if types_old is not None else z.copy(),
        type_young=np.array(types_young, dtype=np.uint8) if types_young is not None else z.copy(),
        message=np.array(message, dtype=np.uint8) if message is not None else z.copy(),
        leaked=z.copy(),
        action_old=ao,
        action_young=ay,
        perception=ao.copy(),
        record_after=z.copy(),
    )


def outcome(a_old, a_young):
    return PeriodOutcome(
        period=0, record_before=PublicRecord.EMPTY, h_old=PrivateState.BENIGN,
        type_old=0, type_young=0, message=0, leaked=False,
        action_old=a_old, action_young=a_young, young_perception=a_old,
        record_after=PublicRecord.EMPTY, payoff_old=0.0, payoff_young=0.0,
        cost_paid=0.0)


def test_classify_outcome_definitions():
    assert classify_outcome(outcome(Action.N, Action.N)) == "peace"
    assert classify_outcome(outcome(Action.C, Action.N)) == "conflict"
    assert classify_outcome(outcome(Action.C, Action.C)) == "conflict"
    assert classify_outcome(outcome(Action.C, Action.N), "both_c") == "peace"
    assert classify_outcome(outcome(Action.C, Action.C), "both_c") == "conflict"


def test_spell_segmentation_reconstructs_trace():
    #       peace, spell of 3, peace, spell of 2 (censored at the end)
    a_old = [0, 1, 1, 1, 0, 0, 1, 1]
    h     = [0, 1, 1, 1, 0, 1, 1, 1]
    trace = synthetic_trace(a_old, [0] * 8, h_old=h)
    st = spell_statistics(trace)
    assert st.total_periods == 8
    assert st.conflict_periods == 5
    assert st.spell_lengths.tolist() == [3, 2]
    assert st.spell_censored.tolist() == [False, True]
    # spells plus peace gaps cover every period exactly once
    assert st.spell_lengths.sum() + (st.total_periods - st.conflict_periods) == 8
    # alarming-after-peace at t=1, 5, 6; only t=1 and t=6 realized as conflict
    assert st.onset_opportunities == 3
    assert st.onsets == 2


def test_onset_opportunity_requires_previous_peace():
    a_old = [1, 1, 0, 1]
    h     = [1, 1, 1, 1]
    st = spell_statistics(synthetic_trace(a_old, [0, 0, 0, 0], h_old=h))
    # run start counts; t=1 is mid-spell; t=3 follows the peace at t=2
    assert st.onset_opportunities == 2
    assert st.onsets == 2
    st2 = spell_statistics(synthetic_trace([0, 0], [0, 0], h_old=[0, 0]))
    with pytest.raises(NoOpportunities):
        onset_hazard(st2)


def test_spells_condition_on_normal_pairs():
    a_old = [1, 1, 1, 1]
    types_old = [0, 1, 0, 1]
    st = spell_statistics(synthetic_trace(a_old, [0] * 4, types_old=types_old,
                                          types_young=[1, 0, 1, 0]))
    assert st.total_periods == 0
    assert len(st.spell_lengths) == 0


def test_duration_stats_and_censoring():
    st = spell_statistics(synthetic_trace([1, 1, 0, 1, 0, 1, 1, 1],
                                          [0] * 8, h_old=[1] * 8))
    ds = duration_stats(st)
    assert ds.n_completed == 2
    assert ds.n_censored == 1
    assert ds.mean == pytest.approx(1.5)
    assert ds.censored_fraction == pytest.approx(1 / 3)
    assert ds.geometric_fit_p == pytest.approx(1 / 1.5)
    assert ds.censored_adjusted_mean == pytest.approx(6 / 2)
    all_cens = spell_statistics(synthetic_trace([1, 1], [0, 0], h_old=[1, 1]))
    with pytest.raises(AllCensored):
        duration_stats(all_cens)


def test_ks_distance_exact_for_geometric_cdf():
    rng = np.random.default_rng(0)
    sample = rng.geometric(0.1, size=200_000)
    assert ks_distance_geometric(sample, 0.1) < 0.01
    assert ks_distance_geometric(sample, 0.25) > 0.2


def test_merge_is_order_independent():
    t1 = synthetic_trace([1, 0, 1, 1], [0] * 4, h_old=[1, 0, 1, 1])
    t2 = synthetic_trace([0, 1, 0, 0], [0] * 4, h_old=[0, 1, 0, 0])
    a = spell_statistics(t1).merge(spell_statistics(t2))
    b = spell_statistics(t2).merge(spell_statistics(t1))
    assert a.onsets == b.onsets
    assert a.conflict_periods == b.conflict_periods
    assert sorted(a.spell_lengths.tolist()) == sorted(b.spell_lengths.tolist())
    assert duration_stats(a).mean == duration_stats(b).mean


def test_welfare_report_identities():
    all_peace = synthetic_trace([0] * 10, [0] * 10)
    rep = welfare_report(all_peace, PRIM)
    assert rep.w_nn_bar == 2.0
    assert rep.conflict_share == 0.0

    all_cc = synthetic_trace([1] * 10, [1] * 10)
    rep2 = welfare_report(all_cc, PRIM)
    assert rep2.w_nn_bar == 0.0
    assert rep2.conflict_share == 1.0

    mixed = synthetic_trace([0, 1, 1, 0], [0, 0, 1, 0], message=[0, 1, 0, 0])
    rep3 = welfare_report(mixed, PRIM)
    # W_NN: 2, g-ell, 0, 2
    assert rep3.w_nn_bar == pytest.approx((2 + (0.3 - 0.6) + 0 + 2) / 4)
    assert rep3.identity_gap <= 1e-12
    assert rep3.signaling_cost_total == pytest.approx(PRIM.k)
    mu = PRIM.mu
    expected_pop = (1 - mu) ** 2 * rep3.w_nn_bar + 2 * mu * (1 - mu) * (-0.5)
    assert rep3.w_pop == pytest.approx(expected_pop)


def test_welfare_identity_on_simulated_trace():
    cfg = WorldConfig(profile="private_mixed", seed=3, horizon=30_000,
                      force_types=("normal", "normal"))
    rep = welfare_report(run(cfg), cfg.primitives)
    assert rep.identity_gap <= 1e-12


def test_estimate_beliefs_all_peace():
    cfg = WorldConfig(profile="peace_trap", seed=5, horizon=100_000,
                      force_types=("normal", "normal"),
                      primitives=PRIM.with_(q_leak=0.3))
    est = estimate_belief_environment(run(cfg))
    # in permanent peace the alarming state arises only through misperception
    se = 3 * np.sqrt(0.1 * 0.9 / est.normal_old_periods)
    assert abs(est.pi_b - PRIM.eps_nc) <= se
    assert est.mu_b == 0.0  # opponents forced normal


def test_estimate_beliefs_forced_bad_opponent():
    cfg = WorldConfig(profile="no_message", seed=5, horizon=20_000,
                      force_types=("normal", "bad"))
    est = estimate_belief_environment(run(cfg))
    assert est.mu_b == 1.0
    assert est.mu_g == 1.0


def test_estimate_beliefs_ordering_in_mixed_population():
    cfg = WorldConfig(profile="no_message", seed=17, horizon=400, replications=400)
    traces = [run(cfg, rep) for rep in range(cfg.replications)]
    est = estimate_belief_environment(traces)
    assert est.mu_g < est.mu_b


def test_estimate_beliefs_insufficient_data():
    with pytest.raises(InsufficientData):
        estimate_belief_environment(synthetic_trace([0], [0]))


def test_renewal_ratio_stable_across_seeds():
    ratios = []
    for seed in range(6):
        cfg = WorldConfig(profile="no_message", seed=seed, horizon=200_000,
                          force_types=("normal", "normal"))
        trace = run(cfg)
        st = spell_statistics(trace)
        lam = conflict_fraction(st)
        hazard, _ = onset_hazard(st)
        mean_d = duration_stats(st).mean
        pi_b = estimate_belief_environment(trace).pi_b
        ratios.append(lam / (hazard * mean_d * pi_b))
    cv = np.std(ratios) / np.mean(ratios)
    assert cv < 0.05


def test_onset_monotonicity_signaling_vs_none():
    base = WorldConfig(seed=23, horizon=100_000, force_types=("normal", "normal"))
    h_sig, se_sig = onset_hazard(
        simulate_and_aggregate(base.with_(profile="private_mixed")).stats["canonical"])
    h_no, se_no = onset_hazard(
        simulate_and_aggregate(base.with_(profile="no_message")).stats["canonical"])
    joint = np.sqrt(se_sig**2 + se_no**2)
    assert h_sig <= h_no + 3 * joint
    assert h_sig < h_no  # strict at the high-cost preset


def test_conflict_fraction_ordering():
    base = WorldConfig(seed=29, horizon=100_000, force_types=("normal", "normal"))
    lam_sig = conflict_fraction(
        simulate_and_aggregate(base.with_(profile="private_mixed")).stats["canonical"])
    lam_no = conflict_fraction(
        simulate_and_aggregate(base.with_(profile="no_message")).stats["canonical"])
    assert lam_sig < lam_no
