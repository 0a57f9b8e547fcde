"""Acceptance criteria, one test per criterion.

Every Monte Carlo bound is a 3-standard-error band around a closed-form
target; closed-form values are re-derived here with independent oracles
(bisection, brute-force grids) before being compared to the library.
Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
pass lines.
"""

import time

import numpy as np
import pytest

from olg_signaling.beliefs import BeliefEnvironment, SignalingMix, kappa, posterior_given_m1
from olg_signaling.cheap_talk import CheapTalkCosts, babbling_scan, epsilon_cost_equilibrium
from olg_signaling.config import ProfileOptions, WorldConfig
from olg_signaling.dynamics import PublicRecord, absorption_time, profile_from_config, run
from olg_signaling.equilibrium import solve_q1
from olg_signaling.metrics import (
    duration_stats,
    ks_distance_geometric,
    onset_hazard,
    simulate_and_aggregate,
    spell_statistics,
    welfare_report,
)
from olg_signaling.params import Primitives, symmetric_primitives
from olg_signaling.stage_game import StagePayoffs, compute_cutoffs, sender_value

ENV = BeliefEnvironment(mu=0.6, mu_g=0.1, mu_b=0.35, pi_b=0.5)
MU_B = 0.35


def base_config(**kw) -> WorldConfig:
    defaults = dict(seed=20240810, force_types=("normal", "normal"))
    defaults.update(kw)
    return WorldConfig(**defaults)


def report(num: int, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {detail} [{elapsed:.1f}s / {budget:.0f}s]"
    print(line)
    assert ok, line
    assert elapsed < budget, f"criterion {num} exceeded runtime budget: {elapsed:.1f}s"


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_1_closed_forms():
    t0 = time.time()
    payoffs = StagePayoffs(0.3, 0.6)
    cut = compute_cutoffs(payoffs)

    # oracle: p_bar from the receiver indifference p*(1+l-g) - l = 0
    p_bar_oracle = _bisect(lambda p: p * 1.3 - 0.6, 0.0, 1.0)
    # oracle: q1 from (1-mu_b) * max(q(1+l)-l, qg) = k
    def q1_oracle(k):
        return _bisect(lambda q: 0.65 * max(q * 1.6 - 0.6, q * 0.3) - k, 0.0, 1.0)
    kink_oracle = 0.65 * 0.3 * p_bar_oracle      # sender switch: (1-mu_b)*g*q_bar
    top_oracle = 0.65 * max(1 * 1.6 - 0.6, 0.3)  # k at q1 = 1

    targets = [
        ("p_bar", cut.p_bar, p_bar_oracle, 0.461538462),
        ("q_bar", cut.q_bar, p_bar_oracle, 0.461538462),
        ("k_star", cut.k_star, 0.3 * p_bar_oracle, 0.138461538),
        ("band_kink", 0.65 * cut.k_star, kink_oracle, 0.09),
        ("band_top", 1 - MU_B, top_oracle, 0.65),
        ("q1(0.3)", solve_q1(0.3, MU_B, cut, payoffs), q1_oracle(0.3), 0.663461538),
    ]
    ok = True
    details = []
    for name, value, oracle, frozen in targets:
        good = abs(value - oracle) <= 1e-9 and abs(value - frozen) <= 1e-9
        ok &= good
        details.append(f"{name}={value:.9f}")
    report(1, ok, ", ".join(details), time.time() - t0, 1.0)


def test_criterion_2_posterior_identity():
    t0 = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(10_000):
        mu, pi_b, p_bar = rng.uniform(0.02, 0.98, 3)
        env = BeliefEnvironment(mu=mu, mu_g=0.1, mu_b=0.35, pi_b=pi_b)
        kap = kappa(env, p_bar)
        s = rng.uniform(1e-9, 1.0) * min(1.0, 1.0 / kap)
        post = posterior_given_m1(env, SignalingMix(s=s, p_b=kap * s))
        worst = max(worst, abs(post - p_bar))
    report(2, worst <= 1e-12, f"max |posterior_m1 - p_bar| = {worst:.2e} over 1e4 draws",
           time.time() - t0, 5.0)


def test_criterion_3_sender_indifference():
    t0 = time.time()
    payoffs = StagePayoffs(0.3, 0.6)
    cut = compute_cutoffs(payoffs)
    ks = np.linspace(0.65 / 1000, 0.65, 1000)
    worst = max(abs(0.65 * sender_value(payoffs, solve_q1(k, MU_B, cut, payoffs)) - k)
                for k in ks)
    report(3, worst <= 1e-12, f"max |(1-mu_b)V(q1(k)) - k| = {worst:.2e} on 1e3 grid",
           time.time() - t0, 1.0)


def test_criterion_4_geometric_duration():
    t0 = time.time()
    details = []
    ok = True
    for label, cfg in (
        ("no_message", base_config(profile="no_message", horizon=50_000,
                                   replications=45, seed=404)),
        ("private_mixed_low_cost", base_config(
            profile="private_mixed", horizon=50_000, replications=45, seed=405,
            primitives=symmetric_primitives(0.6, 0.1, 0.05, 0.3, 0.6), s=0.5)),
    ):
        st = simulate_and_aggregate(cfg, definitions=("canonical",)).stats["canonical"]
        ds = duration_stats(st)
        completed = st.spell_lengths[~st.spell_censored]
        ks_dist = ks_distance_geometric(completed, 0.1)
        good = (ds.n_completed >= 100_000 and 9.9 <= ds.mean <= 10.1 and ks_dist < 0.01)
        ok &= good
        details.append(f"{label}: n={ds.n_completed} mean={ds.mean:.4f} KS={ks_dist:.4f}")
    report(4, ok, "; ".join(details), time.time() - t0, 30.0)


def test_criterion_5_onset_hazard():
    t0 = time.time()
    target = 1 - 0.6 * solve_q1(0.3, MU_B, compute_cutoffs(StagePayoffs(0.3, 0.6)),
                                StagePayoffs(0.3, 0.6))
    assert abs(target - 0.601923077) <= 1e-9

    cfg = base_config(profile="private_mixed", horizon=60_000, replications=20, seed=505)
    st = simulate_and_aggregate(cfg, definitions=("canonical",)).stats["canonical"]
    est, se = onset_hazard(st)
    ok_sig = st.onset_opportunities >= 100_000 and abs(est - target) <= 3 * se

    cfg_no = base_config(profile="no_message", horizon=50_000, replications=45, seed=506)
    st_no = simulate_and_aggregate(cfg_no, definitions=("canonical",)).stats["canonical"]
    est_no, se_no = onset_hazard(st_no)
    ok_no = st_no.onset_opportunities >= 100_000 and abs(est_no - 1.0) <= 3 * se_no

    report(5, ok_sig and ok_no,
           f"signaling hazard {est:.6f} vs {target:.6f} "
           f"({st.onset_opportunities} opps, 3se={3*se:.4f}); "
           f"no-message hazard {est_no:.6f} ({st_no.onset_opportunities} opps)",
           time.time() - t0, 60.0)


def test_criterion_6_bifurcation():
    t0 = time.time()
    q = 0.2
    cfg = base_config(profile="peace_trap", horizon=1_000, replications=10_000,
                      seed=606, primitives=symmetric_primitives(0.6, 0.1, 0.3, 0.3, 0.6,
                                                                q_leak=q))
    profile = profile_from_config(cfg)
    times = []
    n_success = 0
    for rep in range(cfg.replications):
        res = absorption_time(run(cfg, rep, profile))
        n_success += res.state is PublicRecord.SUCCESS and not res.censored
        if not res.censored:
            times.append(res.time)
    mean_time = float(np.mean(times))
    se = (np.sqrt(1 - q) / q) / np.sqrt(len(times))
    ok_peace = n_success == cfg.replications and abs(mean_time - 1 / q) <= 3 * se

    cfg_f = base_config(profile="conflict_trap", horizon=1_500, replications=300,
                        seed=607, s=0.5,
                        primitives=symmetric_primitives(0.6, 0.1, 0.05, 0.3, 0.6,
                                                        q_leak=q))
    profile_f = profile_from_config(cfg_f)
    n_failure = 0
    post_all_conflict = True
    for rep in range(cfg_f.replications):
        trace = run(cfg_f, rep, profile_f)
        res = absorption_time(trace)
        if res.state is PublicRecord.FAILURE:
            n_failure += 1
            post = spell_statistics(trace.window(res.time, trace.horizon))
            post_all_conflict &= post.conflict_periods == post.total_periods
    ok_conflict = n_failure > 0 and post_all_conflict

    report(6, ok_peace and ok_conflict,
           f"peace trap: {n_success}/10000 Success, mean time {mean_time:.4f} "
           f"(3se={3*se:.4f}); conflict trap: {n_failure}/300 Failure, "
           f"post-absorption conflict share == 1",
           time.time() - t0, 60.0)


def test_criterion_7_public_duration_ordering():
    t0 = time.time()
    cfg = base_config(
        profile="private_mixed", horizon=10_000, replications=6_000, seed=707, s=0.5,
        primitives=symmetric_primitives(0.6, 0.1, 0.05, 0.3, 0.6, q_leak=0.1),
        profile_options=ProfileOptions(respond_to_record=True),
    )
    st = simulate_and_aggregate(cfg, definitions=("canonical",)).stats["canonical"]
    ds = duration_stats(st)
    ok = ds.n_completed >= 10_000 and ds.censored_adjusted_mean > 10.0
    report(7, ok,
           f"censored-adjusted mean {ds.censored_adjusted_mean:.1f} > 10 "
           f"(completed {ds.n_completed}, censored fraction {ds.censored_fraction:.3f})",
           time.time() - t0, 120.0)


def test_criterion_8_welfare_ordering():
    t0 = time.time()
    agg_sig = simulate_and_aggregate(
        base_config(profile="private_mixed", horizon=20_000, replications=30, seed=808))
    agg_no = simulate_and_aggregate(
        base_config(profile="no_message", horizon=20_000, replications=30, seed=809))
    w_sig = agg_sig.per_rep_w_nn
    w_no = agg_no.per_rep_w_nn
    joint_se = np.sqrt(w_sig.var(ddof=1) / len(w_sig) + w_no.var(ddof=1) / len(w_no))
    gap = w_sig.mean() - w_no.mean()
    ok_private = gap > 3 * joint_se

    prim_leak = symmetric_primitives(0.6, 0.1, 0.05, 0.3, 0.6, q_leak=0.2)
    cfg_p = base_config(profile="peace_trap", horizon=400, replications=200,
                        seed=810, primitives=prim_leak.with_(k=0.3))
    profile_p = profile_from_config(cfg_p)
    w_peace = []
    for rep in range(cfg_p.replications):
        trace = run(cfg_p, rep, profile_p)
        res = absorption_time(trace)
        assert res.state is PublicRecord.SUCCESS
        w_peace.append(welfare_report(trace.window(res.time, trace.horizon),
                                      cfg_p.primitives).w_nn_bar)
    cfg_c = base_config(profile="conflict_trap", horizon=1_500, replications=200,
                        seed=811, s=0.5, primitives=prim_leak)
    profile_c = profile_from_config(cfg_c)
    w_conf = []
    for rep in range(cfg_c.replications):
        trace = run(cfg_c, rep, profile_c)
        res = absorption_time(trace)
        if res.state is PublicRecord.FAILURE and res.time < trace.horizon:
            w_conf.append(welfare_report(trace.window(res.time, trace.horizon),
                                         cfg_c.primitives).w_nn_bar)
    ok_traps = (len(w_peace) == 200 and set(w_peace) == {2.0}
                and len(w_conf) > 0 and set(w_conf) == {0.0})

    report(8, ok_private and ok_traps,
           f"private gap {gap:.4f} > 3*joint_se {3*joint_se:.4f} "
           f"({w_sig.mean():.4f} vs {w_no.mean():.4f}); "
           f"peace-trap post-absorption welfare == 2 ({len(w_peace)} runs), "
           f"conflict-trap == 0 ({len(w_conf)} runs)",
           time.time() - t0, 60.0)


def test_criterion_9_cheap_talk():
    t0 = time.time()
    prim = symmetric_primitives(0.6, 0.1, 0.3, 0.3, 0.6)
    cert = babbling_scan(prim, ENV, grid=21, rounds=1)
    profile, checks = epsilon_cost_equilibrium(prim, ENV, CheapTalkCosts(0.0, 0.02, 0.02))
    ok = (cert.certified and cert.max_onpath_coop_gap <= 1e-9
          and abs(profile.q["D"] - 0.102564103) <= 1e-9
          and all(c.slack >= -1e-12 for c in checks))
    report(9, ok,
           f"babbling certified over {cert.n_profiles} profiles "
           f"({cert.n_approx_equilibria} approx eq, gap {cert.max_onpath_coop_gap:.1e}); "
           f"q_D = {profile.q['D']:.9f}, min IC slack "
           f"{min(c.slack for c in checks):.2e}",
           time.time() - t0, 120.0)


def test_criterion_10_asymmetric_monitoring():
    t0 = time.time()
    prim = Primitives(mu=0.6, eps_nc=0.2, eps_cn=0.05, k=0.3, g=0.3, ell=0.6)
    cfg = base_config(profile="no_message", horizon=55_000, replications=50,
                      seed=1010, primitives=prim)
    st = simulate_and_aggregate(cfg, definitions=("canonical",)).stats["canonical"]
    ds = duration_stats(st)
    ok = 19.8 <= ds.mean <= 20.2
    report(10, ok, f"duration mean {ds.mean:.4f} in [19.8, 20.2] "
                   f"({ds.n_completed} completed spells)",
           time.time() - t0, 30.0)
