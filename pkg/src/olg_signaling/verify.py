"""Named verification suites, shared by the CLI `verify` subcommand and the
test suite. Each check re-derives its target independently of the code path
it examines (bisection oracles for closed forms, replay oracles for traces).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import beliefs as bel
from . import cheap_talk as ct
from . import equilibrium as eqm
from .config import WorldConfig
from .dynamics import (
    GroupType,
    PublicRecord,
    Trace,
    initial_state,
    profile_from_config,
    run,
    step,
)
from .params import Primitives
from .stage_game import Action, StagePayoffs, compute_cutoffs, payoff_difference, sender_value


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def closed_forms_suite(seed: int = 2024) -> SuiteReport:
    checks: list[CheckResult] = []
    payoffs = StagePayoffs(0.3, 0.6)
    cut = compute_cutoffs(payoffs)

    # cutoff formulas against a bisection of the indifference conditions
    p_bar_oracle = _bisect(lambda p: payoff_difference(payoffs, p), 0.0, 1.0)
    checks.append(CheckResult(
        "p_bar_matches_indifference_root", abs(cut.p_bar - p_bar_oracle) < 1e-9,
        f"formula {cut.p_bar:.12g} vs root {p_bar_oracle:.12g}"))
    checks.append(CheckResult("q_bar_equals_p_bar", cut.q_bar == cut.p_bar))
    checks.append(CheckResult(
        "k_star_is_kink_value", abs(cut.k_star - sender_value(payoffs, cut.q_bar)) < 1e-12,
        f"k_star {cut.k_star:.12g} vs V(q_bar) {sender_value(payoffs, cut.q_bar):.12g}"))

    qs = np.linspace(0.0, 1.0, 20001)
    env_gap = max(abs(sender_value(payoffs, q)
                      - max(q * 1.6 - 0.6, q * 0.3)) for q in qs)
    checks.append(CheckResult("value_is_upper_envelope", env_gap <= 1e-12,
                              f"max gap {env_gap:.3g}"))

    from .stage_game import Preference, receiver_best_response
    flips_ok = all(
        receiver_best_response(payoffs, cut.p_bar - d) == Preference.PREFER_C
        and receiver_best_response(payoffs, cut.p_bar + d) == Preference.PREFER_N
        for d in (1e-9, 1e-6, 1e-3, 0.1)
    ) and receiver_best_response(payoffs, cut.p_bar) == Preference.INDIFFERENT
    checks.append(CheckResult("best_response_flips_at_p_bar", flips_ok))

    # posterior identity: p_b = kappa*s pins the signal posterior at p_bar
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10_000):
        mu, pi_b, p_bar = rng.uniform(0.05, 0.95, 3)
        env = bel.BeliefEnvironment(mu=mu, mu_g=0.1, mu_b=0.35, pi_b=pi_b)
        kap = bel.kappa(env, p_bar)
        s = rng.uniform(1e-6, 1.0) * min(1.0, 1.0 / kap)
        post = bel.posterior_given_m1(env, bel.SignalingMix(s=s, p_b=kap * s))
        worst = max(worst, abs(post - p_bar))
    checks.append(CheckResult("signal_posterior_pinned_at_cutoff", worst <= 1e-12,
                              f"max |posterior - p_bar| = {worst:.3g}"))

    # boundary consistency: the silent posterior hits p_bar exactly at s_min
    # (evaluated at p_b = 0, the form the interval bound is derived from)
    worst_b = 0.0
    n_checked = 0
    for _ in range(2_000):
        mu, pi_b, p_bar = rng.uniform(0.05, 0.95, 3)
        env = bel.BeliefEnvironment(mu=mu, mu_g=0.1, mu_b=0.35, pi_b=pi_b)
        s_min = bel.feasible_s_interval(env, p_bar).s_min
        if not 0 < s_min <= 1:
            continue
        n_checked += 1
        post0 = bel.posterior_given_m0(env, bel.SignalingMix(s=s_min, p_b=0.0))
        worst_b = max(worst_b, abs(post0 - p_bar))
    checks.append(CheckResult("silent_posterior_boundary", worst_b <= 1e-9,
                              f"{n_checked} interior boundaries, max gap {worst_b:.3g}"))

    # q1(k): sender indifference, continuity at the kink, strict monotonicity
    mu_b = 0.35
    ks = np.linspace(0.65 / 1000, 0.65, 1000)
    q1s = np.array([eqm.solve_q1(k, mu_b, cut, payoffs) for k in ks])
    indiff = max(abs((1 - mu_b) * sender_value(payoffs, q) - k) for q, k in zip(q1s, ks))
    checks.append(CheckResult("sender_indifference_on_band", indiff <= 1e-12,
                              f"max |(1-mu_b)V(q1)-k| = {indiff:.3g}"))
    checks.append(CheckResult("q1_strictly_increasing", bool(np.all(np.diff(q1s) > 0))))
    kink = (1 - mu_b) * cut.k_star
    low = eqm.q1_low_branch(kink, mu_b, payoffs)
    high = eqm.q1_high_branch(kink, mu_b, payoffs)
    checks.append(CheckResult("q1_branches_agree_at_kink",
                              abs(low - high) < 1e-12 and abs(low - cut.q_bar) < 1e-12,
                              f"low {low:.12g} high {high:.12g} q_bar {cut.q_bar:.12g}"))

    bands_nested = all(
        (1 - mb2) < (1 - mb1)
        for mb1, mb2 in [(0.2, 0.35), (0.35, 0.5), (0.5, 0.8)]
    )
    checks.append(CheckResult("band_shrinks_with_mistrust", bands_nested))

    ok_unique = True
    detail = []
    for k in (0.0001, 0.05, 0.09, 0.3, 0.65):
        prim = Primitives(mu=0.6, eps_nc=0.1, eps_cn=0.1, k=k, g=0.3, ell=0.6)
        env = bel.BeliefEnvironment(0.6, 0.1, 0.35, 0.5)
        cert = eqm.uniqueness_scan(prim, env, grid_resolution=10**6)
        ok_unique &= cert.unique
        detail.append(f"k={k}: root {cert.root:.6g} gap {cert.root_gap:.2g}")
    checks.append(CheckResult("indifference_root_unique", ok_unique, "; ".join(detail)))
    return SuiteReport("closed_forms", checks)


def equilibrium_ic_suite() -> SuiteReport:
    checks: list[CheckResult] = []
    env = bel.BeliefEnvironment(0.6, 0.1, 0.35, 0.5)
    for k, regime in ((0.05, eqm.Regime.LOW_COST), (0.3, eqm.Regime.HIGH_COST),
                      (0.09, eqm.Regime.HIGH_COST), (0.65, eqm.Regime.HIGH_COST)):
        prim = Primitives(mu=0.6, eps_nc=0.1, eps_cn=0.1, k=k, g=0.3, ell=0.6)
        eq = eqm.build_equilibrium(prim, env, s=0.5)
        report = eqm.verify_equilibrium(eq, prim, env)
        hard = [c for c in report if c.passed is not None]
        checks.append(CheckResult(
            f"ic_checks_pass_k_{k}",
            eq.regime is regime and all(c.passed for c in hard),
            f"regime {eq.regime.value}, worst slack "
            f"{min(c.slack for c in hard):.3g}"))
        reported = [c for c in report if c.passed is None]
        checks.append(CheckResult(
            f"benign_ic_reported_k_{k}", len(reported) == 1,
            reported[0].note if reported else "missing"))

    # a perturbed q0 must break the indifference check
    prim = Primitives(mu=0.6, eps_nc=0.1, eps_cn=0.1, k=0.3, g=0.3, ell=0.6)
    eq = eqm.build_equilibrium(prim, env, s=0.5)
    from dataclasses import replace
    broken = replace(eq, q0=0.1)
    report = eqm.verify_equilibrium(broken, prim, env)
    indiff = next(c for c in report if c.name == "alarming_sender_indifference")
    checks.append(CheckResult("perturbed_q0_breaks_indifference", not indiff.passed,
                              indiff.note))

    try:
        eqm.build_equilibrium(prim.with_(k=0.7), env, s=0.5)
        checks.append(CheckResult("no_signal_regime_raises", False))
    except eqm.NoSignalRegime:
        checks.append(CheckResult("no_signal_regime_raises", True))
    return SuiteReport("equilibrium_ic", checks)


def cheap_talk_suite() -> SuiteReport:
    checks: list[CheckResult] = []
    cfg = WorldConfig()
    prim, env = cfg.primitives, cfg.belief_env
    for rounds, grid in ((1, 21), (2, 7), (3, 7)):
        cert = ct.babbling_scan(prim, env, grid=grid, rounds=rounds)
        checks.append(CheckResult(
            f"babbling_certified_T{rounds}", cert.certified,
            f"{cert.n_approx_equilibria} approx eq, max on-path gap "
            f"{cert.max_onpath_coop_gap:.3g} {cert.note}"))
    profile, ic = ct.epsilon_cost_equilibrium(prim, env, ct.CheapTalkCosts(0.0, 0.02, 0.02))
    checks.append(CheckResult(
        "epsilon_cost_ic", all(c.passed for c in ic),
        f"q_D = {profile.q['D']:.9g}, slacks "
        + ", ".join(f"{c.slack:.3g}" for c in ic)))
    checks.append(CheckResult("epsilon_cost_informative", profile.q["D"] > profile.q["H"],
                              f"q_D {profile.q['D']:.9g} > q_H {profile.q['H']:.9g}"))
    return SuiteReport("cheap_talk", checks)


def _replay_trace(trace: Trace, config: WorldConfig) -> list[str]:
    """Independent re-check of the trace laws; returns violation messages."""
    errors = []
    prim = config.primitives
    n = trace.horizon
    leaked_msg = (trace.leaked == 1) & (trace.message == 1)
    success = leaked_msg & (trace.action_old == 0) & (trace.action_young == 0)
    failure = leaked_msg & ~((trace.action_old == 0) & (trace.action_young == 0))
    if not np.all(trace.record_after[success] == int(PublicRecord.SUCCESS)):
        errors.append("leaked successful message did not record Success")
    if not np.all(trace.record_after[failure] == int(PublicRecord.FAILURE)):
        errors.append("leaked failed message did not record Failure")
    quiet = ~leaked_msg
    unchanged = trace.record_after[quiet] == trace.record_before[quiet]
    forgotten = trace.record_after[quiet] == int(PublicRecord.EMPTY)
    if prim.rho == 0:
        if not np.all(unchanged):
            errors.append("record changed without a leaked message (rho=0)")
    else:
        if not np.all(unchanged | forgotten):
            errors.append("invalid record transition in a quiet period")
    if n > 1:
        if not np.all(trace.record_before[1:] == trace.record_after[:-1]):
            errors.append("record_before does not chain from record_after")
        if not np.all(trace.h_old[1:] == trace.perception[:-1]):
            errors.append("next old's state is not the young's perception")
    if prim.q_leak == 0 and trace.leaked.any():
        errors.append("leak occurred with q_leak=0")
    if prim.q_leak == 0 and np.any(trace.record_before != int(PublicRecord.EMPTY)):
        errors.append("record formed with q_leak=0")
    parity = np.arange(n) % 2
    ta = trace.type_old[parity == 0]
    tb = trace.type_old[parity == 1]
    if (len(set(ta.tolist())) > 1) or (len(set(tb.tolist())) > 1):
        errors.append("group types changed within the run")
    bad_old = trace.type_old == int(GroupType.BAD)
    if not np.all(trace.action_old[bad_old] == int(Action.C)):
        errors.append("a bad old played N")
    return errors


def dynamics_laws_suite(seed: int = 99) -> SuiteReport:
    checks: list[CheckResult] = []
    rng = np.random.default_rng(seed)
    configs = []
    for i in range(8):
        prim = Primitives(
            mu=0.6, eps_nc=float(rng.uniform(0.02, 0.3)), eps_cn=float(rng.uniform(0.02, 0.3)),
            k=float(rng.choice([0.05, 0.3])), g=0.3, ell=0.6,
            q_leak=float(rng.choice([0.0, 0.1, 0.3])), rho=float(rng.choice([0.0, 0.2])),
        )
        profile_id = ["no_message", "private_mixed", "peace_trap", "conflict_trap"][i % 4]
        configs.append(WorldConfig(
            primitives=prim, profile=profile_id, s=0.5, horizon=4000,
            replications=1, seed=int(rng.integers(1, 10**6)),
            force_types=None if i % 3 else ("normal", "normal"),
        ))

    all_errors = []
    for cfg in configs:
        trace = run(cfg)
        all_errors += [f"{cfg.profile}: {e}" for e in _replay_trace(trace, cfg)]
    checks.append(CheckResult("record_law_replay", not all_errors,
                              "; ".join(all_errors[:3])))

    cfg = configs[1]
    t1, t2 = run(cfg), run(cfg)
    same = all(
        np.array_equal(getattr(t1, f), getattr(t2, f))
        for f in ("record_before", "h_old", "message", "leaked", "action_old",
                  "action_young", "perception", "record_after")
    )
    checks.append(CheckResult("deterministic_replay", same))

    # run() must equal folding step() over the same stream
    cfg_small = configs[2].with_(horizon=600)
    trace = run(cfg_small)
    state = initial_state(cfg_small)
    profile = profile_from_config(cfg_small)
    agree = True
    for t in range(cfg_small.horizon):
        state, out = step(state, profile, cfg_small.primitives)
        if (int(out.record_before) != trace.record_before[t]
                or int(out.h_old) != trace.h_old[t]
                or out.message != trace.message[t]
                or int(out.leaked) != trace.leaked[t]
                or int(out.action_old) != trace.action_old[t]
                or int(out.action_young) != trace.action_young[t]
                or int(out.young_perception) != trace.perception[t]
                or int(out.record_after) != trace.record_after[t]):
            agree = False
            break
    checks.append(CheckResult("run_matches_step_fold", agree,
                              f"diverged at t={t}" if not agree else ""))

    # perception noise frequencies within 3 standard errors
    cfg_eps = WorldConfig(profile="no_message", seed=17, horizon=200_000,
                          force_types=("normal", "normal"),
                          primitives=Primitives(mu=0.6, eps_nc=0.2, eps_cn=0.05,
                                                k=0.3, g=0.3, ell=0.6))
    trace = run(cfg_eps)
    old_c = trace.action_old == 1
    frac_cn = float((trace.perception[old_c] == 0).mean())
    n_c = int(old_c.sum())
    se = np.sqrt(0.05 * 0.95 / n_c)
    ok_cn = abs(frac_cn - 0.05) <= 3 * se
    old_n = ~old_c
    frac_nc = float((trace.perception[old_n] == 1).mean())
    se_n = np.sqrt(0.2 * 0.8 / int(old_n.sum()))
    ok_nc = abs(frac_nc - 0.2) <= 3 * se_n
    checks.append(CheckResult("perception_noise_frequencies", ok_cn and ok_nc,
                              f"C->N {frac_cn:.4f} (0.05), N->C {frac_nc:.4f} (0.2)"))
    return SuiteReport("dynamics_laws", checks)


SUITES = {
    "closed_forms": closed_forms_suite,
    "equilibrium_ic": equilibrium_ic_suite,
    "cheap_talk": cheap_talk_suite,
    "dynamics_laws": dynamics_laws_suite,
}


def run_suite(name: str) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    return SUITES[name]()
