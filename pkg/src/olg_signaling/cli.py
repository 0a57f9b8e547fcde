"""Command-line front end: solve, simulate, sweep, verify.

Exit codes: 0 success, 2 validation error, 3 infeasibility (no-signal regime
or no feasible mixing probability), 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from . import beliefs as bel
from . import equilibrium as eqm
from . import metrics as met
from .config import (
    WorldConfig,
    load_config,
    preset,
    serialize_config,
)
from .dynamics import PublicRecord, no_message_profile, profile_from_config, write_trace_csv
from .stage_game import compute_cutoffs
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY_FAILED = 4


def _round9(value):
    """Round floats to 9 significant digits recursively, for stable files."""
    if isinstance(value, float):
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {k: _round9(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round9(v) for v in value]
    return value


def _g(x: float) -> str:
    return f"{x:.9g}"


def _resolve_config(args) -> WorldConfig:
    if args.config and args.preset:
        raise ValueError("--config and --preset are mutually exclusive")
    if args.preset:
        cfg = preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        cfg = WorldConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_(seed=args.seed)
    if getattr(args, "definition", None):
        cfg = cfg.with_(conflict_definition=args.definition.replace("-", "_"))
    return cfg


def _out_dir(args) -> Path | None:
    if not getattr(args, "out", None):
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    cfg = _resolve_config(args)
    payoffs = cfg.primitives.payoffs
    cut = compute_cutoffs(payoffs)
    band_top = 1 - cfg.belief_env.mu_b
    kink = band_top * cut.k_star
    interval = bel.feasible_s_interval(cfg.belief_env, cut.p_bar)

    print(f"p_bar       {_g(cut.p_bar)}")
    print(f"q_bar       {_g(cut.q_bar)}")
    print(f"k_star      {_g(cut.k_star)}")
    print(f"cost band   (0, {_g(band_top)}], sender action switch at {_g(kink)}")
    print(f"s interval  s_min={_g(interval.s_min)} s_max={_g(interval.s_max)} "
          f"feasible={str(interval.feasible).lower()}")

    regime = eqm.classify_regime(cfg.primitives.k, cfg.belief_env.mu_b, cut)
    if regime is eqm.Regime.NO_SIGNAL:
        print(f"regime      no_signal: band exceeded "
              f"(k={_g(cfg.primitives.k)} > 1-mu_b={_g(band_top)}); no normal type signals")
        return EXIT_INFEASIBLE
    if not interval.feasible:
        print(f"infeasible mixing: no s in (max(s_min,0), min(s_max,1)] "
              f"(s_min={_g(interval.s_min)})")
        return EXIT_INFEASIBLE
    try:
        eq = eqm.build_equilibrium(cfg.primitives, cfg.belief_env, cfg.s)
    except bel.InfeasibleMix as exc:
        print(f"infeasible mixing: {exc}")
        return EXIT_INFEASIBLE

    print(f"regime      {eq.regime.value}")
    print(f"s           {_g(eq.s)}")
    print(f"p_b         {_g(eq.p_b)}")
    print(f"q1          {_g(eq.q1)}")
    print(f"q0          {_g(eq.q0)}")
    print(f"action|m=1  {eq.sender_action_after_m1.name}")
    print(f"posterior|m=1  {_g(eq.posterior_m1)}")
    print(f"posterior|m=0  {_g(eq.posterior_m0)}")
    print(f"off-path posteriors  m=1: {_g(eq.off_path_m1_posterior)}  "
          f"m=0: {_g(eq.off_path_m0_posterior)}")
    report = eqm.verify_equilibrium(eq, cfg.primitives, cfg.belief_env)
    for c in report:
        tag = "reported" if c.passed is None else ("pass" if c.passed else "FAIL")
        print(f"  {tag:8s} {c.name}: {c.note}")

    out = _out_dir(args)
    if out is not None:
        payload = _round9({
            "cutoffs": {"p_bar": cut.p_bar, "q_bar": cut.q_bar, "k_star": cut.k_star},
            "band": {"top": band_top, "action_switch": kink},
            "s_interval": {"s_min": interval.s_min, "s_max": interval.s_max,
                           "feasible": interval.feasible},
            "equilibrium": {
                "regime": eq.regime.value, "s": eq.s, "p_b": eq.p_b,
                "q1": eq.q1, "q0": eq.q0,
                "sender_action_after_m1": eq.sender_action_after_m1.name,
                "posterior_m1": eq.posterior_m1, "posterior_m0": eq.posterior_m0,
            },
            "ic_report": [
                {"name": c.name, "passed": c.passed, "slack": c.slack, "note": c.note}
                for c in report
            ],
        })
        (out / "solve.yaml").write_text(yaml.safe_dump(payload, sort_keys=False))
        (out / "config.yaml").write_text(serialize_config(cfg))
    return EXIT_OK


def _summary_dict(agg: met.AggregateResult) -> dict:
    cfg = agg.config
    summary = {
        "profile": cfg.profile,
        "seed": cfg.seed,
        "replications": agg.replications,
        "horizon": cfg.horizon,
        "conflict_definition": cfg.conflict_definition,
        "parameters": {
            "primitives": {
                "mu": cfg.primitives.mu, "eps_nc": cfg.primitives.eps_nc,
                "eps_cn": cfg.primitives.eps_cn, "k": cfg.primitives.k,
                "g": cfg.primitives.g, "ell": cfg.primitives.ell,
                "q_leak": cfg.primitives.q_leak, "rho": cfg.primitives.rho,
            },
            "belief_env": {
                "mu": cfg.belief_env.mu, "mu_g": cfg.belief_env.mu_g,
                "mu_b": cfg.belief_env.mu_b, "pi_b": cfg.belief_env.pi_b,
            },
            "s": cfg.s,
            "force_types": list(cfg.force_types) if cfg.force_types else None,
        },
    }
    hazard = {}
    duration = {}
    lam = {}
    for d, st in agg.stats.items():
        try:
            est, se = met.onset_hazard(st)
            hazard[d] = {"estimate": est, "stderr": se,
                         "opportunities": st.onset_opportunities, "onsets": st.onsets}
        except met.NoOpportunities:
            hazard[d] = None
        try:
            ds = met.duration_stats(st)
            duration[d] = {
                "mean": ds.mean, "sd": ds.sd, "n_completed": ds.n_completed,
                "n_censored": ds.n_censored, "censored_fraction": ds.censored_fraction,
                "geometric_fit_p": ds.geometric_fit_p,
                "censored_adjusted_mean": ds.censored_adjusted_mean,
            }
        except met.AllCensored:
            duration[d] = {"n_completed": 0,
                           "n_censored": int(st.spell_censored.sum())}
        lam[d] = (st.conflict_periods / st.total_periods) if st.total_periods else None
    summary["hazard"] = hazard
    summary["duration"] = duration
    summary["conflict_fraction"] = lam
    w = agg.welfare
    summary["welfare"] = None if w is None else {
        "w_nn_bar": w.w_nn_bar, "conflict_share": w.conflict_share,
        "w_conflict_mean": w.w_conflict_mean, "w_pop": w.w_pop,
        "signaling_cost_total": w.signaling_cost_total,
        "nn_periods": w.nn_periods, "identity_gap": w.identity_gap,
        "definition": w.definition,
    }
    absorbed = [a for a in agg.absorption if not a.censored]
    summary["absorption"] = {
        "n_runs": len(agg.absorption),
        "n_absorbed": len(absorbed),
        "n_success": sum(1 for a in absorbed if a.state == PublicRecord.SUCCESS),
        "n_failure": sum(1 for a in absorbed if a.state == PublicRecord.FAILURE),
        "mean_time": float(np.mean([a.time for a in absorbed])) if absorbed else None,
    }
    return _round9(summary)


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    if cfg.seed is None:
        print("error: simulate requires a seed (--seed or config)", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        profile = profile_from_config(cfg)
    except (eqm.NoSignalRegime, bel.InfeasibleMix) as exc:
        print(f"infeasible profile: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    agg = met.simulate_and_aggregate(cfg, profile=profile)
    summary = _summary_dict(agg)
    text = yaml.safe_dump(summary, sort_keys=False)
    print(text, end="")
    out = _out_dir(args)
    if out is not None:
        (out / "summary.yaml").write_text(text)
        (out / "config.yaml").write_text(serialize_config(cfg))
        if args.trace:
            from .dynamics import run
            for rep in range(cfg.replications):
                trace = run(cfg, replication=rep, profile=profile)
                write_trace_csv(trace, cfg.primitives,
                                out / f"trace_rep{rep:04d}.csv")
    return EXIT_OK


SWEEP_AXES = ("k", "eps", "q_leak", "mu_b", "rho")

SWEEP_HEADER = (
    "axis", "value", "regime", "q1", "p_b", "hazard_analytic",
    "hazard_emp", "hazard_se", "duration_mean", "duration_adj_mean",
    "censored_fraction", "conflict_share", "w_nn_bar",
)


def _apply_axis(cfg: WorldConfig, axis: str, value: float) -> WorldConfig:
    if axis == "k":
        return cfg.with_(primitives=cfg.primitives.with_(k=value))
    if axis == "eps":
        return cfg.with_(primitives=cfg.primitives.with_(eps_nc=value, eps_cn=value))
    if axis == "q_leak":
        return cfg.with_(primitives=cfg.primitives.with_(q_leak=value))
    if axis == "rho":
        return cfg.with_(primitives=cfg.primitives.with_(rho=value))
    if axis == "mu_b":
        env = cfg.belief_env
        return cfg.with_(belief_env=bel.BeliefEnvironment(
            mu=env.mu, mu_g=env.mu_g, mu_b=value, pi_b=env.pi_b))
    raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    if cfg.seed is None:
        print("error: sweep requires a seed (--seed or config)", file=sys.stderr)
        return EXIT_VALIDATION
    if args.axis not in SWEEP_AXES:
        print(f"error: axis must be one of {SWEEP_AXES}", file=sys.stderr)
        return EXIT_VALIDATION
    grid = [float(v) for v in args.grid.split(",") if v.strip() != ""]
    if not grid:
        print("error: empty grid", file=sys.stderr)
        return EXIT_VALIDATION

    rows = []
    for value in grid:
        point = _apply_axis(cfg, args.axis, value)
        cut = compute_cutoffs(point.primitives.payoffs)
        regime = eqm.classify_regime(point.primitives.k, point.belief_env.mu_b, cut)
        if regime is eqm.Regime.NO_SIGNAL:
            q1 = p_b = float("nan")
            hazard_analytic = 1.0
            profile = no_message_profile()
            point_run = point.with_(profile="no_message")
        else:
            eq = eqm.build_equilibrium(point.primitives, point.belief_env, point.s)
            q1, p_b = eq.q1, eq.p_b
            hazard_analytic = (1.0 - point.s * eq.q1
                               if regime is eqm.Regime.HIGH_COST else 1.0)
            profile = profile_from_config(point)
            point_run = point
        agg = met.simulate_and_aggregate(point_run, profile=profile,
                                         definitions=(point.conflict_definition,))
        st = agg.stats[point.conflict_definition]
        try:
            h_emp, h_se = met.onset_hazard(st)
        except met.NoOpportunities:
            h_emp = h_se = float("nan")
        try:
            ds = met.duration_stats(st)
            dmean, dadj, dcens = ds.mean, ds.censored_adjusted_mean, ds.censored_fraction
        except met.AllCensored:
            dmean = dadj = float("nan")
            dcens = 1.0 if len(st.spell_censored) else float("nan")
        lam = (st.conflict_periods / st.total_periods) if st.total_periods else float("nan")
        rows.append((args.axis, value, regime.value, q1, p_b, hazard_analytic,
                     h_emp, h_se, dmean, dadj, dcens, lam, agg.welfare.w_nn_bar))

    lines = ["\t".join(SWEEP_HEADER)]
    for row in rows:
        lines.append("\t".join(
            v if isinstance(v, str) else _g(v) if isinstance(v, float) else str(v)
            for v in row))
    table = "\n".join(lines) + "\n"
    print(table, end="")
    out = _out_dir(args)
    if out is not None:
        (out / "sweep.tsv").write_text(table)
        (out / "config.yaml").write_text(serialize_config(cfg))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [args.suite] if args.suite != "all" else list(SUITES)
    failed = False
    for name in names:
        report = run_suite(name)
        for c in report.checks:
            print(f"{'pass' if c.passed else 'FAIL'} {name}.{c.name}"
                  + (f": {c.detail}" if c.detail else ""))
        failed |= not report.passed
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olg-signaling",
        description="Equilibrium solver and Monte Carlo simulator for the "
                    "one-sided costly-signaling security dilemma.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--preset", help="named preset: fig1, fig2, fig3")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--definition", choices=["canonical", "both-c"],
                       help="conflict definition for reported statistics")

    p_solve = sub.add_parser("solve", help="compute the closed-form equilibrium objects")
    common(p_solve)
    p_sim = sub.add_parser("simulate", help="run replications and write a summary")
    common(p_sim)
    p_sim.add_argument("--trace", action="store_true",
                       help="also write one trace CSV per replication")
    p_sweep = sub.add_parser("sweep", help="solve+simulate over a parameter grid")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, help=f"one of {SWEEP_AXES}")
    p_sweep.add_argument("--grid", required=True, help="comma-separated values")
    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=sorted(SUITES) + ["all"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "verify":
            return cmd_verify(args)
        parser.error(f"unknown command {args.command!r}")
    except (eqm.NoSignalRegime, bel.InfeasibleMix) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
