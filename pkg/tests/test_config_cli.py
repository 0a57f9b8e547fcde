"""Config round-trip, presets, CLI subcommands, and exit codes."""

import pytest
import yaml

from olg_signaling.cli import main
from olg_signaling.config import (
    ProfileOptions,
    WorldConfig,
    parse_config,
    preset,
    serialize_config,
)
from olg_signaling.params import symmetric_primitives


def test_config_roundtrip_defaults():
    cfg = WorldConfig(seed=42)
    assert parse_config(serialize_config(cfg)) == cfg


def test_config_roundtrip_everything_set():
    cfg = WorldConfig(
        primitives=symmetric_primitives(mu=0.37, eps=0.07, k=0.11, g=0.29,
                                        ell=0.61, q_leak=0.13, rho=0.017),
        profile="conflict_trap",
        profile_options=ProfileOptions(q0_at_empty=0.9, respond_to_record=True),
        s=0.41, horizon=123, replications=7, seed=99,
        force_types=("normal", "bad"), conflict_definition="both_c",
        initial_h="b",
    )
    assert parse_config(serialize_config(cfg)) == cfg


def test_config_rejects_unknown_keys():
    text = serialize_config(WorldConfig()) + "\nbogus_key: 1\n"
    with pytest.raises(ValueError):
        parse_config(text)


def test_config_validation():
    with pytest.raises(ValueError):
        WorldConfig(profile="nope")
    with pytest.raises(ValueError):
        WorldConfig(replications=0)
    with pytest.raises(ValueError):
        WorldConfig(conflict_definition="at-least-one")
    with pytest.raises(ValueError):
        WorldConfig(force_types=("normal", "weird"))
    with pytest.raises(ValueError):
        WorldConfig(seed=-1)


def test_presets():
    assert preset("fig1").primitives.k == 0.3
    assert preset("fig2").force_types == ("normal", "normal")
    assert preset("fig3").primitives.q_leak == 0.2
    assert preset("fig3").profile == "peace_trap"
    with pytest.raises(ValueError):
        preset("fig9")


def test_cli_solve_ok(capsys):
    assert main(["solve", "--preset", "fig1"]) == 0
    out = capsys.readouterr().out
    assert "q1          0.663461538" in out
    assert "high_cost" in out


def test_cli_solve_band_exceeded(tmp_path, capsys):
    cfg = WorldConfig(primitives=symmetric_primitives(0.6, 0.1, 0.7, 0.3, 0.6))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    assert main(["solve", "--config", str(path)]) == 3
    assert "band exceeded" in capsys.readouterr().out


def test_cli_solve_infeasible_beliefs(tmp_path, capsys):
    text = serialize_config(WorldConfig())
    data = yaml.safe_load(text)
    data["belief_env"].update(mu=0.2, pi_b=0.3)
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(data))
    assert main(["solve", "--config", str(path)]) == 3
    out = capsys.readouterr().out
    assert "s_min" in out


def test_cli_simulate_requires_seed(capsys):
    assert main(["simulate"]) == 2


def test_cli_simulate_writes_summary_and_trace(tmp_path, capsys):
    cfg = WorldConfig(horizon=300, replications=2, force_types=("normal", "normal"))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    rc = main(["simulate", "--config", str(path), "--seed", "5",
               "--out", str(tmp_path / "out"), "--trace"])
    assert rc == 0
    summary = yaml.safe_load((tmp_path / "out" / "summary.yaml").read_text())
    assert summary["seed"] == 5
    assert summary["hazard"]["canonical"]["estimate"] is not None
    assert (tmp_path / "out" / "trace_rep0000.csv").exists()
    assert (tmp_path / "out" / "trace_rep0001.csv").exists()


def test_cli_simulate_deterministic_summary(tmp_path):
    cfg = WorldConfig(horizon=500, replications=3, force_types=("normal", "normal"))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    main(["simulate", "--config", str(path), "--seed", "9", "--out", str(tmp_path / "a")])
    main(["simulate", "--config", str(path), "--seed", "9", "--out", str(tmp_path / "b")])
    assert ((tmp_path / "a" / "summary.yaml").read_bytes()
            == (tmp_path / "b" / "summary.yaml").read_bytes())


def test_cli_sweep_outputs_table(tmp_path, capsys):
    cfg = WorldConfig(horizon=2_000, replications=1, force_types=("normal", "normal"))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    rc = main(["sweep", "--config", str(path), "--seed", "7", "--axis", "k",
               "--grid", "0.05,0.3,0.8", "--out", str(tmp_path / "out")])
    assert rc == 0
    lines = (tmp_path / "out" / "sweep.tsv").read_text().splitlines()
    assert lines[0].startswith("axis\tvalue\tregime")
    assert len(lines) == 4
    regimes = [line.split("\t")[2] for line in lines[1:]]
    assert regimes == ["low_cost", "high_cost", "no_signal"]


def test_cli_sweep_rejects_empty_grid(capsys):
    assert main(["sweep", "--seed", "1", "--axis", "k", "--grid", ","]) == 2


def test_cli_sweep_hazard_column_matches_figure_formula(tmp_path):
    cfg = WorldConfig(horizon=20_000, replications=2, force_types=("normal", "normal"))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    main(["sweep", "--config", str(path), "--seed", "11", "--axis", "k",
          "--grid", "0.2,0.4,0.6", "--out", str(tmp_path / "out")])
    rows = (tmp_path / "out" / "sweep.tsv").read_text().splitlines()[1:]
    for row in rows:
        cols = row.split("\t")
        k, q1 = float(cols[1]), float(cols[3])
        analytic, emp, se = float(cols[5]), float(cols[6]), float(cols[7])
        assert analytic == pytest.approx(1 - 0.6 * q1, abs=1e-9)
        assert abs(emp - analytic) <= 4 * se


def test_cli_sweep_deterministic_output(tmp_path):
    cfg = WorldConfig(horizon=1_500, replications=2, force_types=("normal", "normal"))
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    for d in ("a", "b"):
        main(["sweep", "--config", str(path), "--seed", "3", "--axis", "eps",
              "--grid", "0.05,0.1,0.2", "--out", str(tmp_path / d)])
    assert ((tmp_path / "a" / "sweep.tsv").read_bytes()
            == (tmp_path / "b" / "sweep.tsv").read_bytes())


def test_cli_sweep_leak_lengthens_spells(tmp_path):
    # with the strict failure response, higher leak probability weakly raises
    # the censored-adjusted spell duration
    cfg = WorldConfig(
        primitives=symmetric_primitives(0.6, 0.1, 0.05, 0.3, 0.6),
        s=0.5, horizon=4_000, replications=4, force_types=("normal", "normal"),
        profile_options=ProfileOptions(respond_to_record=True),
    )
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    main(["sweep", "--config", str(path), "--seed", "31", "--axis", "q_leak",
          "--grid", "0,0.05,0.1", "--out", str(tmp_path / "out")])
    rows = (tmp_path / "out" / "sweep.tsv").read_text().splitlines()[1:]
    adjusted = [float(r.split("\t")[9]) for r in rows]
    assert adjusted[0] == pytest.approx(10.0, abs=1.0)
    assert adjusted[0] <= adjusted[1] <= adjusted[2]


def test_cli_verify_passes():
    assert main(["verify", "equilibrium_ic"]) == 0


def test_cli_mutually_exclusive_config_and_preset(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(WorldConfig()))
    assert main(["solve", "--config", str(path), "--preset", "fig1"]) == 2
