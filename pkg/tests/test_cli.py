"""Experiment config parsing, validation, CLI verbs, and determinism."""

import json

import pytest

from robin_dnls.cli import main
from robin_dnls.errors import ConfigurationError
from robin_dnls.experiments import (
    ExperimentConfig,
    parse_config,
    run_experiment,
    sweep,
    validate_config,
)


def write_config(path, **kv):
    lines = [f"{k} = {v}" for k, v in kv.items()]
    path.write_text("# test config\n" + "\n".join(lines) + "\n")
    return path


class TestParseConfig:
    def test_basic(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="x", kind="profile",
                         omega=1.5, alpha=-0.25, grid_n=401)
        cfg = parse_config(p)
        assert cfg.name == "x"
        assert cfg.omega == 1.5
        assert cfg.grid_n == 401

    def test_aliases(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="x", kind="blowup",
                         A=2.0, seed=5)
        cfg = parse_config(p)
        assert cfg.amplitude == 2.0
        assert cfg.rng_seed == 5

    def test_lambda_key(self, tmp_path):
        p = tmp_path / "c.conf"
        p.write_text("name = x\nkind = instability\nlambda = 1.2\nalpha = 0.5\n")
        assert parse_config(p).lam == 1.2

    def test_parse_error_has_line(self, tmp_path):
        p = tmp_path / "c.conf"
        p.write_text("name = x\nkind = profile\nnonsense line\n")
        with pytest.raises(ConfigurationError, match=":3"):
            parse_config(p)

    def test_unknown_key(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="x", kind="profile", zz=1)
        with pytest.raises(ConfigurationError, match="unknown key"):
            parse_config(p)

    def test_unknown_kind(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="x", kind="dance")
        with pytest.raises(ConfigurationError, match="kind"):
            parse_config(p)


class TestValidate:
    def test_inadmissible_params(self):
        cfg = ExperimentConfig(name="x", kind="profile", omega=0.2, alpha=0.5)
        diag = validate_config(cfg)
        assert any("omega > alpha^2" in e for e in diag["errors"])

    def test_coarse_grid_warns(self):
        cfg = ExperimentConfig(name="x", kind="profile", grid_n=201)
        diag = validate_config(cfg)
        assert diag["errors"] == []
        assert any("0.02" in w for w in diag["warnings"])

    def test_blowup_negative_alpha_warns(self):
        cfg = ExperimentConfig(name="x", kind="blowup", alpha=-1.0)
        diag = validate_config(cfg)
        assert any("alpha > 0" in w for w in diag["warnings"])

    def test_valid_stability_clean(self):
        cfg = ExperimentConfig(name="x", kind="stability", alpha=-0.5, delta=1e-3)
        diag = validate_config(cfg)
        assert diag == {"errors": [], "warnings": []}


class TestRunAndSummaries:
    def test_profile_run(self, tmp_path):
        cfg = ExperimentConfig(name="p", kind="profile", alpha=-0.5,
                               output_dir=str(tmp_path))
        s = run_experiment(cfg)
        assert s.passed
        assert (tmp_path / "p" / "profile.csv").exists()
        summary = json.loads((tmp_path / "p" / "summary.json").read_text())
        assert summary["passed"] is True
        for a in summary["assertions"]:
            assert a["tolerance"]  # every assertion carries its tolerance

    def test_determinism_byte_identical(self, tmp_path):
        outputs = []
        for sub in ("a", "b"):
            cfg = ExperimentConfig(name="det", kind="evolve", alpha=-0.5,
                                   delta=1e-3, t_end=0.05, grid_n=401,
                                   sample_every=10,
                                   output_dir=str(tmp_path / sub))
            run_experiment(cfg)
            outputs.append((tmp_path / sub / "det" / "evolve.records.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_sweep_combined_csv(self, tmp_path):
        cfg = ExperimentConfig(name="sw", kind="profile", alpha=-0.5,
                               grid_n=801, output_dir=str(tmp_path))
        summaries = sweep(cfg, "omega", [0.5, 1.0, 2.0])
        assert len(summaries) == 3
        combined = (tmp_path / "sw_sweep_omega.csv").read_text().splitlines()
        assert combined[0].startswith("param,")
        assert len(combined) == 4
        # monotone mass column
        import csv

        rows = list(csv.DictReader(combined))
        masses = [float(r["l2sq"]) for r in rows]
        assert masses == sorted(masses)
        assert masses[0] < masses[1] < masses[2]

    def test_sweep_bad_parameter(self, tmp_path):
        from robin_dnls.errors import ParameterError

        cfg = ExperimentConfig(name="sw", kind="profile",
                               output_dir=str(tmp_path))
        with pytest.raises(ParameterError):
            sweep(cfg, "banana", [1.0])


class TestCliMain:
    def test_profile_verb(self, tmp_path, capsys):
        rc = main(["profile", "--alpha", "-0.5", "--out", str(tmp_path)])
        assert rc == 0
        assert "PASS" in capsys.readouterr().out

    def test_validate_verb(self, tmp_path, capsys):
        p = write_config(tmp_path / "c.conf", name="x", kind="profile",
                         omega=0.2, alpha=0.5)
        rc = main(["validate", str(p)])
        assert rc == 1

    def test_validate_ok(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="x", kind="profile")
        assert main(["validate", str(p), "--quiet"]) == 0

    def test_run_verb(self, tmp_path):
        p = write_config(tmp_path / "c.conf", name="r", kind="profile",
                         alpha=-0.5, output_dir=str(tmp_path / "out"))
        assert main(["run", str(p), "--quiet"]) == 0
        assert (tmp_path / "out" / "r" / "summary.json").exists()

    def test_missing_config_is_error(self, capsys):
        rc = main(["run", "/nonexistent/config.conf"])
        assert rc == 2
        assert "error" in capsys.readouterr().err
