"""Tests for the command-line surface: formats, exit codes, determinism."""

import pytest

from lotto_precommit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGLPayoff:
    def test_worked_example(self, capsys):
        code, out, _ = run_cli(capsys, "gl-payoff", "--xa", "2", "--xb", "1", "--v", "0.5,0.5")
        assert code == 0
        assert out == "piA=0.75 piB=0.25\n"

    def test_missing_flag_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "gl-payoff", "--xa", "2", "--xb", "1")
        assert code == 2
        assert err.startswith("error:")

    def test_malformed_number_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "gl-payoff", "--xa", "two", "--xb", "1", "--v", "1")
        assert code == 2
        assert "--xa" in err

    def test_domain_error_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "gl-payoff", "--xa", "-1", "--xb", "1", "--v", "1")
        assert code == 2
        assert err.startswith("error:")

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gl-payoff", "--bogus", "1"])
        assert exc.value.code == 2


class TestGLPrecommit:
    def test_optimize_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "gl-precommit", "--xa", "1", "--xb", "1.5",
            "--v", "0.6,0.4", "--battlefield", "0",
        )
        assert code == 0
        assert "uB=0.7 " in out
        assert "attained=false" in out
        assert "threshold=0.555555556" in out

    def test_evaluate_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "gl-precommit", "--xa", "1", "--xb", "3.3",
            "--v", "0.333,0.333,0.334", "--targets", "0,1,2", "--p", "1.1,1.1,1.1",
        )
        assert code == 0
        assert "matched=-" in out
        assert "uB=1 " in out or "uB=1\n" in out

    def test_needs_a_mode(self, capsys):
        code, _, err = run_cli(capsys, "gl-precommit", "--xa", "1", "--xb", "1.5", "--v", "0.6,0.4")
        assert code == 2
        assert "battlefield" in err


class TestGGLSolve:
    def test_worked_example(self, capsys):
        code, out, _ = run_cli(capsys, "ggl-solve", "--alpha", "0.25", "--xa", "2", "--xb", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "alpha,xa,xb,n_equilibria,sigma,piA,piB,rank"
        assert lines[1] == "0.25,2,1,1,4.66666667,0.892857143,0.25,1"

    def test_three_equilibria_ranked(self, capsys):
        code, out, _ = run_cli(capsys, "ggl-solve", "--alpha", "0.15", "--xa", "1", "--xb", "0.98")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 4
        pi_b = [float(line.split(",")[6]) for line in lines[1:]]
        assert pi_b[0] > pi_b[1] > pi_b[2]

    def test_alpha_domain_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "ggl-solve", "--alpha", "0.7", "--xa", "1", "--xb", "1")
        assert code == 2
        assert "alpha" in err


class TestGGLPrecommit:
    def test_evaluate_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "ggl-precommit", "--alpha", "0.25", "--xa", "1", "--xb", "1",
            "--battlefield", "1", "--p", "0.6666666666666666",
        )
        assert code == 0
        assert "response=withdraw" in out
        assert "uB=0.791666667" in out

    def test_optimize_mode_reports_verdict(self, capsys):
        code, out, _ = run_cli(
            capsys, "ggl-precommit", "--alpha", "0.15", "--xa", "1", "--xb", "0.98"
        )
        assert code == 0
        assert "best_b=1" in out
        assert "n_equilibria=3" in out
        assert "beats=true" in out


class TestSweepOutputs:
    def test_mc_fig5_deterministic_bytes(self, capsys, tmp_path):
        path_a = tmp_path / "a.csv"
        path_b = tmp_path / "b.csv"
        for path in (path_a, path_b):
            code, _, _ = run_cli(
                capsys, "mc-fig5", "--samples", "12", "--seed", "7", "--out", str(path)
            )
            assert code == 0
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_mc_fig5_stdout_schema(self, capsys):
        code, out, _ = run_cli(capsys, "mc-fig5", "--samples", "5", "--seed", "1")
        assert code == 0
        header = out.splitlines()[0]
        assert header == "vbar,n_samples,mean_uB_single,mean_uB_double,pct_beneficial"
        assert len(out.splitlines()) == 22

    def test_gl_region_schema_and_plot(self, capsys, tmp_path):
        path = tmp_path / "region.csv"
        code, _, _ = run_cli(
            capsys, "gl-region", "--xa-min", "0.5", "--xa-max", "2", "--xa-steps", "6",
            "--xb-min", "0.5", "--xb-max", "2", "--xb-steps", "6",
            "--vbar", "0.55", "--out", str(path), "--plot",
        )
        assert code == 0
        header = path.read_text().splitlines()[0]
        assert header == "xa,xb,vbar,phi,incentive,threshold,sup_uB,nominal_uB,improvement_pct"
        assert (tmp_path / "region.png").exists()

    def test_plot_without_out_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "gl-region", "--xa-min", "0.5", "--xa-max", "2", "--xa-steps", "3",
            "--xb-min", "0.5", "--xb-max", "2", "--xb-steps", "3",
            "--vbar", "0.55", "--plot",
        )
        assert code == 2
        assert "--out" in err

    def test_ggl_region_single_cell(self, capsys):
        code, out, _ = run_cli(
            capsys, "ggl-region", "--alpha", "0.15", "--xa", "1", "--xb", "0.98"
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("alpha,xa,xb,n_equilibria")
        assert ",blue," in lines[1]

    def test_ggl_region_axis_requires_bounds(self, capsys):
        code, _, err = run_cli(
            capsys, "ggl-region", "--alpha", "0.15", "--xa-min", "0.5", "--xb", "1"
        )
        assert code == 2
        assert "xa" in err


class TestVerify:
    def test_verify_passes_and_schema(self, capsys):
        code, out, _ = run_cli(capsys, "verify")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "quantity,closed_form,oracle,gap,pass"
        assert all(line.endswith(",true") for line in lines[1:])


class TestConfigFile:
    def test_config_supplies_values(self, capsys, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("xa=2\nxb=1\nv=0.5,0.5\n")
        code, out, _ = run_cli(capsys, "gl-payoff", "--config", str(config))
        assert code == 0
        assert out == "piA=0.75 piB=0.25\n"

    def test_cli_flags_override_config(self, capsys, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("xa=2\nxb=1\nv=0.5,0.5\n")
        code, out, _ = run_cli(capsys, "gl-payoff", "--config", str(config), "--xa", "1")
        assert code == 0
        assert out == "piA=0.5 piB=0.5\n"

    def test_missing_config_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "gl-payoff", "--config", "/nonexistent/x.cfg")
        assert code == 2
        assert "config" in err

    def test_malformed_config_line_exits_2(self, capsys, tmp_path):
        config = tmp_path / "bad.cfg"
        config.write_text("xa 2\n")
        code, _, err = run_cli(capsys, "gl-payoff", "--config", str(config))
        assert code == 2
        assert "key=value" in err
