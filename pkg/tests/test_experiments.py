import numpy as np
import pytest

from sqitest.cli import main
from sqitest.experiments import (
    ExperimentConfig,
    run_curve,
    run_verify,
)
from sqitest.phase_space import SqueezeParam


def read_curve(path):
    comments, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(t) for t in line.split(",")])
    return comments, header, np.array(rows)


class TestExperimentConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(theta_steps=0)
        with pytest.raises(ValueError):
            ExperimentConfig(theta_min=2.0, theta_max=1.0)
        with pytest.raises(ValueError):
            ExperimentConfig(reps=-1)
        with pytest.raises(ValueError):
            ExperimentConfig(alpha=0.0)

    def test_single_point_grid_allowed(self):
        cfg = ExperimentConfig(theta_min=0.0, theta_max=0.0, theta_steps=1)
        assert cfg.theta_grid.tolist() == [0.0]

    def test_from_text(self):
        text = """
        m = 1
        n = 3
        N = 0.5
        alpha = 0.1
        theta_steps = 5
        eta = zero L-imag-theta
        seed = 42
        out = x.csv
        """
        cfg = ExperimentConfig.from_text(text)
        assert cfg.copies == 3 and cfg.mixture == 0.5 and cfg.alpha == 0.1
        assert cfg.etas == ("zero", "L-imag-theta")
        assert cfg.seed == 42 and cfg.out == "x.csv"


class TestRunCurve:
    def test_zero_grid_gives_trivial_row(self, tmp_path):
        out = tmp_path / "c.csv"
        cfg = ExperimentConfig(theta_min=0.0, theta_max=0.0, theta_steps=1,
                               out=str(out))
        run_curve(cfg)
        _, header, rows = read_curve(out)
        assert rows.shape[0] == 1
        for name, val in zip(header, rows[0]):
            if name.startswith("beta"):
                assert val == pytest.approx(0.95, abs=1e-9)

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_curve(ExperimentConfig(theta_steps=4, theta_max=1.0, reps=500,
                                   seed=3, out=str(a)))
        run_curve(ExperimentConfig(theta_steps=4, theta_max=1.0, reps=500,
                                   seed=3, out=str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_header_echoes_config(self, tmp_path):
        out = tmp_path / "c.csv"
        run_curve(ExperimentConfig(theta_steps=2, theta_max=1.0, seed=11,
                                   out=str(out)))
        comments, header, _ = read_curve(out)
        joined = "\n".join(comments)
        assert "# seed = 11" in joined and "# n = 3" in joined
        assert header[0] == "theta" and "beta_si" in header
        assert "beta_hh_eta0" in header
        assert "beta_hh_etaL_real" in header and "beta_hh_etaL_imag" in header

    def test_default_grid_has_invariant_test_ahead(self, tmp_path):
        # on the desk grid the invariant test dominates; the far-tail
        # reversal (near theta = 31 at this level) is exercised by the
        # crossing tests
        out = tmp_path / "c.csv"
        run_curve(ExperimentConfig(theta_steps=7, theta_max=3.0, out=str(out)))
        _, header, rows = read_curve(out)
        si = rows[1:, header.index("beta_si")]
        hh = rows[1:, header.index("beta_hh_eta0")]
        assert np.all(si < hh)

    def test_monte_carlo_columns(self, tmp_path):
        out = tmp_path / "c.csv"
        run_curve(ExperimentConfig(theta_steps=2, theta_max=0.5, reps=2000,
                                   etas=("zero",), out=str(out)))
        _, header, rows = read_curve(out)
        assert "beta_hh_eta0_mc" in header and "beta_hh_eta0_stderr" in header
        i_mc = header.index("beta_hh_eta0_mc")
        i_an = header.index("beta_hh_eta0")
        i_se = header.index("beta_hh_eta0_stderr")
        for row in rows:
            assert abs(row[i_mc] - row[i_an]) < 5 * row[i_se]

    def test_two_copy_mixture_uses_lattice_route(self, tmp_path):
        out = tmp_path / "c.csv"
        with pytest.raises(ValueError):
            # HH is undefined at n = 2 (needs n > 2m): config must fail fast
            run_curve(ExperimentConfig(copies=2, mixture=0.5, theta_steps=2,
                                       theta_max=0.5, out=str(out)))

    def test_mixture_without_closed_form_noted(self, tmp_path):
        out = tmp_path / "c.csv"
        run_curve(ExperimentConfig(copies=3, mixture=0.5, theta_steps=2,
                                   theta_max=0.5, etas=("zero",), out=str(out)))
        comments, header, rows = read_curve(out)
        assert any("note" in c for c in comments)
        assert np.isnan(rows[:, header.index("beta_si")]).all()

    def test_eta_file_entry(self, tmp_path):
        eta_path = tmp_path / "myeta.txt"
        eta_path.write_text(SqueezeParam.axis_family(1.5).to_text())
        out = tmp_path / "c.csv"
        run_curve(ExperimentConfig(theta_steps=2, theta_max=0.5,
                                   etas=("zero", str(eta_path)), out=str(out)))
        _, header, _ = read_curve(out)
        assert "beta_hh_eta_myeta" in header

    def test_unknown_eta_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            run_curve(ExperimentConfig(etas=("bogus",), theta_steps=2,
                                       theta_max=1.0, out=str(tmp_path / "c.csv")))


class TestRunVerify:
    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_verify("nope")

    def test_distributions_suite_passes(self):
        report = run_verify("distributions")
        assert report.failures == 0
        text = report.format()
        assert "[PASS]" in text and "failed" in text

    def test_budget_exhaustion_skips_with_warning(self):
        with pytest.warns(UserWarning):
            report = run_verify("fock", budget=100)
        assert report.failures == 0
        assert any(c.status == "SKIP" for c in report.checks)


class TestCli:
    def test_curve_command(self, tmp_path, capsys):
        out = tmp_path / "c.csv"
        code = main(["curve", "--theta-steps", "3", "--theta-max", "1.0",
                     "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_flags_override_config_file(self, tmp_path):
        cfg_path = tmp_path / "cfg.txt"
        cfg_path.write_text("n = 3\nalpha = 0.2\ntheta_steps = 3\n"
                            f"out = {tmp_path / 'from_file.csv'}\n")
        out = tmp_path / "cli.csv"
        code = main(["curve", "--config", str(cfg_path), "--out", str(out),
                     "--theta-max", "1.0"])
        assert code == 0
        assert out.exists() and not (tmp_path / "from_file.csv").exists()
        comments, _, _ = read_curve(out)
        assert "# alpha = 0.2" in "\n".join(comments)  # file value survived

    def test_invalid_config_exits_nonzero(self, tmp_path, capsys):
        code = main(["curve", "--theta-steps", "0",
                     "--out", str(tmp_path / "c.csv")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_verify_command(self, tmp_path, capsys):
        report_path = tmp_path / "report.txt"
        code = main(["verify", "distributions", "--out", str(report_path)])
        assert code == 0
        assert "[PASS]" in report_path.read_text()

    def test_unknown_suite_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["verify", "bogus"])
        assert err.value.code == 2
