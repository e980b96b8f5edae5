"""Command-line interface: subcommands, exit codes, and reproducible CSVs."""

import contextlib
import io

import pytest

from keensim.cli import run


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(argv)
    return code, out.getvalue(), err.getvalue()


FAST = ["--set", "t_end=30", "--set", "dt=0.01"]


class TestSimulate:
    def test_writes_trajectory_and_jump_csvs(self, tmp_path):
        out = tmp_path / "run.csv"
        code, _, _ = invoke(["simulate", *FAST, "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert "seed=0" in lines[0]
        assert lines[1] == "t,omega,e,m,ell,pi,f,r,premium,S,S_disc,mu"
        assert len(lines) == 2 + 151  # header, columns, one row per 0.2y
        jumps = (tmp_path / "run.jumps.csv").read_text().splitlines()
        assert jumps[1] == "t,kind,factor"

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert invoke(["simulate", *FAST, "--out", str(a)])[0] == 0
        assert invoke(["simulate", *FAST, "--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_set_overrides_reflected_in_header(self, tmp_path):
        out = tmp_path / "run.csv"
        code, _, _ = invoke(["simulate", *FAST, "--set", "sigma=0.25",
                             "--set", "seed=9", "--out", str(out)])
        assert code == 0
        head = out.read_text().splitlines()[0]
        assert "sigma=0.25" in head
        assert "seed=9" in head

    def test_set_composes_left_to_right(self, tmp_path):
        out = tmp_path / "run.csv"
        invoke(["simulate", *FAST, "--set", "sigma=0.25",
                "--set", "sigma=0.3", "--out", str(out)])
        assert "sigma=0.3" in out.read_text().splitlines()[0]

    def test_config_file_plus_set(self, tmp_path):
        cfg = tmp_path / "base.cfg"
        cfg.write_text("sigma = 0.25\nt_end = 30\ndt = 0.01\n")
        out = tmp_path / "run.csv"
        code, _, _ = invoke(["simulate", "--config", str(cfg),
                             "--set", "r_l=0.03", "--out", str(out)])
        assert code == 0
        head = out.read_text().splitlines()[0]
        assert "sigma=0.25" in head and "r_l=0.03" in head

    def test_run_index_changes_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        invoke(["simulate", *FAST, "--out", str(a)])
        invoke(["simulate", *FAST, "--run-index", "1", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()


class TestExitCodes:
    def test_usage_error(self, tmp_path):
        assert invoke(["simulate"])[0] == 2
        assert invoke(["no-such-command"])[0] == 2

    def test_bad_axis_spec(self, tmp_path):
        out = tmp_path / "s.csv"
        code, _, err = invoke(["sweep", "--axis", "r_l:zero:0.1:3",
                               "--out", str(out)])
        assert code == 2
        code, _, _ = invoke(["sweep", "--axis", "r_l:0.01:0.1:0",
                             "--out", str(out)])
        assert code == 2

    def test_unknown_set_key(self, tmp_path):
        code, _, err = invoke(["simulate", "--set", "sgima=0.2",
                               "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "sgima" in err

    def test_validation_failure(self, tmp_path):
        code, _, err = invoke(["simulate", "--set", "j_up=1.0",
                               "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "j_up" in err

    def test_config_parse_error(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("sigma 0.25\n")
        code, _, err = invoke(["simulate", "--config", str(cfg),
                               "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "line 1" in err

    def test_io_failure(self):
        code, _, err = invoke(["simulate", *FAST,
                               "--out", "/no/such/dir/x.csv"])
        assert code == 3

    def test_missing_config_file(self, tmp_path):
        code, _, _ = invoke(["simulate", "--config", str(tmp_path / "none.cfg"),
                             "--out", str(tmp_path / "x.csv")])
        assert code == 3


class TestSweep:
    def test_axis_expansion(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _, _ = invoke(["sweep", *FAST, "--axis", "r_l:0.01:0.03:3",
                             "--runs", "2", "--horizon", "30",
                             "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == ("param,value,n_runs,n_crisis,p_hat,"
                            "ci_low,ci_high,n_blowup,mean_crisis_time")
        assert len(lines) == 2 + 3
        values = [float(line.split(",")[1]) for line in lines[2:]]
        assert values == pytest.approx([0.01, 0.02, 0.03])

    def test_log_axis(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _, _ = invoke(["sweep", *FAST, "--axis", "eta_mu:0.1:10:3:log",
                             "--runs", "1", "--horizon", "30",
                             "--out", str(out)])
        assert code == 0
        values = [float(line.split(",")[1])
                  for line in out.read_text().splitlines()[2:]]
        assert values == pytest.approx([0.1, 1.0, 10.0])

    def test_byte_identical_reruns(self, tmp_path):
        args = ["sweep", *FAST, "--axis", "sigma:0.05:0.15:2",
                "--runs", "3", "--horizon", "30"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert invoke([*args, "--out", str(a)])[0] == 0
        assert invoke([*args, "--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()


class TestHeatmap:
    def test_grid_csv(self, tmp_path):
        out = tmp_path / "grid.csv"
        code, _, _ = invoke(["heatmap", *FAST,
                             "--axis", "r_l:0.01:0.03:2",
                             "--axis", "sigma:0.05:0.15:2",
                             "--runs", "2", "--horizon", "30",
                             "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "p1,p1_value,p2,p2_value,n_runs,p_hat"
        assert len(lines) == 2 + 4
        first = lines[2].split(",")
        assert (first[0], first[2]) == ("r_l", "sigma")

    def test_requires_two_axes(self, tmp_path):
        code, _, _ = invoke(["heatmap", *FAST, "--axis", "r_l:0.01:0.03:2",
                             "--runs", "1", "--out", str(tmp_path / "g.csv")])
        assert code == 2


class TestValidate:
    def test_moment_table(self):
        code, out, _ = invoke(["validate", "--runs", "50", "--horizon", "100"])
        assert code == 0
        assert "ou_mean" in out
        assert "jump_ou_up_kurtosis" in out
        assert "FAIL" not in out
