import subprocess
import sys

import pytest


def simulator(args, cwd):
    """Invoke the simulator CLI; the renderer consumes only its CSV files."""
    proc = subprocess.run([sys.executable, "-m", "keensim", *args],
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    """CSV fixtures produced by the simulator CLI, shared across tests."""
    out = tmp_path_factory.mktemp("csv")
    quiet = ["--set", "sigma=0", "--set", "lambda_up=0",
             "--set", "lambda_down=0", "--set", "rho_1=0"]
    simulator(["simulate", *quiet, "--out", "low_rate.csv"], out)
    simulator(["simulate", *quiet, "--set", "r_l=0.15", "--set", "mu0=0.15",
               "--out", "high_rate.csv"], out)
    simulator(["simulate", "--set", "t_end=50", "--out", "stochastic.csv",
               "--jumps-out", "stochastic.jumps.csv"], out)
    simulator(["sweep", "--axis", "r_l:0.017:0.025:5", "--runs", "200",
               "--out", "sweep_r_l.csv"], out)
    simulator(["heatmap", "--axis", "eta_mu:0.15:0.7:3",
               "--axis", "rho_2:3:9:3", "--runs", "60",
               "--out", "grid_eta_rho.csv"], out)
    simulator(["heatmap", "--axis", "r_l:0.017:0.025:3",
               "--axis", "sigma:0.07:0.19:3", "--runs", "60",
               "--out", "grid_rl_sigma.csv"], out)
    return out
