"""Renderer acceptance gate (A10).

Runs the installed ``keensim-render`` script on real simulator outputs:
the two noise-free trajectory panels, a monotone sensitivity curve with
its interval band, and both heatmaps; a repeated invocation must be
byte-identical.  Prints one PASS/FAIL line.
"""

import subprocess
import sys
import time

import numpy as np

from keensim_figures import read_table

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _render_cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "keensim_figures.cli", *args],
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def test_a10_renderer(artifact_dir, tmp_path):
    t0 = time.time()
    checks = []

    for name in ("low_rate", "high_rate"):
        out = tmp_path / f"{name}.png"
        _render_cli(["trajectory", str(artifact_dir / f"{name}.csv"), str(out)],
                    tmp_path)
        checks.append((f"{name} panel", out.read_bytes().startswith(PNG_MAGIC)))

    sweep_csv = artifact_dir / "sweep_r_l.csv"
    sweep_png = tmp_path / "sweep.png"
    _render_cli(["sweep", str(sweep_csv), str(sweep_png)], tmp_path)
    p_hat = read_table(str(sweep_csv)).column("p_hat")
    checks.append(("sweep figure", sweep_png.read_bytes().startswith(PNG_MAGIC)))
    checks.append(("sweep data monotone", bool(np.all(np.diff(p_hat) >= 0.0))))

    for grid in ("grid_eta_rho", "grid_rl_sigma"):
        out = tmp_path / f"{grid}.png"
        _render_cli(["heatmap", str(artifact_dir / f"{grid}.csv"), str(out)],
                    tmp_path)
        checks.append((f"{grid} heatmap", out.read_bytes().startswith(PNG_MAGIC)))

    first = sweep_png.read_bytes()
    _render_cli(["sweep", str(sweep_csv), str(sweep_png)], tmp_path)
    checks.append(("byte-identical rerun", sweep_png.read_bytes() == first))

    passed = all(ok for _, ok in checks)
    detail = ", ".join(f"{name}: {'ok' if ok else 'FAILED'}"
                       for name, ok in checks)
    line = (f"A10: {'PASS' if passed else 'FAIL'} — {detail} "
            f"[{time.time() - t0:.1f}s]")
    print(line, file=sys.__stdout__, flush=True)
    assert passed, line
