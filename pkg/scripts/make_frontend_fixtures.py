"""Regenerate frontend/testdata from a real reference run.

Usage: python3 scripts/make_frontend_fixtures.py

Writes series.csv / spectrum.json / convergence.csv plus expected.json,
which freezes the decay rate fitted by the primary convention (least
squares on the log of the combined L2 norm over the trailing 80% window)
for the frontend tests to reproduce within 1%.
"""

import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from mixtura.cli import main, write_series_csv  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]
TESTDATA = ROOT / "frontend" / "testdata"

CONFIG = """
[mixture]
m1 = 1.0
m2 = 2.0
mu = 0.1
nu = 0.1

[grid]
n = 64
length = 1.0
bc = wall

[time]
dt = 1e-3
t_end = 8.0
formulation = entropic
output_every = 10

[initial]
type = perturbation
epsilon = 1e-2
mode = 1

[output]
dir = {out}
"""


def fit_rate(series_path, window=0.8):
    rows = np.loadtxt(series_path, delimiter=",", skiprows=1)
    t = rows[:, 0]
    norm = np.sqrt(rows[:, 4] ** 2 + rows[:, 5] ** 2 + rows[:, 6] ** 2)
    mask = t >= (1.0 - window) * t[-1]
    slope, intercept = np.polyfit(t[mask], np.log(norm[mask]), 1)
    return -float(slope), float(intercept)


def main_fixtures():
    TESTDATA.mkdir(parents=True, exist_ok=True)
    cfg = TESTDATA / "fixture.cfg"
    cfg.write_text(CONFIG.format(out=TESTDATA))
    for command in ("simulate", "linearize", "convergence"):
        code = main([command, "--config", str(cfg), "--force"])
        assert code == 0, f"{command} failed with {code}"
    rate, _ = fit_rate(TESTDATA / "series.csv")
    spectrum = json.loads((TESTDATA / "spectrum.json").read_text())
    expected = {
        "window": 0.8,
        "primary_fitted_rate": rate,
        "spectrum_decay_rate": spectrum["decay_rate"],
    }
    (TESTDATA / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")
    for leftover in ("final_state.json", "manifest.json", "fixture.cfg",
                     "diagnostic.json"):
        p = TESTDATA / leftover
        if p.exists():
            p.unlink()
    print("fixtures written to", TESTDATA)
    print("primary fitted rate:", rate,
          "spectrum rate:", spectrum["decay_rate"])


if __name__ == "__main__":
    main_fixtures()
