"""Acceptance criteria at the reference configuration.

Reference: m1=1, m2=2, mu=nu=0.1, rho1*=rho2*=1, L=1, wall boundaries,
n=128, dt=1e-3, perturbation eps=1e-2.  Each criterion prints one PASS/FAIL
line (run with `pytest -s tests/test_acceptance.py` to see them inline).
"""

import numpy as np
import pytest

from mixtura.discretization import Grid1D
from mixtura.dynamics import SimConfig, run
from mixtura.lagrangian import remainder_scaling_sweep, v0_identity_residual
from mixtura.linear_analysis import (assemble_constant,
                                     energy_dissipation_check, spectrum)
from mixtura.mms import spatial_convergence, temporal_convergence
from mixtura.model import (MixtureParams, PointState, equilibrium_coefficients,
                           flux_closed_form, flux_entropic,
                           gradient_reconstruction)

PARAMS = MixtureParams(m1=1.0, m2=2.0, mu=0.1, nu=0.1)
GRID = Grid1D(n=128, length=1.0, bc="wall")
DT = 1e-3
EPSILON = 1e-2


def reference_config(formulation, t_end, ic_type="perturbation", **kw):
    return SimConfig(params=PARAMS, grid=GRID, dt=DT, t_end=t_end,
                     formulation=formulation, ic_type=ic_type,
                     epsilon=EPSILON, mode=1, rho1_star=1.0, rho2_star=1.0,
                     **kw)


def criterion(number, name, ok, detail):
    print(f"[criterion {number:02d}] {name}: {'PASS' if ok else 'FAIL'} "
          f"({detail})")
    assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def decay_run():
    """Reference perturbed entropic run to t = 10, sampled every step."""
    state, records = run(reference_config("entropic", t_end=10.0))
    return state, records


@pytest.fixture(scope="module")
def reference_spectrum():
    coeffs = equilibrium_coefficients(1.0, 1.0, PARAMS)
    op = assemble_constant(coeffs, GRID, PARAMS)
    return op, spectrum(op)


def test_criterion_01_conservation():
    drifts = {}
    for formulation in ("entropic", "primitive"):
        cfg = reference_config(formulation, t_end=1.0, output_every=1000)
        _, records = run(cfg)
        first, last = records[0], records[-1]
        drifts[f"{formulation}/total"] = (
            abs(last.mass_total - first.mass_total) / first.mass_total)
        if formulation == "primitive":
            drifts["primitive/mass1"] = abs(last.mass1 - first.mass1) / first.mass1
            drifts["primitive/mass2"] = abs(last.mass2 - first.mass2) / first.mass2
    worst = max(drifts.values())
    criterion(1, "mass conservation over 1000 steps", worst <= 1e-12,
              f"worst relative drift {worst:.3e}")


def test_criterion_02_equilibrium_fixed_point():
    worst = 0.0
    for formulation in ("entropic", "primitive"):
        cfg = reference_config(formulation, t_end=0.1, ic_type="equilibrium")
        _, records = run(cfg)
        last = records[-1]
        worst = max(worst, last.l2_zeta, last.l2_u, last.l2_h,
                    last.linf_zeta, last.linf_u, last.linf_h)
    criterion(2, "equilibrium fixed point after 100 steps", worst <= 1e-12,
              f"largest perturbation norm {worst:.3e}")


def test_criterion_03_positivity_band(decay_run):
    _, records = decay_run
    lo = min(min(r.min_rho1 for r in records), min(r.min_rho2 for r in records))
    hi = max(max(r.max_rho1 for r in records), max(r.max_rho2 for r in records))
    ok = lo >= 0.25 and hi <= 4.0
    criterion(3, "densities inside [rho*/4, 4 rho*] for t <= 10", ok,
              f"observed range [{lo:.4f}, {hi:.4f}]")


def test_criterion_04_spectral_gap(reference_spectrum):
    _, report = reference_spectrum
    nonzero = report.eigenvalues[np.abs(report.eigenvalues) >= 1e-10]
    gap_ok = bool(np.all(nonzero.real < 0.0)) and report.decay_rate > 0.0
    ok = report.zero_mode_count == 2 and gap_ok
    criterion(4, "exactly 2 zero modes and a spectral gap", ok,
              f"zero modes {report.zero_mode_count}, "
              f"gamma {report.decay_rate:.6f}")


def test_criterion_05_decay_rate_matches_spectrum(decay_run, reference_spectrum):
    _, records = decay_run
    _, report = reference_spectrum
    t = np.array([r.t for r in records])
    norm = np.array([np.sqrt(r.l2_zeta ** 2 + r.l2_u ** 2 + r.l2_h ** 2)
                     for r in records])
    mask = t >= 0.2 * t[-1]
    fitted = -np.polyfit(t[mask], np.log(norm[mask]), 1)[0]
    rel = abs(fitted - report.decay_rate) / report.decay_rate
    criterion(5, "nonlinear decay rate within 20% of spectral rate",
              rel <= 0.20,
              f"fitted {fitted:.4f} vs spectral {report.decay_rate:.4f} "
              f"({100 * rel:.2f}%)")


def test_criterion_06_energy_dissipation(reference_spectrum):
    op, _ = reference_spectrum
    report = energy_dissipation_check(op, trials=100, seed=0)
    ok = report.all_dissipative and report.max_residual_rel <= 1e-11
    criterion(6, "energy non-increasing with cancelled cross terms", ok,
              f"max residual {report.max_residual_rel:.3e}, "
              f"dissipative {report.all_dissipative}")


def test_criterion_07_formulation_equivalence():
    from mixtura.cli import _equivalence_diff

    base = reference_config("entropic", t_end=1.0)
    d32 = _equivalence_diff(base, 32, 2e-3)
    d64 = _equivalence_diff(base, 64, 5e-4)
    total32, total64 = max(d32.values()), max(d64.values())
    dx32 = 1.0 / 32
    ratio = total32 / total64
    ok = total32 <= 1.0 * dx32 ** 2 and 3.0 <= ratio <= 5.0
    criterion(7, "formulation difference O(dx^2) with ratio in [3, 5]", ok,
              f"Linf {total32:.3e} at n=32, doubling ratio {ratio:.2f}")


def test_criterion_08_flux_form_identity():
    rng = np.random.default_rng(42)
    n = 1000
    state = PointState(rho1=rng.uniform(0.2, 3.0, n),
                       rho2=rng.uniform(0.2, 3.0, n))
    grad_rho = rng.uniform(-2.0, 2.0, n)
    grad_h = rng.uniform(-2.0, 2.0, n)
    g1, g2 = gradient_reconstruction(state, grad_rho, grad_h, PARAMS)
    diff = np.max(np.abs(flux_closed_form(state, g1, g2, PARAMS)
                         - flux_entropic(state, grad_h, PARAMS)))
    criterion(8, "closed-form flux equals entropic flux", diff <= 1e-13,
              f"max pointwise difference {diff:.3e}")


def test_criterion_09_lagrangian_algebra():
    identity = v0_identity_residual(seed=0, trials=100)
    sweep = remainder_scaling_sweep(PARAMS, Grid1D(n=64, length=1.0, bc="wall"))
    slopes = sweep["slopes"]
    ok = (identity <= 1e-13 and sweep["zero_history_max"] == 0.0
          and all(s >= 1.9 for s in slopes.values()))
    criterion(9, "V0 identity, remainder scaling, zero-history", ok,
              f"identity {identity:.2e}, slopes "
              + ", ".join(f"{k}={v:.2f}" for k, v in slopes.items()))


def test_criterion_10_mms_orders():
    base = SimConfig(params=PARAMS, grid=Grid1D(n=32, length=1.0, bc="wall"),
                     dt=1e-3, t_end=0.25, formulation="primitive")
    _, sorders = spatial_convergence(base, ns=(32, 64, 128))
    fine = SimConfig(params=PARAMS, grid=GRID, dt=1e-3, t_end=0.5,
                     formulation="primitive")
    _, torders = temporal_convergence(fine)
    ok = min(sorders) >= 1.8 and min(torders) >= 0.9
    criterion(10, "MMS spatial order >= 1.8 and temporal order >= 0.9", ok,
              f"spatial {[f'{o:.2f}' for o in sorders]}, "
              f"temporal {[f'{o:.2f}' for o in torders]}")
