"""Manufactured solutions for convergence verification.

A smooth (rho1, rho2, u) is chosen to respect the wall conditions (u and the
species gradients vanish at both walls, so the diffusive wall fluxes are
exactly zero), and sympy differentiates the governing equations to produce
the forcing that makes it an exact solution.  Both formulations get their
own source set so either stepper can be verified.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp

from .dynamics import SimConfig, mms_run
from .model import MixtureParams

__all__ = [
    "ManufacturedSolution",
    "default_manufactured",
    "spatial_convergence",
    "temporal_convergence",
    "observed_orders",
]


@dataclass
class _PrimitiveSources:
    rho1: Callable
    rho2: Callable
    u: Callable


@dataclass
class _EntropicSources:
    rho: Callable
    u: Callable
    h: Callable


@dataclass
class ManufacturedSolution:
    """Callable fields (x, t) plus the forcing for each formulation."""

    rho1: Callable
    rho2: Callable
    u: Callable
    rho: Callable
    h: Callable
    sources_primitive: _PrimitiveSources
    sources_entropic: _EntropicSources


def _lambdify(expr, x, t):
    fn = sp.lambdify((x, t), expr, modules="numpy")

    def wrapped(xv, tv):
        out = fn(np.asarray(xv, dtype=float), tv)
        return np.broadcast_to(np.asarray(out, dtype=float),
                               np.shape(xv)).copy()

    return wrapped


def default_manufactured(params: MixtureParams, length: float) -> ManufacturedSolution:
    """Stock smooth solution: wall-compatible cosine species, sine velocity."""
    x, t = sp.symbols("x t", real=True)
    m1, m2 = params.m1, params.m2
    mu, nu = params.mu, params.nu
    ll = length

    r1 = sp.Rational(1) + sp.Rational(12, 100) * sp.cos(2 * sp.pi * x / ll) * sp.cos(3 * t)
    r2 = sp.Rational(11, 10) + sp.Rational(8, 100) * sp.cos(sp.pi * x / ll) * sp.sin(2 * t)
    u = sp.Rational(5, 100) * sp.sin(sp.pi * x / ll) * (1 + sp.Rational(1, 2) * sp.sin(3 * t))

    rho = r1 + r2
    pres = r1 / m1 + r2 / m2
    h = sp.log(r2) / m2 - sp.log(r1) / m1

    flux1 = -(r2 / rho * sp.diff(r1 / m1, x) - r1 / rho * sp.diff(r2 / m2, x)) / pres
    s1 = sp.diff(r1, t) + sp.diff(r1 * u, x) + sp.diff(flux1, x)
    s2 = sp.diff(r2, t) + sp.diff(r2 * u, x) - sp.diff(flux1, x)
    s_u = (rho * (sp.diff(u, t) + u * sp.diff(u, x))
           - (mu + nu) * sp.diff(u, x, 2) + sp.diff(pres, x))

    sigma = m1 * r1 + m2 * r2
    c_h = m1 * m2 * r1 * r2 / sigma
    c_coup = (m1 - m2) * r1 * r2 / sigma
    c_diff = r1 * r2 / (pres * rho)
    s_rho = sp.diff(rho, t) + sp.diff(rho * u, x)
    s_h = (c_h * (sp.diff(h, t) + u * sp.diff(h, x))
           + c_coup * sp.diff(u, x)
           - sp.diff(c_diff * sp.diff(h, x), x))

    return ManufacturedSolution(
        rho1=_lambdify(r1, x, t),
        rho2=_lambdify(r2, x, t),
        u=_lambdify(u, x, t),
        rho=_lambdify(rho, x, t),
        h=_lambdify(h, x, t),
        sources_primitive=_PrimitiveSources(
            rho1=_lambdify(s1, x, t),
            rho2=_lambdify(s2, x, t),
            u=_lambdify(s_u, x, t),
        ),
        sources_entropic=_EntropicSources(
            rho=_lambdify(s_rho, x, t),
            u=_lambdify(s_u, x, t),
            h=_lambdify(s_h, x, t),
        ),
    )


def _config_for(base: SimConfig, n: int, dt: float) -> SimConfig:
    from .discretization import Grid1D

    return SimConfig(
        params=base.params,
        grid=Grid1D(n=n, length=base.grid.length, bc=base.grid.bc),
        dt=dt,
        t_end=base.t_end,
        formulation=base.formulation,
        picard_tol=base.picard_tol,
        picard_max=base.picard_max,
        cfl_limit=base.cfl_limit,
        ic_type="equilibrium",
        rho1_star=base.rho1_star,
        rho2_star=base.rho2_star,
    )


def observed_orders(levels, errors):
    """log2 error ratios between successive refinement levels."""
    orders = []
    for k in range(1, len(errors)):
        ratio = levels[k] / levels[k - 1]
        orders.append(float(np.log(errors[k - 1] / errors[k]) / np.log(ratio)))
    return orders


def spatial_convergence(base: SimConfig, ns=(32, 64, 128), manufactured=None):
    """Refine dx with dt proportional to dx^2; returns per-level errors/orders."""
    if manufactured is None:
        manufactured = default_manufactured(base.params, base.grid.length)
    rows = []
    errors = []
    for n in ns:
        dt = base.dt * (ns[0] / n) ** 2
        cfg = _config_for(base, n, dt)
        err = mms_run(cfg, manufactured)
        rows.append({"n": n, "dt": dt, **err})
        errors.append(err["l2_total"])
    refine = [n / ns[0] for n in ns]
    orders = observed_orders(refine, errors)
    return rows, orders


def temporal_convergence(base: SimConfig, dts=(8e-3, 4e-3, 2e-3),
                         manufactured=None):
    """Refine dt on the fixed fine grid; returns per-level errors/orders."""
    if manufactured is None:
        manufactured = default_manufactured(base.params, base.grid.length)
    rows = []
    errors = []
    for dt in dts:
        cfg = _config_for(base, base.grid.n, dt)
        err = mms_run(cfg, manufactured)
        rows.append({"n": base.grid.n, "dt": dt, **err})
        errors.append(err["l2_total"])
    refine = [dts[0] / dt for dt in dts]
    orders = observed_orders(refine, errors)
    return rows, orders
