"""Constitutive laws of a two-component ideal-gas mixture.

Pressure law, the entropic change of variables (h, rho) <-> (rho1, rho2),
closed-form two-species diffusion fluxes, and the coefficient bundles used
by the linearized operators.  The gas constant is fixed to 1 throughout,
so the mixture pressure is p = rho1/m1 + rho2/m2.

All functions accept scalars or numpy arrays in the state fields and are
pure: no shared mutable state, safe to call from any thread.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "MixtureParams",
    "PointState",
    "EntropicPoint",
    "SpatialCoefficients",
    "EquilibriumCoefficients",
    "pressure",
    "psi",
    "phi",
    "flux_closed_form",
    "flux_entropic",
    "gradient_reconstruction",
    "spatial_coefficients",
    "equilibrium_coefficients",
]


class DomainError(ValueError):
    """An input left the physical domain (nonpositive density, bad h)."""


class ConvergenceError(RuntimeError):
    """An iterative solve failed to reach its tolerance."""


def _require_positive(name, value):
    if not np.all(np.asarray(value) > 0):
        raise DomainError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MixtureParams:
    """Molar masses m1 != m2 and viscosities mu (shear), nu (bulk-type).

    m1 == m2 degenerates the cross-coupling (gamma2 = 0) and is rejected;
    tests that want that limit build coefficient bundles directly.
    """

    m1: float
    m2: float
    mu: float
    nu: float

    def __post_init__(self):
        _require_positive("m1", self.m1)
        _require_positive("m2", self.m2)
        _require_positive("mu", self.mu)
        _require_positive("nu", self.nu)
        if self.m1 == self.m2:
            raise DomainError("molar masses must differ (m1 != m2)")


@dataclass(frozen=True)
class PointState:
    """Partial densities (rho1, rho2), both strictly positive."""

    rho1: object
    rho2: object

    def __post_init__(self):
        _require_positive("rho1", self.rho1)
        _require_positive("rho2", self.rho2)

    @property
    def rho(self):
        return np.asarray(self.rho1) + np.asarray(self.rho2)


@dataclass(frozen=True)
class EntropicPoint:
    """Entropic variables (h, rho); rho > 0, h unrestricted in sign."""

    h: object
    rho: object

    def __post_init__(self):
        _require_positive("rho", self.rho)


def pressure(state: PointState, params: MixtureParams):
    """Mixture pressure p = rho1/m1 + rho2/m2 (gas constant 1)."""
    return np.asarray(state.rho1) / params.m1 + np.asarray(state.rho2) / params.m2


def psi(state: PointState, params: MixtureParams) -> EntropicPoint:
    """Forward change of variables (rho1, rho2) -> (h, rho).

    h = (1/m2) log rho2 - (1/m1) log rho1, rho = rho1 + rho2.
    """
    rho1 = np.asarray(state.rho1, dtype=float)
    rho2 = np.asarray(state.rho2, dtype=float)
    h = np.log(rho2) / params.m2 - np.log(rho1) / params.m1
    return EntropicPoint(h=h if h.ndim else float(h), rho=state.rho)


def _phi_arrays(h, rho, params, tol, max_iter):
    """Vectorized inverse map: find rho1 in (0, rho) with psi = (h, rho).

    For fixed rho the map rho1 -> h is strictly decreasing, so a safeguarded
    Newton iteration with a bisection fallback on the bracket (0, rho)
    converges for every admissible input.
    """
    m1, m2 = params.m1, params.m2
    lo = np.zeros_like(rho)
    hi = rho.copy()
    r1 = 0.5 * rho
    for _ in range(max_iter):
        val = np.log(rho - r1) / m2 - np.log(r1) / m1 - h
        # h(rho1) decreasing: val > 0 means the root lies to the right of r1
        lo = np.where(val > 0.0, r1, lo)
        hi = np.where(val < 0.0, r1, hi)
        deriv = -1.0 / (m2 * (rho - r1)) - 1.0 / (m1 * r1)
        step = val / deriv
        conv = np.abs(step) <= tol
        if conv.all():
            return r1
        cand = r1 - step
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        r1 = np.where(conv, r1, cand)
    raise ConvergenceError(
        f"phi: root-finding did not converge within {max_iter} iterations"
    )


def phi(point: EntropicPoint, params: MixtureParams,
        tol: float = 1e-14, max_iter: int = 100) -> PointState:
    """Inverse change of variables (h, rho) -> (rho1, rho2).

    The paper's Psi is a bijection of the positive quadrant; its inverse has
    no closed form, so rho1 is recovered by monotone scalar root-finding
    (Newton with bisection fallback, absolute tolerance `tol`).
    """
    h = np.asarray(point.h, dtype=float)
    rho = np.asarray(point.rho, dtype=float)
    scalar = h.ndim == 0 and rho.ndim == 0
    h, rho = np.broadcast_arrays(h.astype(float), rho.astype(float))
    h, rho = h.copy(), rho.copy()
    r1 = _phi_arrays(h, rho, params, tol, max_iter)
    r2 = rho - r1
    if scalar:
        return PointState(rho1=float(r1), rho2=float(r2))
    return PointState(rho1=r1, rho2=r2)


def flux_closed_form(state: PointState, grad_rho1, grad_rho2,
                     params: MixtureParams):
    """Species-1 diffusion flux from the closed two-species Maxwell-Stefan form.

    F1 = -(1/p) [ (rho2/rho) d(rho1/m1) - (rho1/rho) d(rho2/m2) ],  F2 = -F1.
    """
    rho1 = np.asarray(state.rho1, dtype=float)
    rho2 = np.asarray(state.rho2, dtype=float)
    rho = rho1 + rho2
    p = pressure(state, params)
    return -(rho2 / rho * (np.asarray(grad_rho1) / params.m1)
             - rho1 / rho * (np.asarray(grad_rho2) / params.m2)) / p


def flux_entropic(state: PointState, grad_h, params: MixtureParams):
    """Species-1 diffusion flux in entropic form: F1 = rho1 rho2/(p rho) dh."""
    rho1 = np.asarray(state.rho1, dtype=float)
    rho2 = np.asarray(state.rho2, dtype=float)
    rho = rho1 + rho2
    p = pressure(state, params)
    return rho1 * rho2 / (p * rho) * np.asarray(grad_h)


def gradient_reconstruction(state: PointState, grad_rho, grad_h,
                            params: MixtureParams):
    """Recover (d rho1, d rho2) from (d rho, d h) by the 2x2 linear solve.

    d rho1 = m1 rho1/S d rho - m1 rho1 m2 rho2/S d h, S = m1 rho1 + m2 rho2,
    and d rho2 with the opposite sign on the h term; the pair sums to d rho
    exactly in exact arithmetic.
    """
    rho1 = np.asarray(state.rho1, dtype=float)
    rho2 = np.asarray(state.rho2, dtype=float)
    m1, m2 = params.m1, params.m2
    sigma = m1 * rho1 + m2 * rho2
    cross = m1 * rho1 * m2 * rho2 / sigma
    g1 = m1 * rho1 / sigma * np.asarray(grad_rho) - cross * np.asarray(grad_h)
    g2 = m2 * rho2 / sigma * np.asarray(grad_rho) + cross * np.asarray(grad_h)
    return g1, g2


@dataclass(frozen=True)
class SpatialCoefficients:
    """Variable coefficients of the linearization about a density profile.

    sigma_rho0 = m1 rho10 + m2 rho20, gamma1 = rho0/sigma_rho0,
    gamma2 = (m1-m2) rho10 rho20 / sigma_rho0,
    gamma3 = m1 m2 rho10 rho20 / sigma_rho0,
    gamma4 = rho10 rho20 / (p0 rho0), p0 the background pressure.
    gamma2 carries the sign of (m1 - m2); all the others are positive.
    """

    rho0: object
    sigma_rho0: object
    gamma1: object
    gamma2: object
    gamma3: object
    gamma4: object
    p0: object


def spatial_coefficients(rho10, rho20, params: MixtureParams) -> SpatialCoefficients:
    """Coefficient fields gamma1..gamma4, Sigma0_rho, p0 from density profiles."""
    rho10 = np.asarray(rho10, dtype=float)
    rho20 = np.asarray(rho20, dtype=float)
    _require_positive("rho10", rho10)
    _require_positive("rho20", rho20)
    m1, m2 = params.m1, params.m2
    rho0 = rho10 + rho20
    sigma = m1 * rho10 + m2 * rho20
    p0 = rho10 / m1 + rho20 / m2
    return SpatialCoefficients(
        rho0=rho0,
        sigma_rho0=sigma,
        gamma1=rho0 / sigma,
        gamma2=(m1 - m2) * rho10 * rho20 / sigma,
        gamma3=m1 * m2 * rho10 * rho20 / sigma,
        gamma4=rho10 * rho20 / (p0 * rho0),
        p0=p0,
    )


@dataclass(frozen=True)
class EquilibriumCoefficients:
    """Constant coefficients of the linearization about (rho1*, rho2*).

    a0, a1, a3, a4 are positive; a2 is a real number whose sign follows
    (m1 - m2).
    """

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    sigma_rho_star: float
    p_star: float


def equilibrium_coefficients(rho1_star: float, rho2_star: float,
                             params: MixtureParams) -> EquilibriumCoefficients:
    """Constants a0*..a4* at the equilibrium state (rho1*, rho2*)."""
    _require_positive("rho1_star", rho1_star)
    _require_positive("rho2_star", rho2_star)
    m1, m2 = params.m1, params.m2
    a0 = rho1_star + rho2_star
    sigma = m1 * rho1_star + m2 * rho2_star
    p_star = rho1_star / m1 + rho2_star / m2
    return EquilibriumCoefficients(
        a0=a0,
        a1=a0 / sigma,
        a2=(m1 - m2) * rho1_star * rho2_star / sigma,
        a3=m1 * m2 * rho1_star * rho2_star / sigma,
        a4=rho1_star * rho2_star / (p_star * a0),
        sigma_rho_star=sigma,
        p_star=p_star,
    )
