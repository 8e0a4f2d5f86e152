"""Lagrangian-coordinate operator algebra, specialized to one dimension.

Verification toolkit for the reference-coordinate transform x = y + int_0^t v:
the deformation accumulator k = int grad v ds, the inverse-Jacobian matrix
V0(k) = (I+k)^{-1} - I, gradient transport, and the four nonlinear remainder
terms that measure how far the frozen-coordinate equations sit from the
moving-coordinate ones.  Everything is quadratic-small in the perturbation,
which is what the scaling tests pin down.

Index sums are collapsed to N = 1 but kept factored the way the N-dimensional
algebra factors (A_2-type second-order terms, A_1-type once-integrated terms)
so a 2-D extension changes loop bounds, not structure.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .discretization import Grid1D, gradient_op, laplacian_op
from .model import MixtureParams, EntropicPoint, phi, pressure

__all__ = [
    "SmallnessViolation",
    "DeformationAccumulator",
    "VelocityHistory",
    "simpson_time_integral",
    "flow_map",
    "accumulate_kv",
    "v0_matrix",
    "transform_gradient",
    "remainders",
    "v0_identity_residual",
    "remainder_scaling_sweep",
]

DEFAULT_DELTA = 0.5
DEFAULT_NQUAD = 64


class SmallnessViolation(RuntimeError):
    """The accumulated deformation exceeded its admissible bound delta."""


def simpson_time_integral(f: Callable, t: float, n_quad: int = DEFAULT_NQUAD):
    """Composite Simpson quadrature of f(s) over [0, t]; f may return arrays."""
    if t == 0.0:
        return np.zeros_like(np.asarray(f(0.0), dtype=float))
    n = max(2, int(n_quad))
    if n % 2:
        n += 1
    s = np.linspace(0.0, t, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (t / n) / 3.0
    samples = [np.asarray(f(si), dtype=float) for si in s]
    return sum(wi * fi for wi, fi in zip(w, samples))


def flow_map(v: Callable, y, t: float, n_quad: int = DEFAULT_NQUAD):
    """Particle position x = y + int_0^t v(y, s) ds."""
    y = np.asarray(y, dtype=float)
    return y + simpson_time_integral(lambda s: v(y, s), t, n_quad)


@dataclass
class DeformationAccumulator:
    """k = int_0^t grad v ds plus the smallness bookkeeping.

    `magnitude` tracks int_0^t ||grad v||_inf ds; validity of the whole
    Lagrangian algebra requires magnitude <= delta_bound (< 1 keeps I + k
    invertible everywhere).
    """

    k: np.ndarray
    delta_bound: float = DEFAULT_DELTA
    magnitude: float = 0.0

    @property
    def is_small(self) -> bool:
        return self.magnitude <= self.delta_bound

    def require_small(self):
        if not self.is_small:
            raise SmallnessViolation(
                f"accumulated deformation {self.magnitude:.3e} exceeds "
                f"delta = {self.delta_bound:.3e}"
            )


def accumulate_kv(grad_v: Callable, y, t: float,
                  n_quad: int = DEFAULT_NQUAD,
                  delta_bound: float = DEFAULT_DELTA) -> DeformationAccumulator:
    """Accumulate k_v = int_0^t grad v(y, s) ds by Simpson quadrature."""
    y = np.asarray(y, dtype=float)
    k = simpson_time_integral(lambda s: grad_v(y, s), t, n_quad)
    mag = simpson_time_integral(
        lambda s: np.max(np.abs(np.asarray(grad_v(y, s)))), t, n_quad)
    return DeformationAccumulator(k=k, delta_bound=delta_bound,
                                  magnitude=float(mag))


def v0_matrix(k):
    """V0(k) = (I + k)^{-1} - I, so that (dx/dy)^{-1} = I + V0(k).

    Accepts a scalar, a 1-D field of scalar deformations, or an NxN matrix.
    V0(0) = 0 by construction.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim == 2 and k.shape[0] == k.shape[1]:
        eye = np.eye(k.shape[0])
        return np.linalg.inv(eye + k) - eye  # LinAlgError if I + k singular
    if np.any(k == -1.0):
        raise np.linalg.LinAlgError("I + k is singular (k = -1)")
    out = -k / (1.0 + k)
    return float(out) if out.ndim == 0 else out


def _dv0_dk(k):
    """d/dk of the scalar V0: -(1+k)^{-2}."""
    return -1.0 / (1.0 + np.asarray(k, dtype=float)) ** 2


def transform_gradient(grad_y, k):
    """Spatial gradient from the reference one: grad_x = (I + V0(k)) grad_y."""
    k = np.asarray(k, dtype=float)
    if k.ndim == 2 and k.shape[0] == k.shape[1]:
        return (np.eye(k.shape[0]) + v0_matrix(k)) @ np.asarray(grad_y, dtype=float)
    return (1.0 + v0_matrix(k)) * np.asarray(grad_y, dtype=float)


@dataclass
class VelocityHistory:
    """Velocity in reference coordinates with its first two y-derivatives.

    All three are callables (y, s) -> array over the grid nodes; grad2_v is
    needed because the once-integrated A_1-type terms carry d/dy of k_v.
    """

    v: Callable
    grad_v: Callable
    grad2_v: Callable


def remainders(eta, v_field, theta, history: VelocityHistory, t: float,
               grid: Grid1D, params: MixtureParams,
               delta_bound: float = DEFAULT_DELTA,
               n_quad: int = DEFAULT_NQUAD):
    """Evaluate the four coordinate-transform remainders on the grid.

    eta, v_field, theta are node fields of the reference-coordinate state;
    history supplies the velocity record entering k_v.  Returns (R1, R2, R3,
    R4) with R1..R3 node fields and R4 = (left, right) boundary values with
    outward normals n = -1, +1.  All four vanish identically for a zero
    history because V0(0) = 0.
    """
    y = grid.x
    eta = np.asarray(eta, dtype=float)
    v = np.asarray(v_field, dtype=float)
    theta = np.asarray(theta, dtype=float)

    acc = accumulate_kv(history.grad_v, y, t, n_quad=n_quad,
                        delta_bound=delta_bound)
    acc.require_small()
    k = acc.k
    k_y = simpson_time_integral(lambda s: history.grad2_v(y, s), t, n_quad)

    v0 = v0_matrix(k)
    dv0 = _dv0_dk(k)
    a2 = 2.0 * v0 + v0 ** 2          # second-order transform coefficient
    a1 = (1.0 + v0) * dv0 * k_y      # once-integrated transform coefficient

    grad = gradient_op(grid)
    lap = laplacian_op(grid)
    eta_y = grad.apply(eta)
    v_y = grad.apply(v)
    v_yy = lap.apply(v)
    theta_y = grad.apply(theta)
    theta_yy = lap.apply(theta)

    state = phi(EntropicPoint(h=theta, rho=eta), params)
    rho1, rho2 = np.asarray(state.rho1), np.asarray(state.rho2)
    sigma = params.m1 * rho1 + params.m2 * rho2
    p = pressure(state, params)
    c = rho1 * rho2 / (p * eta)
    c_y = grad.apply(c)
    coupling = (params.m1 - params.m2) * rho1 * rho2 / sigma

    r1 = -eta * v0 * v_y

    visc = params.mu + params.nu
    r2 = (visc * (a2 * v_yy + a1 * v_y)
          - (eta / sigma) * v0 * eta_y
          - coupling * v0 * theta_y)

    r3 = (c * (a2 * theta_yy + a1 * theta_y)
          + a2 * c_y * theta_y
          - coupling * v0 * v_y)

    # 1-D boundary: outward normal is constant, its gradient term vanishes
    r4_left = -(-1.0) * v0[0] * theta_y[0]
    r4_right = -(+1.0) * v0[-1] * theta_y[-1]

    return r1, r2, r3, (float(r4_left), float(r4_right))


def v0_identity_residual(seed: int = 0, trials: int = 50,
                         kmax: float = 0.5) -> float:
    """max over random 2x2 deformations of ||(I+V0(k))(I+k) - I||_inf."""
    rng = np.random.default_rng(seed)
    eye = np.eye(2)
    worst = 0.0
    for _ in range(trials):
        k = rng.uniform(-1.0, 1.0, size=(2, 2))
        k *= kmax / max(np.linalg.norm(k), 1e-300)
        resid = (eye + v0_matrix(k)) @ (eye + k) - eye
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def _sweep_history(grid: Grid1D, eps: float) -> VelocityHistory:
    two_pi = 2.0 * np.pi / grid.length

    def v(y, s):
        return eps * np.sin(two_pi * y + 0.4) * (1.0 + 0.5 * s)

    def grad_v(y, s):
        return eps * two_pi * np.cos(two_pi * y + 0.4) * (1.0 + 0.5 * s)

    def grad2_v(y, s):
        return -eps * two_pi ** 2 * np.sin(two_pi * y + 0.4) * (1.0 + 0.5 * s)

    return VelocityHistory(v=v, grad_v=grad_v, grad2_v=grad2_v)


def remainder_scaling_sweep(params: MixtureParams, grid: Grid1D,
                            eps_list=(1e-2, 5e-3, 2.5e-3), t: float = 0.5,
                            rho_star: float = 2.0, h_star: float = 0.0):
    """Quadratic-smallness sweep of R1..R4 under joint scaling by eps.

    Both the velocity history and the state perturbation carry the factor
    eps, so every remainder term holds at least two powers of it; reports the
    sup-norm of each remainder per eps, the fitted log-log slopes, and the
    (exactly zero) remainders of the empty history.
    """
    y = grid.x
    two_pi = 2.0 * np.pi / grid.length
    norms = {name: [] for name in ("R1", "R2", "R3", "R4")}
    for eps in eps_list:
        eta = rho_star + eps * np.cos(two_pi * y + 0.2)
        theta = h_star + eps * np.sin(0.5 * two_pi * y + 0.1)
        v_field = eps * np.sin(two_pi * y + 0.4) * (1.0 + 0.5 * t)
        r1, r2, r3, r4 = remainders(eta, v_field, theta,
                                    _sweep_history(grid, eps), t, grid, params)
        norms["R1"].append(float(np.max(np.abs(r1))))
        norms["R2"].append(float(np.max(np.abs(r2))))
        norms["R3"].append(float(np.max(np.abs(r3))))
        norms["R4"].append(max(abs(r4[0]), abs(r4[1])))

    log_eps = np.log(np.asarray(eps_list))
    slopes = {}
    for name, vals in norms.items():
        coef = np.polyfit(log_eps, np.log(np.asarray(vals)), 1)
        slopes[name] = float(coef[0])

    zero_hist = VelocityHistory(
        v=lambda yy, s: np.zeros_like(np.asarray(yy, dtype=float)),
        grad_v=lambda yy, s: np.zeros_like(np.asarray(yy, dtype=float)),
        grad2_v=lambda yy, s: np.zeros_like(np.asarray(yy, dtype=float)))
    eta0 = rho_star + 0.01 * np.cos(two_pi * y)
    theta0 = h_star + 0.01 * np.sin(0.5 * two_pi * y)
    vf0 = 0.01 * np.sin(two_pi * y)
    z1, z2, z3, z4 = remainders(eta0, vf0, theta0, zero_hist, t, grid, params)
    zero_max = max(float(np.max(np.abs(z1))), float(np.max(np.abs(z2))),
                   float(np.max(np.abs(z3))), abs(z4[0]), abs(z4[1]))

    return {"norms": norms, "slopes": slopes, "zero_history_max": zero_max,
            "eps": list(eps_list)}
