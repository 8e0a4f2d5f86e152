"""1-D grids and banded finite-difference operators.

Wall grids are node-centered with both endpoints carried as unknowns; the
boundary cells are half cells, so the quadrature weights are the trapezoid
weights dx*(1/2, 1, ..., 1, 1/2).  Periodic grids drop the right endpoint.

Two flavors of first derivative are provided:

* ``gradient_op`` -- central interior rows, second-order one-sided rows at
  the walls; used for non-conservative derivative terms.
* ``divergence_conservative`` -- face-flux differencing over the (half-)cell
  volumes; the cell-volume-weighted sum telescopes to the boundary fluxes
  exactly, which is what makes the mass bookkeeping of the solvers exact.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Grid1D",
    "Field",
    "DiscreteOperator",
    "gradient_op",
    "laplacian_op",
    "face_average",
    "divergence_conservative",
    "variable_diffusion_op",
    "apply_dirichlet_zero",
    "apply_neumann_zero",
    "dirichlet_residual",
    "neumann_residual",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D mesh with n cells on [0, length]."""

    n: int
    length: float
    bc: str = "wall"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise ValueError("cell count n must be an integer >= 8")
        if not self.length > 0:
            raise ValueError("domain length must be positive")
        if self.bc not in ("wall", "periodic"):
            raise ValueError("bc must be 'wall' or 'periodic'")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def npoints(self) -> int:
        """Number of node-centered unknowns (endpoints included on walls)."""
        return self.n + 1 if self.bc == "wall" else self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.npoints) * self.dx

    @property
    def weights(self) -> np.ndarray:
        """Quadrature/cell volumes; half cells at walls."""
        w = np.full(self.npoints, self.dx)
        if self.bc == "wall":
            w[0] = 0.5 * self.dx
            w[-1] = 0.5 * self.dx
        return w

    @property
    def nfaces(self) -> int:
        """Wall grids: [wall, n interior faces, wall]; periodic: n faces."""
        return self.n + 2 if self.bc == "wall" else self.n

    @property
    def x_faces(self) -> np.ndarray:
        """Inter-node face coordinates (n of them for either boundary kind);
        the natural home of a staggered velocity."""
        return (np.arange(self.n) + 0.5) * self.dx

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values)))

    def norm_l2(self, values) -> float:
        v = np.asarray(values, dtype=float)
        return float(np.sqrt(np.dot(self.weights, v * v)))


@dataclass
class Field:
    """Values aligned to the grid nodes."""

    values: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.npoints,):
            raise ValueError(
                f"field length {self.values.shape} does not match grid layout "
                f"({self.grid.npoints},)"
            )

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid)


@dataclass(frozen=True)
class DiscreteOperator:
    """A banded difference operator stored sparsely."""

    matrix: sp.spmatrix
    grid: Grid1D

    def apply(self, values):
        v = values.values if isinstance(values, Field) else np.asarray(values)
        return self.matrix @ v

    def todense(self) -> np.ndarray:
        return self.matrix.toarray()


def _as_values(obj):
    return obj.values if isinstance(obj, Field) else np.asarray(obj, dtype=float)


def gradient_op(grid: Grid1D) -> DiscreteOperator:
    """First derivative: central interior, one-sided second order at walls."""
    m = grid.npoints
    dx = grid.dx
    rows, cols, vals = [], [], []
    if grid.bc == "periodic":
        i = np.arange(m)
        rows += [i, i]
        cols += [(i + 1) % m, (i - 1) % m]
        vals += [np.full(m, 0.5 / dx), np.full(m, -0.5 / dx)]
    else:
        i = np.arange(1, m - 1)
        rows += [i, i]
        cols += [i + 1, i - 1]
        vals += [np.full(m - 2, 0.5 / dx), np.full(m - 2, -0.5 / dx)]
        rows += [[0, 0, 0], [m - 1, m - 1, m - 1]]
        cols += [[0, 1, 2], [m - 1, m - 2, m - 3]]
        vals += [np.array([-1.5, 2.0, -0.5]) / dx,
                 np.array([1.5, -2.0, 0.5]) / dx]
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate([np.asarray(r) for r in rows]),
                                np.concatenate([np.asarray(c) for c in cols]))),
        shape=(m, m),
    )
    return DiscreteOperator(mat, grid)


def laplacian_op(grid: Grid1D) -> DiscreteOperator:
    """Second derivative: 3-point interior, one-sided second order at walls."""
    m = grid.npoints
    dx2 = grid.dx ** 2
    rows, cols, vals = [], [], []
    if grid.bc == "periodic":
        i = np.arange(m)
        rows += [i, i, i]
        cols += [(i - 1) % m, i, (i + 1) % m]
        vals += [np.full(m, 1.0 / dx2), np.full(m, -2.0 / dx2),
                 np.full(m, 1.0 / dx2)]
    else:
        i = np.arange(1, m - 1)
        rows += [i, i, i]
        cols += [i - 1, i, i + 1]
        vals += [np.full(m - 2, 1.0 / dx2), np.full(m - 2, -2.0 / dx2),
                 np.full(m - 2, 1.0 / dx2)]
        one_sided = np.array([35.0, -104.0, 114.0, -56.0, 11.0]) / (12.0 * dx2)
        rows += [[0] * 5, [m - 1] * 5]
        cols += [[0, 1, 2, 3, 4], [m - 1, m - 2, m - 3, m - 4, m - 5]]
        vals += [one_sided, one_sided]
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate([np.asarray(r) for r in rows]),
                                np.concatenate([np.asarray(c) for c in cols]))),
        shape=(m, m),
    )
    return DiscreteOperator(mat, grid)


def face_average(values, grid: Grid1D) -> np.ndarray:
    """Arithmetic-mean interpolation of node values to faces.

    On wall grids the outermost faces coincide with the wall nodes, so the
    node value itself is used there (exact for fluxes that vanish with u).
    """
    v = _as_values(values)
    if grid.bc == "periodic":
        return 0.5 * (v + np.roll(v, 1))
    faces = np.empty(grid.nfaces)
    faces[0] = v[0]
    faces[-1] = v[-1]
    faces[1:-1] = 0.5 * (v[:-1] + v[1:])
    return faces


def divergence_conservative(flux_at_faces, grid: Grid1D) -> Field:
    """Cell divergence of a face flux; telescopes exactly under cell sums.

    For any face-flux vector, sum_i w_i div_i = F_last - F_first (wall) or 0
    (periodic), so zero boundary fluxes give exact discrete conservation.
    """
    f = np.asarray(flux_at_faces, dtype=float)
    if f.shape != (grid.nfaces,):
        raise ValueError(f"expected {grid.nfaces} face values, got {f.shape}")
    if grid.bc == "periodic":
        div = (np.roll(f, -1) - f) / grid.dx
    else:
        div = (f[1:] - f[:-1]) / grid.weights
    return Field(div, grid)


def variable_diffusion_op(gamma, grid: Grid1D, neumann: bool = True) -> DiscreteOperator:
    """Flux-form div(gamma * d/dx) with arithmetic-mean face coefficients.

    Neumann (zero face flux) is realized by dropping the wall-face flux, so
    constants are annihilated to rounding.  neumann=False pins the boundary
    value to zero through a half-cell wall flux instead.
    """
    g = _as_values(gamma)
    m = grid.npoints
    dx = grid.dx
    w = grid.weights
    if grid.bc == "periodic":
        gf = 0.5 * (g + np.roll(g, 1))  # gf[i] = coefficient at face i-1/2
        i = np.arange(m)
        rows = np.concatenate([i, i, i])
        cols = np.concatenate([(i - 1) % m, i, (i + 1) % m])
        gp = np.roll(gf, -1)  # face i+1/2
        vals = np.concatenate([gf / dx ** 2, -(gf + gp) / dx ** 2, gp / dx ** 2])
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
        return DiscreteOperator(mat, grid)

    gf = 0.5 * (g[:-1] + g[1:])  # interior faces i+1/2, i = 0..m-2
    rows, cols, vals = [], [], []
    i = np.arange(1, m - 1)
    rows += [i, i, i]
    cols += [i - 1, i, i + 1]
    vals += [gf[:-1] / (w[i] * dx), -(gf[:-1] + gf[1:]) / (w[i] * dx),
             gf[1:] / (w[i] * dx)]
    # wall rows: interior-face flux only (Neumann) or plus a wall-face flux
    rows += [[0, 0], [m - 1, m - 1]]
    cols += [[0, 1], [m - 2, m - 1]]
    left = gf[0] / (w[0] * dx)
    right = gf[-1] / (w[-1] * dx)
    vals += [np.array([-left, left]), np.array([right, -right])]
    if not neumann:
        rows += [[0], [m - 1]]
        cols += [[0], [m - 1]]
        vals += [np.array([-g[0] / (w[0] * 0.5 * dx)]),
                 np.array([-g[-1] / (w[-1] * 0.5 * dx)])]
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate([np.asarray(r) for r in rows]),
                                np.concatenate([np.asarray(c) for c in cols]))),
        shape=(m, m),
    )
    return DiscreteOperator(mat, grid)


def apply_dirichlet_zero(op_or_field, grid: Grid1D = None):
    """Eliminate the wall rows (operator) or zero the wall values (field)."""
    if isinstance(op_or_field, DiscreteOperator):
        g = op_or_field.grid
        if g.bc != "wall":
            return op_or_field
        mat = op_or_field.matrix.tolil(copy=True)
        mat[0, :] = 0.0
        mat[g.npoints - 1, :] = 0.0
        return DiscreteOperator(mat.tocsr(), g)
    if isinstance(op_or_field, Field):
        out = op_or_field.copy()
        if out.grid.bc == "wall":
            out.values[0] = 0.0
            out.values[-1] = 0.0
        return out
    v = np.array(op_or_field, dtype=float)
    v[0] = 0.0
    v[-1] = 0.0
    return v


def apply_neumann_zero(op: DiscreteOperator) -> DiscreteOperator:
    """Rewrite the wall rows of a second-difference operator with mirror ghosts.

    The ghost value equals its interior mirror, i.e. the wall face carries no
    flux; the resulting rows are 2*(f1 - f0)/dx^2 and its right-hand mirror.
    """
    g = op.grid
    if g.bc != "wall":
        return op
    m = g.npoints
    dx2 = g.dx ** 2
    mat = op.matrix.tolil(copy=True)
    mat[0, :] = 0.0
    mat[0, 0] = -2.0 / dx2
    mat[0, 1] = 2.0 / dx2
    mat[m - 1, :] = 0.0
    mat[m - 1, m - 1] = -2.0 / dx2
    mat[m - 1, m - 2] = 2.0 / dx2
    return DiscreteOperator(mat.tocsr(), g)


def dirichlet_residual(values, grid: Grid1D) -> float:
    """How far the wall values are from zero."""
    v = _as_values(values)
    if grid.bc != "wall":
        return 0.0
    return float(max(abs(v[0]), abs(v[-1])))


def neumann_residual(values, grid: Grid1D) -> float:
    """One-sided second-order wall slope; zero for compatible fields."""
    v = _as_values(values)
    if grid.bc != "wall":
        return 0.0
    dx = grid.dx
    left = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx)
    right = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dx)
    return float(max(abs(left), abs(right)))
