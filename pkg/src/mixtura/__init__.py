"""mixtura: 1-D compressible two-component mixture flow toolkit.

Constitutive laws and the entropic change of variables (``model``), grids
and conservative difference operators (``discretization``), nonlinear IMEX
dynamics in both formulations (``dynamics``), Lagrangian operator-transform
verification (``lagrangian``), linearized operators with spectra and the
energy identity (``linear_analysis``), manufactured-solution convergence
studies (``mms``), and a CLI (``cli``).
"""

__version__ = "0.1.0"

from .discretization import Grid1D, Field, DiscreteOperator
from .model import (MixtureParams, PointState, EntropicPoint,
                    SpatialCoefficients, EquilibriumCoefficients,
                    pressure, psi, phi, flux_closed_form, flux_entropic,
                    gradient_reconstruction, spatial_coefficients,
                    equilibrium_coefficients, DomainError, ConvergenceError)
from .dynamics import (SimConfig, TimeSeriesRecord, EntropicState,
                       PrimitiveState, initial_state, step_entropic,
                       step_primitive, run, mms_run, PicardError,
                       PositivityError)
from .lagrangian import (DeformationAccumulator, VelocityHistory, flow_map,
                         accumulate_kv, v0_matrix, transform_gradient,
                         remainders, SmallnessViolation)
from .linear_analysis import (LinearizedOperator, SpectrumReport,
                              assemble_constant, assemble_variable, spectrum,
                              energy_dissipation_check, march_linear)

__all__ = [name for name in dir() if not name.startswith("_")]
