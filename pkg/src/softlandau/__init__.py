"""Velocity-space simulation of the homogeneous Landau equation with soft potentials.

Fields are numpy arrays on a :class:`VelocityGrid`; the collision operator is
assembled from FFT convolutions with cell-averaged kernel tables.
"""

from .collision import collision_operator, weak_form_operator, weak_form_rhs
from .config import parse_config
from .convolution import convolve_a, convolve_b, convolve_c, convolve_power, direct_convolve
from .diagnostics import (DiagnosticsRecord, chain_rule_residual, coercivity_constant,
                          compute_record, conserved_quantities, entropy, entropy_production,
                          interaction_functional, j_gamma)
from .grid import VelocityGrid, gradient, integrate, lp_norm, make_grid, weighted_moment
from .harness import (moment_growth_fit, report, run_experiments, thm1_envelope,
                      thm1_quantity, thm2_tracking)
from .inequalities import fourier_transform, hls_ratio, pitt_ratio
from .initial import InitialConditionSpec, initial_condition, shipped
from .integrator import ConfigError, NumericalError, SimulationConfig, Trajectory, cfl_dt, run, step
from .kernel import KernelTables, cell_averaged_tables
from .series import read_checkpoint, read_series, write_checkpoint, write_series

__version__ = "0.1.0"
