"""Functionals of a density: invariants, entropy, dissipation, norms, J_gamma.

:func:`compute_record` bundles them into a :class:`DiagnosticsRecord`, the unit
stored along a trajectory and written to the CSV series.
"""

from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.fft
from scipy.special import xlogy

from . import sym3
from .collision import diffusive_fluxes, face_pairing
from .convolution import convolve_a, convolve_c, convolve_power, density_spectrum
from .grid import gradient, integrate, lp_norm, quadratic_form, tail_mass, weighted_moment

DEFAULT_S_LIST = (0.0, 1.0, 2.0, 4.0)


def conserved_quantities(f, grid):
    """Mass, momentum (3-vector) and kinetic energy ``1/2 int f |v|^2``."""
    f = np.asarray(f, dtype=float)
    mass = integrate(f, grid)
    momentum = integrate(f * grid.v, grid)
    energy = 0.5 * integrate(f * grid.speed_squared, grid)
    return mass, momentum, energy


def entropy(f, grid):
    """``int f log f`` with ``0 log 0 = 0``; negative samples count as 0."""
    f = np.clip(np.asarray(f, dtype=float), 0.0, None)
    return integrate(xlogy(f, f), grid)


def _sqrt_parts(f, grid):
    root = np.sqrt(np.clip(np.asarray(f, dtype=float), 0.0, None))
    return root, gradient(root, grid)


def entropy_production(f, tables, method="pairs"):
    """Dissipation ``D = 2 sum a(v - v_*) w . w dv^3 dv_*^3``.

    ``w = sqrt(f_*) grad sqrt(f)(v) - sqrt(f) grad sqrt(f)(v_*)`` with central
    differences of ``sqrt f`` and the cell-averaged ``a``.

    ``method="pairs"`` sums the pairs explicitly; every summand is a PSD
    quadratic form so the result is nonnegative by construction.
    ``method="fft"`` expands the square into convolutions, which is the same
    sum (the diagonal term vanishes identically) at FFT cost but without the
    structural sign guarantee.
    """
    grid = tables.grid
    root, g = _sqrt_parts(f, grid)
    if method == "fft":
        return _dissipation_fft(f, root, g, tables)
    if method != "pairs":
        raise ValueError(f"unknown dissipation method {method!r}")
    a = np.ascontiguousarray(tables.a)
    total = _pair_dissipation(np.ascontiguousarray(root), np.ascontiguousarray(g), a)
    return 2.0 * total * grid.cell_volume ** 2


@numba.njit(cache=True)
def _pair_dissipation(root, g, a):
    n = root.shape[0]
    n2 = 2 * n
    total = 0.0
    for i0 in range(n):
        for i1 in range(n):
            for i2 in range(n):
                si = root[i0, i1, i2]
                gx, gy, gz = g[0, i0, i1, i2], g[1, i0, i1, i2], g[2, i0, i1, i2]
                row = 0.0
                for j0 in range(n):
                    k0 = (i0 - j0) % n2
                    for j1 in range(n):
                        k1 = (i1 - j1) % n2
                        for j2 in range(n):
                            sj = root[j0, j1, j2]
                            wx = sj * gx - si * g[0, j0, j1, j2]
                            wy = sj * gy - si * g[1, j0, j1, j2]
                            wz = sj * gz - si * g[2, j0, j1, j2]
                            k2 = (i2 - j2) % n2
                            q = (a[0, k0, k1, k2] * wx * wx + a[1, k0, k1, k2] * wy * wy
                                 + a[2, k0, k1, k2] * wz * wz
                                 + 2.0 * (a[3, k0, k1, k2] * wx * wy + a[4, k0, k1, k2] * wx * wz
                                          + a[5, k0, k1, k2] * wy * wz))
                            row += q
                total += row
    return total


def _dissipation_fft(f, root, g, tables):
    grid = tables.grid
    abar = convolve_a(np.clip(f, 0.0, None), tables)
    h = [0.0, 0.0, 0.0]
    comps = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
    spectra = [_spectrum(root * g[j], tables) for j in range(3)]
    for c, (i, j) in enumerate(comps):
        h[i] = h[i] + _component(spectra[j], tables, c)
        if i != j:
            h[j] = h[j] + _component(spectra[i], tables, c)
    cross = sum(root * g[i] * h[i] for i in range(3))
    return 4.0 * integrate(quadratic_form(abar, g) - cross, grid)


def _spectrum(x, tables):
    return scipy.fft.rfftn(x, s=tables.padded_shape, workers=tables.workers)


def _component(fhat, tables, c):
    n = tables.grid.n
    out = scipy.fft.irfftn(tables.spectra[c] * fhat, s=tables.padded_shape, workers=tables.workers)
    return out[:n, :n, :n] * tables.grid.cell_volume


def interaction_functional(f, tables, fhat=None):
    """``int int |v - v_*|^gamma f(v) f(v_*)`` with the cell-averaged kernel."""
    f = np.asarray(f, dtype=float)
    return integrate(f * convolve_power(f, tables, fhat), tables.grid)


def j_gamma(f, tables, fhat=None):
    """``max_v int |v - v_*|^gamma f(v_*) dv_*`` over the grid nodes."""
    return float(np.max(convolve_power(f, tables, fhat)))


def coercivity_constant(abar, grid, gamma):
    """``min_v lambda_min(abar(v)) / <v>^gamma``."""
    lam = sym3.min_eigenvalue(abar)
    return float(np.min(lam / grid.japanese_bracket() ** gamma))


def weighted_norm_exponent(gamma, s, epsilon):
    """Moment order ``q = -3 (gamma - s)(2 - eps) / eps`` required of the data."""
    return -3.0 * (gamma - s) * (2.0 - epsilon) / epsilon


# ---------------------------------------------------------------- chain rule

def _beta_xlogx_shift(x):
    return ((x + 1.0) * np.log1p(x), np.log1p(x) + 1.0, 1.0 / (1.0 + x), x - np.log1p(x))


def _beta_power(p):
    def beta(x):
        return (x ** p / p, x ** (p - 1.0), (p - 1.0) * x ** (p - 2.0), (p - 1.0) / p * x ** p)
    return beta


def beta_functions(beta_id, p=2.0):
    """``x -> (beta, beta', beta'', phi_beta)`` for a named chain-rule test function.

    ``phi_beta`` solves ``phi' = x beta''`` with ``phi(0) = 0``.
    """
    if beta_id == "xlogx_shift":
        return _beta_xlogx_shift
    if beta_id == "power_p":
        if not p > 1:
            raise ValueError(f"power_p needs p > 1, got {p}")
        return _beta_power(p)
    raise ValueError(f"unknown beta_id {beta_id!r}")


@dataclass
class ChainRuleTerms:
    time_derivative: float
    diffusion: float
    drift: float
    residual: float
    phi_bounds_ok: bool = True


def chain_rule_residual(window, tables, beta_id, p=2.0, floor=0.0):
    """Relative residual of the chain rule on three consecutive states.

    ``window`` is a sequence of three ``(t, f)`` pairs.  The time derivative
    of ``int beta(f)`` is the centred difference across the window; the
    diffusion and drift terms are evaluated on the middle state::

        d/dt int beta(f) + int abar grad f . grad f beta''(f) + int cbar phi_beta(f)

    The diffusion integral is taken in the face form
    ``sum_faces (abar grad f)_d (beta'(f_hi) - beta'(f_lo)) / dv`` that matches
    the flux assembly of the collision operator; the drift integral is the
    nodal sum of ``cbar phi_beta(f)``.  The residual is divided by
    ``max(floor, |each term|)``.
    """
    (t0, f0), (t1, f1), (t2, f2) = window
    if not t0 < t1 < t2:
        raise ValueError("window times must be strictly increasing")
    fn = beta_functions(beta_id, p)
    grid = tables.grid
    f0, f1, f2 = (np.clip(np.asarray(x, dtype=float), 0.0, None) for x in (f0, f1, f2))
    ddt = (integrate(fn(f2)[0], grid) - integrate(fn(f0)[0], grid)) / (t2 - t0)
    _, dbeta, _, phi = fn(f1)
    fhat = density_spectrum(f1, tables)
    abar = convolve_a(f1, tables, fhat)
    cbar = convolve_c(f1, tables, fhat)
    diffusion = face_pairing(diffusive_fluxes(f1, abar, grid), dbeta, grid)
    drift = integrate(cbar * phi, grid)
    scale = max(floor, abs(ddt), abs(diffusion), abs(drift))
    residual = abs(ddt + diffusion + drift) / scale if scale > 0 else 0.0
    ok = bool(np.all(phi >= 0) and np.all(phi <= f1)) if beta_id == "xlogx_shift" else True
    return ChainRuleTerms(float(ddt), float(diffusion), float(drift), float(residual), ok)


# ------------------------------------------------------------------- records

@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    momentum: tuple
    energy: float
    entropy: float
    dissipation: float
    moments: dict = field(default_factory=dict)
    lp_norms: dict = field(default_factory=dict)
    weighted_norm: float = float("nan")
    interaction: float = float("nan")
    j_gamma: float = float("nan")
    coercivity: float = float("nan")
    clipped_mass: float = 0.0
    tail_mass: float = 0.0

    def columns(self):
        """Ordered ``(name, value)`` pairs used by the CSV writer."""
        cols = [("t", self.t), ("mass", self.mass),
                ("momentum_x", self.momentum[0]), ("momentum_y", self.momentum[1]),
                ("momentum_z", self.momentum[2]), ("energy", self.energy),
                ("entropy", self.entropy), ("dissipation", self.dissipation)]
        cols += [(f"M_{s!r}", v) for s, v in self.moments.items()]
        cols += [(f"Lp_{p!r}", v) for p, v in self.lp_norms.items()]
        cols += [("M_q", self.weighted_norm), ("interaction", self.interaction),
                 ("j_gamma", self.j_gamma), ("c_coer", self.coercivity),
                 ("clipped_mass", self.clipped_mass), ("tail_mass", self.tail_mass)]
        return cols


def compute_record(t, f, tables, *, s_list=DEFAULT_S_LIST, p_list=(2.0,), q=None,
                   dissipation="pairs", clipped_mass=0.0):
    """Evaluate every functional on ``f`` at time ``t``.

    ``dissipation`` selects the method for ``D`` (``"pairs"``, ``"fft"``) or
    ``None`` to skip it (recorded as NaN).
    """
    grid = tables.grid
    f = np.asarray(f, dtype=float)
    fhat = density_spectrum(np.clip(f, 0.0, None), tables)
    mass, momentum, energy = conserved_quantities(f, grid)
    abar = convolve_a(f, tables, fhat)
    return DiagnosticsRecord(
        t=float(t),
        mass=float(mass),
        momentum=tuple(float(x) for x in momentum),
        energy=float(energy),
        entropy=float(entropy(f, grid)),
        dissipation=(float("nan") if dissipation is None
                     else float(entropy_production(f, tables, dissipation))),
        moments={float(s): float(weighted_moment(f, grid, s)) for s in s_list},
        lp_norms={float(p): float(lp_norm(f, grid, p)) for p in p_list},
        weighted_norm=float("nan") if q is None else float(weighted_moment(f, grid, q)),
        interaction=float(interaction_functional(f, tables, fhat)),
        j_gamma=j_gamma(f, tables, fhat),
        coercivity=coercivity_constant(abar, grid, tables.gamma),
        clipped_mass=float(clipped_mass),
        tail_mass=float(tail_mass(f, grid)),
    )
