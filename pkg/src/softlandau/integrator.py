"""Explicit SSP-RK2 (Heun) time stepping of ``df/dt = Q(f, f)``.

Each Euler stage can be flux-corrected: the face fluxes are blended between
the second-order fluxes of :mod:`.collision` and a monotone low-order
companion, and the blend is pulled back only at faces that would otherwise
drain a node below zero (positivity-only flux-corrected transport).  The
blend acts face by face, so mass stays exact; away from steep tails the
correction is inactive and the stage is the plain second-order one.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import sym3
from .collision import _pair, divergence, face_fluxes, low_order_fluxes
from .convolution import convolve_a, convolve_b_faces, density_spectrum
from .diagnostics import DEFAULT_S_LIST, compute_record, weighted_norm_exponent
from .grid import integrate, make_grid
from .initial import InitialConditionSpec, initial_condition
from .kernel import cell_averaged_tables, check_gamma

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class NumericalError(FloatingPointError):
    def __init__(self, message, step=None, t=None):
        super().__init__(message)
        self.step = step
        self.t = t


@dataclass
class SimulationConfig:
    gamma: float = -2.0
    n: int = 16
    L: float = 5.0
    T: float = 1.0
    sigma: float = 0.5
    cadence: int = 1
    ic: InitialConditionSpec = field(default_factory=InitialConditionSpec)
    epsilon: float = 0.5
    p: float = 2.0
    s: float = 1.0
    out: str = None
    s_list: tuple = DEFAULT_S_LIST
    dissipation: str = "fft"
    keep_fields: bool = False
    fallback_dt: float = 1e-2
    threads: int = None
    limiter: str = "fct"

    def __post_init__(self):
        if isinstance(self.ic, dict):
            self.ic = InitialConditionSpec.from_dict(self.ic)
        self.validate()

    def validate(self):
        def bad(name, interval):
            raise ConfigError(f"{name} must lie in {interval}, got {getattr(self, name)!r}")

        if not -2.0 <= self.gamma < 0.0:
            bad("gamma", "[-2, 0)")
        if not 0.0 < self.epsilon < 1.0:
            bad("epsilon", "(0, 1)")
        if not self.p > 1.0:
            bad("p", "(1, inf)")
        if not self.s > 0.0:
            bad("s", "(0, inf)")
        if not 0.0 < self.sigma <= 1.0:
            bad("sigma", "(0, 1]")
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            bad("n", "even integers >= 8")
        if not self.L > 0:
            bad("L", "(0, inf)")
        if not self.T >= 0:
            bad("T", "[0, inf)")
        if int(self.cadence) != self.cadence or self.cadence < 1:
            bad("cadence", "positive integers")
        if self.dissipation not in ("pairs", "fft", None):
            bad("dissipation", "{'pairs', 'fft', None}")
        if self.limiter not in ("fct", None):
            bad("limiter", "{'fct', None}")
        return self

    @property
    def q(self):
        """Moment order the data must carry for the L^(3-eps) estimate."""
        return weighted_norm_exponent(self.gamma, self.s, self.epsilon)

    @property
    def alpha(self):
        """Time-integrability exponent ``2 (3 - eps) / (3 (2 - eps))``."""
        return 2.0 * (3.0 - self.epsilon) / (3.0 * (2.0 - self.epsilon))

    @property
    def p_list(self):
        return tuple(sorted({2.0, 3.0 - self.epsilon, float(self.p)}))

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["ic"] = self.ic.to_dict()
        d["s_list"] = list(self.s_list)
        d["q"] = self.q
        return d


@dataclass
class Trajectory:
    """Diagnostics (and optionally densities) recorded along a run."""

    config: SimulationConfig
    records: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    step_clipped: list = field(default_factory=list)
    mass_drift: float = 0.0

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    def series(self, name):
        """Values of a scalar record attribute (or ``"M_4"``/``"Lp_2"`` keys) in time order."""
        if name.startswith("M_") and name != "M_q":
            return np.array([r.moments[float(name[2:])] for r in self.records])
        if name.startswith("Lp_"):
            return np.array([r.lp_norms[float(name[3:])] for r in self.records])
        return np.array([getattr(r, name) for r in self.records])

    def window(self, t_start=0.0, t_end=np.inf):
        """Copy restricted to records with ``t_start <= t <= t_end``."""
        keep = [i for i, r in enumerate(self.records) if t_start <= r.t <= t_end]
        out = Trajectory(self.config, [self.records[i] for i in keep])
        if self.fields:
            out.fields = [self.fields[i] for i in keep]
        return out


def cfl_dt(abar, grid, sigma=0.5, fallback=1e-2):
    """Parabolic step bound ``sigma dv^2 / (6 lambda_max)``."""
    if not np.all(np.isfinite(abar)):
        raise NumericalError("non-finite diffusion matrix")
    lam = float(np.max(sym3.max_eigenvalue(abar)))
    if lam <= 0.0:
        return fallback
    return sigma * grid.dv ** 2 / (6.0 * lam)


def _rhs(f, tables, abar=None, bface=None, index=None):
    q = divergence(face_fluxes(f, tables, abar, bface), tables.grid)
    if not np.all(np.isfinite(q)):
        raise NumericalError(f"non-finite collision operator at step {index}", step=index)
    return q


def _coefficients(f, tables):
    fhat = density_spectrum(f, tables)
    return convolve_a(f, tables, fhat), convolve_b_faces(f, tables, fhat)


def _euler(f, dt, tables, abar=None, bface=None, index=None):
    return f + dt * _rhs(f, tables, abar, bface, index)


def _euler_fct(f, dt, tables, abar=None, bface=None, index=None):
    grid = tables.grid
    n, dv = grid.n, grid.dv
    if abar is None or bface is None:
        abar, bface = _coefficients(f, tables)
    high = face_fluxes(f, tables, abar, bface)
    low = low_order_fluxes(f, abar, bface, grid)
    f_low = f + dt * divergence(low, grid)
    anti = [h - l for h, l in zip(high, low)]
    # a face flux F adds F/dv to the lower node and removes it from the upper one
    drain = np.zeros(grid.shape)
    for d in range(3):
        lo, hi = _pair(d, n)
        drain[lo] += np.maximum(-anti[d], 0.0)
        drain[hi] += np.maximum(anti[d], 0.0)
    drain *= dt / dv
    ratio = np.ones(grid.shape)
    m = drain > 0
    ratio[m] = np.minimum(1.0, np.maximum(f_low[m], 0.0) / drain[m])
    limited = []
    for d in range(3):
        lo, hi = _pair(d, n)
        limited.append(np.where(anti[d] > 0, ratio[hi], ratio[lo]) * anti[d])
    out = f_low + dt * divergence(limited, grid)
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"non-finite collision operator at step {index}", step=index)
    return out


_STAGES = {None: _euler, "fct": _euler_fct}


def step(f, dt, tables, abar=None, bface=None, index=None, limiter="fct"):
    """One Heun step; returns ``(f_next, clipped_mass)``.

    ``abar``/``bface`` may carry the coefficients of ``f`` when the caller
    already has them.  ``limiter="fct"`` flux-corrects each stage (see the
    module notes), ``None`` uses the plain second-order stages.  Negative
    values of the result are set to zero and the mass added by doing so is
    returned; no renormalization is applied.
    """
    f = np.asarray(f, dtype=float)
    if dt == 0:
        return f.copy(), 0.0
    stage = _STAGES[limiter]
    first = stage(f, dt, tables, abar, bface, index)
    nxt = 0.5 * f + 0.5 * stage(first, dt, tables, index=index)
    neg = nxt < 0.0
    clipped = 0.0 - float(np.sum(nxt[neg])) * tables.grid.cell_volume
    nxt[neg] = 0.0
    return nxt, clipped


def run(config, tables=None, f0=None):
    """Advance the configured initial condition to ``config.T``."""
    config.validate()
    grid = make_grid(config.n, config.L)
    gamma = check_gamma(config.gamma)
    if tables is None:
        tables = cell_averaged_tables(grid, gamma)
    elif not tables.matches(grid, gamma):
        raise ConfigError("kernel tables do not match the configured grid and gamma")
    tables.workers = config.threads
    f = initial_condition(config.ic, grid) if f0 is None else np.array(f0, dtype=float)
    if not np.all(np.isfinite(f)):
        raise NumericalError("non-finite initial density", step=0, t=0.0)
    traj = Trajectory(config)
    m0 = integrate(f, grid)
    clipped_total = 0.0

    def record(t, f):
        traj.records.append(compute_record(
            t, f, tables, s_list=config.s_list, p_list=config.p_list, q=config.q,
            dissipation=config.dissipation, clipped_mass=clipped_total))
        if config.keep_fields:
            traj.fields.append(f.copy())

    t, k = 0.0, 0
    record(t, f)
    while t < config.T:
        abar, bface = _coefficients(f, tables)
        dt = cfl_dt(abar, grid, config.sigma, config.fallback_dt)
        last = t + dt >= config.T * (1 - 1e-12)
        if last:
            dt = config.T - t
        try:
            nxt, clipped = step(f, dt, tables, abar, bface, index=k, limiter=config.limiter)
        except NumericalError as exc:
            raise NumericalError(f"{exc} (t = {t:.6g})", step=k, t=t) from exc
        premass = integrate(nxt, grid) - clipped
        traj.mass_drift = max(traj.mass_drift, abs(premass - (m0 + clipped_total)) / m0)
        clipped_total += clipped
        traj.step_clipped.append(clipped)
        traj.dts.append(dt)
        f, k = nxt, k + 1
        t = config.T if last else t + dt
        if last or k % config.cadence == 0:
            record(t, f)
    traj.final = f
    traj.tables = tables
    return traj
