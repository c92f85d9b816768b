"""Initial densities: Maxwellians, two-Maxwellian mixtures, anisotropic Gaussians, bumps."""

from dataclasses import dataclass, field

import numpy as np

KINDS = ("maxwellian", "bimaxwellian", "anisotropic_gaussian", "bump")
SUPPORT_MARGIN = 0.8


@dataclass
class InitialConditionSpec:
    """Kind of initial density and its parameters.

    ``maxwellian``: ``mass``, ``mean`` (3-vector), ``temperature``.
    ``bimaxwellian``: ``components``, a list of two maxwellian parameter dicts.
    ``anisotropic_gaussian``: ``mass``, ``mean``, ``variances`` (3 diagonal entries).
    ``bump``: ``center``, ``radius``, ``height``; smooth, supported in the ball.
    """

    kind: str = "maxwellian"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown initial condition kind {self.kind!r}; expected one of {KINDS}")

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind", "maxwellian")
        return cls(kind, d)


def _maxwellian(grid, mass=1.0, mean=(0.0, 0.0, 0.0), temperature=1.0):
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return grid.maxwellian(mass, mean, temperature)


def _anisotropic(grid, mass=1.0, mean=(0.0, 0.0, 0.0), variances=(1.0, 1.0, 1.0)):
    var = np.asarray(variances, dtype=float)
    if np.any(var <= 0) or not mass > 0:
        raise ValueError("anisotropic gaussian needs positive mass and variances")
    mean = np.asarray(mean, dtype=float).reshape(3, 1, 1, 1)
    q = np.sum((grid.v - mean) ** 2 / var.reshape(3, 1, 1, 1), axis=0)
    return mass * np.exp(-0.5 * q) / np.sqrt((2 * np.pi) ** 3 * np.prod(var))


def _bump(grid, center=(0.0, 0.0, 0.0), radius=1.0, height=1.0):
    center = np.asarray(center, dtype=float)
    if not radius > 0 or not height > 0:
        raise ValueError("bump needs positive radius and height")
    if np.linalg.norm(center) + radius > SUPPORT_MARGIN * grid.L:
        raise ValueError(
            f"bump support reaches |v| = {np.linalg.norm(center) + radius:.3g}, "
            f"beyond {SUPPORT_MARGIN} L = {SUPPORT_MARGIN * grid.L:.3g}")
    r2 = np.sum((grid.v - center.reshape(3, 1, 1, 1)) ** 2, axis=0) / radius ** 2
    inside = r2 < 1.0
    out = np.zeros(grid.shape)
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def initial_condition(spec, grid):
    """Sample the density described by ``spec`` on ``grid``."""
    if isinstance(spec, dict):
        spec = InitialConditionSpec.from_dict(spec)
    p = spec.params
    if spec.kind == "maxwellian":
        f = _maxwellian(grid, **p)
    elif spec.kind == "bimaxwellian":
        comps = p.get("components")
        if not comps or len(comps) != 2:
            raise ValueError("bimaxwellian needs exactly two components")
        f = _maxwellian(grid, **comps[0]) + _maxwellian(grid, **comps[1])
    elif spec.kind == "anisotropic_gaussian":
        f = _anisotropic(grid, **p)
    else:
        f = _bump(grid, **p)
    return f


def shipped(name):
    """Named initial conditions used by the examples, the CLI and the test suite."""
    presets = {
        "maxwellian": InitialConditionSpec("maxwellian", {"mass": 1.0, "temperature": 1.0}),
        "bimaxwellian": InitialConditionSpec("bimaxwellian", {"components": [
            {"mass": 0.5, "mean": [1.5, 0.0, 0.0], "temperature": 1.0},
            {"mass": 0.5, "mean": [-1.5, 0.0, 0.0], "temperature": 1.0}]}),
        "bimaxwellian_skew": InitialConditionSpec("bimaxwellian", {"components": [
            {"mass": 0.6, "mean": [1.2, 0.4, 0.0], "temperature": 1.0},
            {"mass": 0.4, "mean": [-1.5, -0.3, 0.2], "temperature": 0.8}]}),
        "anisotropic": InitialConditionSpec("anisotropic_gaussian", {
            "mass": 1.0, "variances": [2.0, 0.7, 0.7]}),
        # unit mass; its equilibrium (T = 1) is resolved on the default box
        "bump": InitialConditionSpec("bump", {"radius": 3.0, "height": 0.0309}),
    }
    try:
        return presets[name]
    except KeyError:
        raise ValueError(f"unknown shipped initial condition {name!r}; "
                         f"available: {sorted(presets)}") from None
