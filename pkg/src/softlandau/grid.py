"""Uniform velocity lattice, Riemann-sum quadrature and finite differences.

Fields are plain numpy arrays laid out on the lattice:

* scalar fields have shape ``(n, n, n)``;
* vector fields have shape ``(3, n, n, n)``;
* symmetric matrix fields have shape ``(6, n, n, n)`` with the component
  order given by :data:`SYM_COMPONENTS`.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# (i, j) index pairs of the six stored components of a symmetric 3x3 field
SYM_COMPONENTS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class VelocityGrid:
    """Node-centred cubic lattice covering ``[-L, L)^3``.

    Node ``k`` on each axis sits at ``-L + (k + 1/2) dv`` so the lattice is
    symmetric under ``v -> -v`` and no node lies on the origin.
    """

    n: int
    L: float

    @property
    def dv(self):
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self):
        return self.dv ** 3

    @property
    def shape(self):
        return (self.n, self.n, self.n)

    @property
    def size(self):
        return self.n ** 3

    @cached_property
    def axis(self):
        return -self.L + (np.arange(self.n) + 0.5) * self.dv

    @cached_property
    def v(self):
        """Node coordinates, shape ``(3, n, n, n)``."""
        return np.stack(np.meshgrid(self.axis, self.axis, self.axis, indexing="ij"))

    @cached_property
    def speed_squared(self):
        return np.sum(self.v ** 2, axis=0)

    def japanese_bracket(self):
        """``<v> = (1 + |v|^2)^(1/2)`` at every node."""
        return np.sqrt(1.0 + self.speed_squared)

    def node_index(self, point):
        """Index triple of the node closest to ``point``."""
        k = np.floor((np.asarray(point, dtype=float) + self.L) / self.dv).astype(int)
        return tuple(np.clip(k, 0, self.n - 1))

    def unit_cell(self, point=(0.0, 0.0, 0.0), mass=1.0):
        """Scalar field holding ``mass`` in the single cell nearest ``point``."""
        f = np.zeros(self.shape)
        f[self.node_index(point)] = mass / self.cell_volume
        return f

    def maxwellian(self, mass=1.0, mean=(0.0, 0.0, 0.0), temperature=1.0):
        mean = np.asarray(mean, dtype=float).reshape(3, 1, 1, 1)
        r2 = np.sum((self.v - mean) ** 2, axis=0)
        return mass * (2 * np.pi * temperature) ** -1.5 * np.exp(-r2 / (2 * temperature))


def make_grid(n, L):
    """Build a :class:`VelocityGrid` with ``n`` nodes per axis on ``[-L, L)^3``.

    ``n`` must be even and at least 8 so the zero-padded transforms used by the
    convolutions have even length.
    """
    if int(n) != n or n < 8 or n % 2:
        raise ValueError(f"n must be an even integer >= 8, got {n}")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    return VelocityGrid(int(n), float(L))


def _check_shape(g, grid):
    g = np.asarray(g, dtype=float)
    if g.shape[-3:] != grid.shape:
        raise ValueError(f"field shape {g.shape} does not match grid {grid.shape}")
    return g


def integrate(g, grid):
    """Riemann sum ``sum(g) dv^3`` over the last three axes."""
    g = _check_shape(g, grid)
    return np.sum(g, axis=(-3, -2, -1)) * grid.cell_volume


def lp_norm(g, grid, p):
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    g = _check_shape(g, grid)
    return integrate(np.abs(g) ** p, grid) ** (1.0 / p)


def weighted_moment(g, grid, s):
    """``M_s(g) = sum |g| <v>^s dv^3``."""
    if s < 0:
        raise ValueError(f"moment order must be >= 0, got {s}")
    g = np.abs(_check_shape(g, grid))
    # weights only where g is nonzero, so empty cells cannot turn an overflow into NaN
    w = np.zeros(grid.shape)
    nz = g > 0
    w[nz] = g[nz] * (1.0 + grid.speed_squared[nz]) ** (0.5 * s)
    return integrate(w, grid)


def gradient(g, grid):
    """Central differences inside, second-order one-sided on the outer layer."""
    g = _check_shape(g, grid)
    return np.stack(np.gradient(g, grid.dv, edge_order=2))


def tail_mass(g, grid, fraction=0.9):
    """Mass carried by nodes with ``|v| > fraction * L``."""
    outside = grid.speed_squared > (fraction * grid.L) ** 2
    return integrate(np.where(outside, np.abs(g), 0.0), grid)


def sym_to_full(m):
    """Expand a ``(6, ...)`` symmetric field to ``(3, 3, ...)``."""
    m = np.asarray(m)
    out = np.empty((3, 3) + m.shape[1:], dtype=m.dtype)
    for c, (i, j) in enumerate(SYM_COMPONENTS):
        out[i, j] = m[c]
        out[j, i] = m[c]
    return out


def full_to_sym(m):
    m = np.asarray(m)
    return np.stack([m[i, j] for i, j in SYM_COMPONENTS])


def quadratic_form(m, x, y=None):
    """``sum_ij m_ij x_i y_j`` for a symmetric ``(6, ...)`` field."""
    if y is None:
        y = x
    out = m[0] * x[0] * y[0] + m[1] * x[1] * y[1] + m[2] * x[2] * y[2]
    out = out + m[3] * (x[0] * y[1] + x[1] * y[0])
    out = out + m[4] * (x[0] * y[2] + x[2] * y[0])
    out = out + m[5] * (x[1] * y[2] + x[2] * y[1])
    return out
