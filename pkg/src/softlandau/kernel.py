"""Landau collision kernels for soft potentials and their cell averages.

Pointwise kernels, for ``z != 0`` and ``gamma`` in ``[-2, 0)``::

    a(z) = |z|^(gamma+2) (I - z z^T / |z|^2)
    b(z) = div a = -2 |z|^gamma z
    c(z) = div b = -2 (gamma + 3) |z|^gamma

Convolutions on the lattice use averages of these kernels over the lattice
cells (and, for the drift, over cell faces).  All kernels are homogeneous in
``z``, so the averages are computed once on a unit lattice and rescaled.
"""

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path

import numpy as np
import scipy.fft

from . import storage
from .grid import VelocityGrid

log = logging.getLogger(__name__)

QUADRATURE_VERSION = 1
GAUSS_ORDER = 4
ORIGIN_TOL = 1e-6
NEAR_FIELD = 2
MAX_DEPTH = 14

# component order of the stacked cell tables
A_SLICE = slice(0, 6)
B_SLICE = slice(6, 9)
C_INDEX = 9
POWER_INDEX = 10
N_CELL_COMPONENTS = 11


def check_gamma(gamma):
    if not -2.0 <= gamma < 0.0:
        raise ValueError(f"gamma must lie in [-2, 0), got {gamma}")
    return float(gamma)


def _nonzero(z):
    z = np.asarray(z, dtype=float)
    if z.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {z.shape}")
    r = np.sqrt(z @ z)
    if r == 0:
        raise ValueError("kernel is undefined at z = 0")
    return z, r


def projection_matrix(z):
    """Orthogonal projection onto the plane normal to ``z``."""
    z, r = _nonzero(z)
    return np.eye(3) - np.outer(z, z) / r ** 2


def kernel_a(z, gamma):
    gamma = check_gamma(gamma)
    z, r = _nonzero(z)
    return r ** (gamma + 2) * projection_matrix(z)


def kernel_b(z, gamma):
    gamma = check_gamma(gamma)
    z, r = _nonzero(z)
    return -2.0 * r ** gamma * z


def kernel_c(z, gamma):
    gamma = check_gamma(gamma)
    _, r = _nonzero(z)
    return -2.0 * (gamma + 3.0) * r ** gamma


def kernel_power(z, gamma):
    """The interaction kernel ``|z|^gamma``."""
    gamma = check_gamma(gamma)
    _, r = _nonzero(z)
    return r ** gamma


def component_degrees(gamma):
    """Homogeneity degree of each stacked cell component."""
    return np.array([gamma + 2] * 6 + [gamma + 1] * 3 + [gamma, gamma])


def kernel_components(x, y, z, gamma):
    """All eleven kernel components evaluated pointwise, shape ``(11, ...)``."""
    r2 = x * x + y * y + z * z
    rg = r2 ** (0.5 * gamma)
    ra = rg * r2
    return np.stack([
        ra - rg * x * x, ra - rg * y * y, ra - rg * z * z,
        -rg * x * y, -rg * x * z, -rg * y * z,
        -2.0 * rg * x, -2.0 * rg * y, -2.0 * rg * z,
        -2.0 * (gamma + 3.0) * rg,
        rg,
    ])


@lru_cache(maxsize=None)
def _gauss_box(dim, order=GAUSS_ORDER):
    """Product Gauss-Legendre rule on ``[0, 1]^dim``."""
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    nodes = np.array(list(product(x, repeat=dim)))
    weights = np.prod(np.array(list(product(w, repeat=dim))), axis=1)
    return nodes, weights


def adaptive_box_integrals(func, lows, width, dim, tol=ORIGIN_TOL, max_depth=MAX_DEPTH):
    """Integrate a vector-valued ``func`` over a batch of boxes.

    Each box is split dyadically until the children's sum changes the parent
    estimate by less than ``tol`` relative (max-norm over components).

    Parameters
    ----------
    func : callable
        Maps points of shape ``(K, G, dim)`` to values ``(C, K, G)``.
    lows : array, shape (B, dim)
        Lower corners of the boxes.
    width : float
        Common edge length of the boxes.

    Returns
    -------
    array, shape (B, C)
        Integrals (not averages) over each box.
    """
    nodes, weights = _gauss_box(dim)
    corners = np.array(list(product((0.0, 0.5), repeat=dim)))
    nchild = len(corners)

    def rule(lo, h):
        pts = lo[:, None, :] + h[:, None, None] * nodes[None]
        vals = func(pts)
        return np.einsum("ckg,g->kc", vals, weights) * (h ** dim)[:, None]

    lo = np.asarray(lows, dtype=float).reshape(-1, dim)
    owner = np.arange(len(lo))
    h = np.full(len(lo), float(width))
    est = rule(lo, h)
    result = np.zeros_like(est)
    for _ in range(max_depth):
        kids = (lo[:, None, :] + h[:, None, None] * corners[None]).reshape(-1, dim)
        kid_h = np.repeat(0.5 * h, nchild)
        kid_est = rule(kids, kid_h).reshape(len(lo), nchild, -1)
        refined = kid_est.sum(axis=1)
        err = np.max(np.abs(refined - est), axis=1)
        scale = np.max(np.abs(refined), axis=1)
        done = err <= tol * scale
        np.add.at(result, owner[done], refined[done])
        todo = ~done
        if not todo.any():
            return result
        lo = kids.reshape(len(lo), nchild, dim)[todo].reshape(-1, dim)
        h = kid_h.reshape(len(h), nchild)[todo].ravel()
        owner = np.repeat(owner[todo], nchild)
        est = kid_est[todo].reshape(-1, kid_est.shape[-1])
    raise RuntimeError(
        f"adaptive cell quadrature did not reach tol={tol} within depth {max_depth}")


def origin_cell_average(gamma, tol=ORIGIN_TOL):
    """Average of every kernel component over the unit cell centred at 0.

    Each octant of the cell is a cube with the singularity at a corner.  By
    homogeneity the corner sub-cube of half size carries ``2^-(3+deg)`` of the
    whole, so the octant integral is the sum over the seven regular sub-cubes
    divided by ``1 - 2^-(3+deg)``.
    """
    deg = component_degrees(gamma)
    lows = np.array([c for c in product((0.0, 0.5), repeat=3) if any(c)])
    total = np.zeros(N_CELL_COMPONENTS)
    for signs in product((-1.0, 1.0), repeat=3):
        s = np.array(signs)

        def func(pts, s=s):
            p = pts * s
            return kernel_components(p[..., 0], p[..., 1], p[..., 2], gamma)

        regular = adaptive_box_integrals(func, lows, 0.5, 3, tol).sum(axis=0)
        unit_octant = regular / (1.0 - 2.0 ** -(3.0 + deg))
        total += 2.0 ** -(3.0 + deg) * unit_octant
    return total


def _offsets(n):
    """Integer offsets of the padded lattice in FFT storage order."""
    return np.fft.fftfreq(2 * n, d=1.0 / (2 * n)).astype(int)


def _near(m):
    return np.all(np.abs(m) <= NEAR_FIELD, axis=0)


def unit_cell_tables(n, gamma, tol=ORIGIN_TOL):
    """Cell averages of all components on the unit-spacing padded lattice.

    Far cells use a fixed 4^3 Gauss rule; cells within ``NEAR_FIELD`` of the
    origin are integrated adaptively and the origin cell by the homogeneity
    construction of :func:`origin_cell_average`.
    """
    gamma = check_gamma(gamma)
    off = _offsets(n).astype(float)
    m = np.stack(np.meshgrid(off, off, off, indexing="ij"))
    nodes, weights = _gauss_box(3)
    nodes = nodes - 0.5
    out = np.zeros((N_CELL_COMPONENTS,) + m.shape[1:])
    for (gx, gy, gz), w in zip(nodes, weights):
        out += w * kernel_components(m[0] + gx, m[1] + gy, m[2] + gz, gamma)

    near = _near(m)
    near[0, 0, 0] = False
    idx = np.nonzero(near)
    centres = m[(slice(None),) + idx].T
    vals = adaptive_box_integrals(
        lambda p: kernel_components(p[..., 0], p[..., 1], p[..., 2], gamma),
        centres - 0.5, 1.0, 3, tol)
    out[(slice(None),) + idx] = vals.T
    out[:, 0, 0, 0] = origin_cell_average(gamma, tol)
    return out


def unit_face_tables(n, gamma, tol=ORIGIN_TOL):
    """Face averages of the drift kernel on the unit-spacing padded lattice.

    Entry ``[d][m]`` is the average of ``b_d`` over the face normal to axis
    ``d`` located at ``z = m + e_d / 2``.  Summed over the six faces of a cell
    these reproduce the cell average of ``c`` by the divergence theorem.
    """
    gamma = check_gamma(gamma)
    off = _offsets(n).astype(float)
    m = np.stack(np.meshgrid(off, off, off, indexing="ij"))
    x = m[0] + 0.5
    nodes, weights = _gauss_box(2)
    nodes = nodes - 0.5
    bx = np.zeros(m.shape[1:])
    for (gy, gz), w in zip(nodes, weights):
        y, z = m[1] + gy, m[2] + gz
        bx += w * -2.0 * (x * x + y * y + z * z) ** (0.5 * gamma) * x

    near = _near(np.stack([x, m[1], m[2]])) & (np.abs(x) <= NEAR_FIELD + 0.5)
    idx = np.nonzero(near)
    xs = x[idx]
    lows = np.stack([m[1][idx], m[2][idx]], axis=1) - 0.5

    vals = np.empty(len(xs))
    for value in np.unique(xs):
        sel = xs == value

        def func(pts, face=value):
            y, z = pts[..., 0], pts[..., 1]
            return (-2.0 * (face * face + y * y + z * z) ** (0.5 * gamma) * face)[None]

        vals[sel] = adaptive_box_integrals(func, lows[sel], 1.0, 2, tol)[:, 0]
    bx[idx] = vals
    by = np.swapaxes(bx, 0, 1)
    bz = np.swapaxes(bx, 0, 2)
    return np.stack([bx, by, bz])


@dataclass(eq=False)
class KernelTables:
    """Cell-averaged kernels on the padded ``(2n)^3`` difference lattice.

    Arrays are stored in FFT order: index ``m`` holds offset ``m`` for
    ``m < n`` and ``m - 2n`` otherwise.
    """

    grid: VelocityGrid
    gamma: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    power: np.ndarray
    b_face: np.ndarray
    quadrature: int = QUADRATURE_VERSION
    workers: int = field(default=None, repr=False)

    @property
    def padded_shape(self):
        return (2 * self.grid.n,) * 3

    def components(self):
        """All 14 components stacked in storage order."""
        return np.concatenate([self.a, self.b, self.c[None], self.power[None], self.b_face])

    @cached_property
    def spectra(self):
        return scipy.fft.rfftn(self.components(), axes=(1, 2, 3), workers=self.workers)

    def matches(self, grid, gamma=None):
        same = self.grid == grid
        return same if gamma is None else same and self.gamma == gamma

    def offset(self, k):
        """Tables entries at integer offset triple ``k``: ``(a 3x3, b, c, power)``."""
        n2 = 2 * self.grid.n
        i = tuple(int(x) % n2 for x in k)
        a = np.zeros((3, 3))
        for c, (p, q) in enumerate(((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))):
            a[p, q] = a[q, p] = self.a[(c,) + i]
        return a, self.b[(slice(None),) + i], self.c[i], self.power[i]


def cell_averaged_tables(grid, gamma, tol=ORIGIN_TOL, cache_dir=None):
    """Build (or load from ``cache_dir``) the kernel tables for ``grid``."""
    gamma = check_gamma(gamma)
    cache_dir = os.environ.get("LANDAU_CACHE_DIR", cache_dir)
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / cache_name(grid, gamma)
        if path.exists():
            try:
                return load_tables(path)
            except storage.StorageError as exc:
                log.warning("ignoring unreadable table cache %s: %s", path, exc)
    cells = unit_cell_tables(grid.n, gamma, tol)
    faces = unit_face_tables(grid.n, gamma, tol)
    dv = grid.dv
    deg = component_degrees(gamma)
    cells = cells * (dv ** deg)[:, None, None, None]
    faces = faces * dv ** (gamma + 1)
    tables = KernelTables(grid, gamma, cells[A_SLICE], cells[B_SLICE], cells[C_INDEX],
                          cells[POWER_INDEX], faces)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_tables(tables, path)
    return tables


def cache_name(grid, gamma):
    return f"tables_n{grid.n}_L{grid.L!r}_g{gamma!r}_q{QUADRATURE_VERSION}.bin"


def save_tables(tables, path):
    storage.write_arrays(path, list(tables.components()), n=tables.grid.n, L=tables.grid.L,
                         gamma=tables.gamma, quadrature=tables.quadrature)


def load_tables(path):
    head = storage.read_header(path)
    n = head["n"]
    shape = (2 * n,) * 3
    if head["quadrature"] != QUADRATURE_VERSION:
        raise storage.StorageError(f"{path}: stale quadrature version {head['quadrature']}")
    head, comps = storage.read_arrays(path, [shape] * 14)
    comps = np.stack(comps)
    grid = VelocityGrid(n, head["L"])
    return KernelTables(grid, head["gamma"], comps[0:6], comps[6:9], comps[9], comps[10],
                        comps[11:14], quadrature=head["quadrature"])


def pointwise_tables(grid, gamma):
    """Pointwise ``a`` and ``b`` on the padded lattice with the origin zeroed.

    Used for the weak-form pair sums, where the diagonal ``v = v_*`` is
    excluded.
    """
    gamma = check_gamma(gamma)
    off = _offsets(grid.n) * grid.dv
    z = np.stack(np.meshgrid(off, off, off, indexing="ij"))
    with np.errstate(divide="ignore", invalid="ignore"):
        comps = kernel_components(z[0], z[1], z[2], gamma)
    comps[:, 0, 0, 0] = 0.0
    return comps[A_SLICE], comps[B_SLICE]
