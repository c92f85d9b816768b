"""Numeric verifiers for the Hardy-Littlewood-Sobolev and Pitt inequalities.

Both return a ratio ``lhs / rhs``; bounded ratios over families of inputs and
under refinement are the numerical footprint of the inequalities.  Sharp
constants are not computed.

Transform convention
--------------------
For a grid field ``g`` the transform approximates the continuous one::

    ghat(xi) = int g(v) exp(-i xi . v) dv  ~  dv^3 sum_k g_k exp(-i xi . v_k)

on the lattice ``xi_m = 2 pi m / (2 L)``, ``m`` in DFT order, and frequency
integrals carry the measure ``dxi / (2 pi)^3``.  With these factors the
discrete Plancherel identity ``sum |g|^2 dv^3 = sum |ghat|^2 dxi^3 / (2 pi)^3``
holds exactly.
"""

import numpy as np
import scipy.fft

from .convolution import convolve_power
from .grid import gradient, integrate
from .kernel import NEAR_FIELD, _gauss_box, adaptive_box_integrals, check_gamma


def hls_exponent(gamma):
    """Lebesgue exponent ``6 / (6 + gamma)`` paired with ``|z|^gamma`` in 3D."""
    return 6.0 / (6.0 + gamma)


def _norm(f, grid, r):
    return integrate(np.abs(f) ** r, grid) ** (1.0 / r)


def hls_ratio(f, g, tables):
    """``int int |v - v_*|^gamma f(v) g(v_*) / (||f||_r ||g||_r)``, ``r = 6/(6+gamma)``.

    The double integral uses the cell-averaged interaction kernel of
    ``tables``, so a single-cell input picks up the origin-cell average.
    """
    grid = tables.grid
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.min(initial=0.0) < 0 or g.min(initial=0.0) < 0:
        raise ValueError("hls_ratio expects nonnegative fields")
    r = hls_exponent(tables.gamma)
    den = _norm(f, grid, r) * _norm(g, grid, r)
    if den == 0:
        raise ValueError("hls_ratio: zero denominator (an input vanishes identically)")
    return float(integrate(f * convolve_power(g, tables), grid) / den)


# ---------------------------------------------------------------- transforms

def frequencies(grid):
    """Angular frequencies ``2 pi m / (2 L)`` in DFT order, one axis."""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.dv)


def fourier_transform(g, grid):
    """Approximate continuous transform of ``g`` on the frequency lattice.

    Returns ``(xi, ghat)`` with ``xi`` the 1D frequency axis (DFT order) and
    ``ghat`` complex of the grid shape.
    """
    xi = frequencies(grid)
    phase = np.exp(-1j * xi * grid.axis[0])
    out = scipy.fft.fftn(np.asarray(g, dtype=float)) * grid.cell_volume
    return xi, out * phase[:, None, None] * phase[None, :, None] * phase[None, None, :]


def _corner_cube(func, degree):
    """Integral of a degree-``degree`` homogeneous ``func`` over ``[0, 1]^3``.

    The cube is its own corner copy scaled by 1/2 plus seven half-cubes away
    from the singular corner, so the integral is the seven-piece sum divided
    by ``1 - 2^-(3 + degree)``.
    """
    halves = 0.5 * np.array([c for c in np.ndindex(2, 2, 2) if any(c)], dtype=float)
    return adaptive_box_integrals(func, halves, 0.5, 3).sum(axis=0) / (1.0 - 2.0 ** -(3.0 + degree))


def node_power_weights(grid, gamma):
    """Cell moments of ``|v|^gamma`` for the cells centred on the grid nodes.

    Returns an array ``(4, n, n, n)``: the cell average of ``|v|^gamma`` and
    the three first moments ``dv^-3 int_cell |v|^gamma (v - v_k) dv``.  The
    first moments let the weighted integral follow the linear variation of
    the integrand across the cell, which matters in the cells touching the
    origin.  Those eight corner cells use :func:`_corner_cube`, cells in the
    near field are integrated adaptively and the rest with the Gauss rule.
    """
    gamma = check_gamma(gamma)
    n = grid.n
    lows = np.arange(n) - n // 2  # unit-lattice lower corners along an axis
    m = np.stack(np.meshgrid(lows, lows, lows, indexing="ij")).astype(float)

    def moments(p):
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        w = (x * x + y * y + z * z) ** (0.5 * gamma)
        return np.stack([w, w * x, w * y, w * z])

    nodes, weights = _gauss_box(3)
    out = np.zeros((4,) + grid.shape)
    for node, w in zip(nodes, weights):
        out += w * moments(np.moveaxis(m, 0, -1) + node)

    corner = np.all((m == 0) | (m == -1), axis=0)
    near = np.all((m >= -NEAR_FIELD - 1) & (m <= NEAR_FIELD), axis=0) & ~corner
    idx = np.nonzero(near)
    out[(slice(None),) + idx] = adaptive_box_integrals(moments, m[(slice(None),) + idx].T, 1.0, 3).T
    avg = _corner_cube(lambda p: moments(p)[:1], gamma)[0]
    first = _corner_cube(lambda p: moments(p)[1:2], gamma + 1.0)[0]
    idx = np.nonzero(corner)
    sign = np.where(m[(slice(None),) + idx] < 0, -1.0, 1.0)
    out[0][idx] = avg
    out[1:][(slice(None),) + idx] = sign * first
    # moments about the node rather than the origin
    out[1:] -= (m + 0.5) * out[0]
    out[0] *= grid.dv ** gamma
    out[1:] *= grid.dv ** (gamma + 1.0)
    return out


def pitt_ratio(g, grid, gamma, weights=None):
    """``int |v|^gamma g^2 dv / int |xi|^(-gamma) |ghat|^2 dxi / (2 pi)^3``.

    The weighted integral uses the cell moments of :func:`node_power_weights`
    (precomputed ones may be passed as ``weights``) with a central-difference
    gradient of ``g^2``.  See the
    module notes for the transform convention.
    """
    gamma = check_gamma(gamma)
    g = np.asarray(g, dtype=float)
    if weights is None:
        weights = node_power_weights(grid, gamma)
    g2 = g ** 2
    num = integrate(weights[0] * g2 + np.sum(weights[1:] * gradient(g2, grid), axis=0), grid)
    xi, ghat = fourier_transform(g, grid)
    k2 = xi[:, None, None] ** 2 + xi[None, :, None] ** 2 + xi[None, None, :] ** 2
    dxi = 2.0 * np.pi / (2.0 * grid.L)
    den = np.sum(k2 ** (-gamma / 2.0) * np.abs(ghat) ** 2) * (dxi / (2.0 * np.pi)) ** 3
    if den == 0:
        raise ValueError("pitt_ratio: zero denominator (input vanishes identically)")
    return float(num / den)
