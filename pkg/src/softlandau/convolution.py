"""Nonlocal coefficients ``a*f``, ``b*f``, ``c*f`` by zero-padded FFT convolution.

The density is padded to ``2n`` per axis, so the circular product of
transforms is the exact linear convolution on the lattice::

    out(v_i) = sum_j K(v_i - v_j) f(v_j) dv^3
"""

import warnings

import numpy as np
import scipy.fft

from .kernel import KernelTables

NEGATIVE_WARN = 1e-10

_A = slice(0, 6)
_B = slice(6, 9)
_C = 9
_POWER = 10
_FACE = slice(11, 14)


def _check(f, tables):
    if not isinstance(tables, KernelTables):
        raise TypeError("tables must be KernelTables")
    f = np.asarray(f, dtype=float)
    if f.shape != tables.grid.shape:
        raise ValueError(f"density shape {f.shape} does not match tables grid {tables.grid.shape}")
    lo = f.min(initial=0.0)
    if lo < -NEGATIVE_WARN * max(np.abs(f).max(), 1.0):
        warnings.warn(f"convolving a density with negative values (min {lo:.3e})",
                      RuntimeWarning, stacklevel=3)
    return f


def density_spectrum(f, tables):
    """Forward transform of the zero-padded density; shared by all components."""
    f = _check(f, tables)
    return scipy.fft.rfftn(f, s=tables.padded_shape, workers=tables.workers)


def _apply(fhat, tables, which):
    n = tables.grid.n
    spec = tables.spectra[which]
    prod = spec * fhat
    out = scipy.fft.irfftn(prod, s=tables.padded_shape, axes=(-3, -2, -1), workers=tables.workers)
    return out[..., :n, :n, :n] * tables.grid.cell_volume


def convolve_a(f, tables, fhat=None):
    """``abar = a * f`` as a ``(6, n, n, n)`` symmetric field."""
    fhat = density_spectrum(f, tables) if fhat is None else fhat
    return _apply(fhat, tables, _A)


def convolve_b(f, tables, fhat=None):
    """``bbar = b * f`` at the nodes, ``(3, n, n, n)``."""
    fhat = density_spectrum(f, tables) if fhat is None else fhat
    return _apply(fhat, tables, _B)


def convolve_c(f, tables, fhat=None):
    fhat = density_spectrum(f, tables) if fhat is None else fhat
    return _apply(fhat, tables, _C)


def convolve_power(f, tables, fhat=None):
    """``|.|^gamma * f`` with the cell-averaged interaction kernel."""
    fhat = density_spectrum(f, tables) if fhat is None else fhat
    return _apply(fhat, tables, _POWER)


def convolve_b_faces(f, tables, fhat=None):
    """Drift at the interior faces, one array per axis.

    Entry ``d`` has length ``n - 1`` along axis ``d``; index ``i`` sits on
    the face between nodes ``i`` and ``i + 1``.
    """
    fhat = density_spectrum(f, tables) if fhat is None else fhat
    full = _apply(fhat, tables, _FACE)
    n = tables.grid.n
    out = []
    for d in range(3):
        sl = [slice(None)] * 3
        sl[d] = slice(0, n - 1)
        out.append(full[d][tuple(sl)])
    return out


def direct_convolve(f, table, grid):
    """O(N^2) reference: ``sum_j table[(i - j) mod 2n] f_j dv^3``.

    ``table`` may carry leading component axes.
    """
    f = np.asarray(f, dtype=float)
    table = np.asarray(table, dtype=float)
    n = grid.n
    lead = table.shape[:-3]
    out = np.zeros(lead + grid.shape)
    src = np.argwhere(f != 0)
    i = np.arange(n)
    for j in src:
        wj = f[tuple(j)]
        idx = np.ix_((i - j[0]) % (2 * n), (i - j[1]) % (2 * n), (i - j[2]) % (2 * n))
        out += wj * table[(Ellipsis,) + idx]
    return out * grid.cell_volume
