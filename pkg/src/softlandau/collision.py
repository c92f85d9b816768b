"""Landau collision operator in conservative flux form, and its weak form.

``Q(f) = div F`` with ``F = abar grad f - bbar f`` assembled on the cell faces:

* ``abar`` on a face is the mean of the two adjacent nodal values;
* the normal derivative on a face is the two-point difference, tangential
  derivatives are averaged nodal central differences;
* ``bbar`` on a face is the convolution with the face-averaged drift kernel,
  whose discrete divergence equals ``c * f`` cell by cell;
* the outer boundary faces carry zero flux.

Mass is therefore conserved to rounding; momentum and energy to second order.
"""

import numpy as np
import scipy.fft

from .convolution import convolve_a, convolve_b_faces, density_spectrum
from .grid import gradient, integrate
from .kernel import check_gamma, kernel_a, kernel_b, pointwise_tables

# component index of abar[d, j] in the 6-vector layout
_SYM = np.array([[0, 3, 4], [3, 1, 5], [4, 5, 2]])


def _pair(d, n):
    lo = [slice(None)] * 3
    hi = [slice(None)] * 3
    lo[d] = slice(0, n - 1)
    hi[d] = slice(1, n)
    return tuple(lo), tuple(hi)


def diffusive_fluxes(f, abar, grid):
    """``(abar grad f)_d`` on the interior faces normal to each axis ``d``."""
    n, dv = grid.n, grid.dv
    grad = gradient(f, grid)
    fluxes = []
    for d in range(3):
        lo, hi = _pair(d, n)
        flux = 0.0
        for j in range(3):
            a_face = 0.5 * (abar[_SYM[d, j]][lo] + abar[_SYM[d, j]][hi])
            if j == d:
                dfj = (f[hi] - f[lo]) / dv
            else:
                dfj = 0.5 * (grad[j][lo] + grad[j][hi])
            flux = flux + a_face * dfj
        fluxes.append(flux)
    return fluxes


def face_fluxes(f, tables, abar=None, bface=None):
    """Normal flux on the interior faces, one ``(.., n-1, ..)`` array per axis."""
    f = np.asarray(f, dtype=float)
    grid = tables.grid
    if abar is None or bface is None:
        fhat = density_spectrum(f, tables)
        abar = convolve_a(f, tables, fhat) if abar is None else abar
        bface = convolve_b_faces(f, tables, fhat) if bface is None else bface
    fluxes = diffusive_fluxes(f, abar, grid)
    for d in range(3):
        lo, hi = _pair(d, grid.n)
        fluxes[d] = fluxes[d] - bface[d] * 0.5 * (f[lo] + f[hi])
    return fluxes


def face_pairing(fluxes, g, grid):
    """``sum_faces F_d (g_hi - g_lo) / dv * dv^3``, the face form of ``int F . grad g``."""
    total = 0.0
    for d, flux in enumerate(fluxes):
        total += np.sum(flux * np.diff(g, axis=d)) / grid.dv
    return total * grid.cell_volume


def low_order_fluxes(f, abar, bface, grid):
    """Monotone companion flux: diagonal diffusion only, upwinded drift.

    With nonnegative ``abar`` diagonals this gives a forward-Euler update
    with nonnegative weights under the parabolic step bound.
    """
    n, dv = grid.n, grid.dv
    fluxes = []
    for d in range(3):
        lo, hi = _pair(d, n)
        a_face = 0.5 * (abar[d][lo] + abar[d][hi])
        b = bface[d]
        upwind = np.maximum(b, 0.0) * f[lo] + np.minimum(b, 0.0) * f[hi]
        fluxes.append(a_face * (f[hi] - f[lo]) / dv - upwind)
    return fluxes


def divergence(fluxes, grid):
    """Cell divergence of interior face fluxes with zero flux on the boundary."""
    q = np.zeros(grid.shape)
    for d, flux in enumerate(fluxes):
        pad = [(0, 0)] * 3
        pad[d] = (1, 1)
        full = np.pad(flux, pad)
        q += np.diff(full, axis=d)
    return q / grid.dv


def collision_operator(f, tables):
    """Discrete ``Q(f, f)`` on the lattice of ``tables``."""
    f = np.asarray(f, dtype=float)
    if f.shape != tables.grid.shape:
        raise ValueError(f"density shape {f.shape} does not match tables grid {tables.grid.shape}")
    return divergence(face_fluxes(f, tables), tables.grid)


def weak_form_operator(grad_phi, hess_phi, v, v_star, gamma):
    """``L phi(v, v_*) = 1/2 a(v - v_*) : hess phi(v) + b(v - v_*) . grad phi(v)``.

    ``grad_phi`` and ``hess_phi`` are the derivatives of the test function
    evaluated at ``v``.
    """
    z = np.asarray(v, dtype=float) - np.asarray(v_star, dtype=float)
    if not np.any(z):
        raise ValueError("weak-form operator is singular at v = v_*")
    a = kernel_a(z, gamma)
    b = kernel_b(z, gamma)
    return 0.5 * np.sum(a * np.asarray(hess_phi)) + b @ np.asarray(grad_phi)


def weak_form_rhs(f, phi, grid, gamma):
    """Rate ``d/dt int phi f`` from the pair sum of ``L phi`` with pointwise kernels.

    Integrating ``Q = div(abar grad f - bbar f)`` by parts against ``phi``
    and using ``bbar = div abar`` gives
    ``int int f f_* (a : hess phi + 2 b . grad phi)``, which is twice the
    pair sum of ``L phi``; the factor is included so the result is directly
    comparable with ``int Q phi``.

    ``phi`` is the test function sampled on the grid; its derivatives are
    taken by finite differences.  The pair sum is evaluated as a convolution
    with kernel tables whose origin entry is zero, which is the same sum with
    the diagonal ``v = v_*`` removed.
    """
    gamma = check_gamma(gamma)
    f = np.asarray(f, dtype=float)
    phi = np.asarray(phi, dtype=float)
    grad = gradient(phi, grid)
    hess = np.stack([gradient(grad[i], grid) for i in range(3)])
    a_tab, b_tab = pointwise_tables(grid, gamma)
    shape = (2 * grid.n,) * 3
    fhat = scipy.fft.rfftn(f, s=shape)
    n = grid.n

    def conv(table):
        spec = scipy.fft.rfftn(table, axes=(-3, -2, -1))
        out = scipy.fft.irfftn(spec * fhat, s=shape, axes=(-3, -2, -1))
        return out[..., :n, :n, :n] * grid.cell_volume

    abar = conv(a_tab)
    bbar = conv(b_tab)
    density = 0.0
    for c, (i, j) in enumerate(((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))):
        weight = 1.0 if i == j else 2.0
        density = density + 0.5 * weight * abar[c] * hess[i, j]
    density = density + np.sum(bbar * grad, axis=0)
    return 2.0 * integrate(f * density, grid)
