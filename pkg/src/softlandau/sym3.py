"""Eigenvalues of fields of symmetric 3x3 matrices.

Fields are stacked components in :data:`grid.SYM_COMPONENTS` order, so a whole
``(6, n, n, n)`` field is handled in one batched LAPACK call.
"""

import numpy as np


def eigenvalues(m):
    """Eigenvalues in ascending order, shape ``(3, ...)``; NaN where ``m`` is not finite."""
    m = np.asarray(m, dtype=float)
    a00, a11, a22, a01, a02, a12 = m
    full = np.stack([np.stack([a00, a01, a02], axis=-1),
                     np.stack([a01, a11, a12], axis=-1),
                     np.stack([a02, a12, a22], axis=-1)], axis=-1)
    ok = np.all(np.isfinite(full), axis=(-2, -1))
    out = np.full(full.shape[:-1], np.nan)
    # LAPACK rejects non-finite input; those entries stay NaN
    out[ok] = np.linalg.eigvalsh(full[ok])
    return np.moveaxis(out, -1, 0)


def min_eigenvalue(m):
    return eigenvalues(m)[0]


def max_eigenvalue(m):
    return eigenvalues(m)[2]
