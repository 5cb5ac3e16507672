"""Vectorised adaptive Gauss-Kronrod (7/15) quadrature.

The integrand is evaluated on every active panel at once, which is what makes
the nested Lifshitz integrals cheap in NumPy: ``f`` receives a flat array of
abscissae and may return either one value per abscissa or a trailing vector of
components (for instance one inner integral per outer node).
"""

import numpy as np

from .exceptions import ConvergenceError

# Kronrod 15-point nodes (non-negative half) and weights; the Gauss 7-point
# rule uses every second node starting from index 1.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]


def _panels(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    fx = fx.reshape((a.size, 15) + fx.shape[1:])
    k = np.tensordot(KRONROD_WEIGHTS, fx, axes=([0], [1]))
    g = np.tensordot(GAUSS_WEIGHTS, fx, axes=([0], [1]))
    scale = half.reshape((-1,) + (1,) * (k.ndim - 1))
    return k * scale, np.abs(k - g) * np.abs(scale)


def integrate(f, breakpoints, rtol=1e-8, atol=0.0, max_panels=4000, n_drive=None):
    """Integrate ``f`` over the interval spanned by ``breakpoints``.

    Parameters
    ----------
    f : callable
        Maps a 1-D array of abscissae to an array whose first axis matches it.
        Extra trailing axes are integrated component-wise.
    breakpoints : sequence of float
        Sorted panel boundaries; the integrand should be smooth inside each.
    rtol : float
    atol : float or array_like
        Each driving component stops refining once its summed error estimate
        is below ``max(atol, rtol * |value|)``.  An array gives one absolute
        tolerance per component of ``f``.
    max_panels : int
        Hard cap on the number of panels before :class:`ConvergenceError`.
    n_drive : int, optional
        Only the first ``n_drive`` components (flattened) steer refinement;
        the rest are integrated on the same mesh.  Default: all components.

    Returns
    -------
    value, error : ndarray or float
    """
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("breakpoints must be a strictly increasing sequence")
    a, b = edges[:-1].copy(), edges[1:].copy()
    val, err = _panels(f, a, b)

    while True:
        total = val.sum(axis=0)
        total_err = err.sum(axis=0)
        flat_total = np.atleast_1d(total).ravel()
        flat_err = np.atleast_1d(total_err).ravel()
        drive = slice(None) if n_drive is None else slice(0, n_drive)
        floor = np.broadcast_to(np.asarray(atol, dtype=float).ravel(), flat_total.shape)
        tol = np.maximum(floor[drive], rtol * np.abs(flat_total[drive]))
        excess = flat_err[drive] > tol
        if not np.any(excess):
            return total, total_err
        if a.size >= max_panels:
            raise ConvergenceError(
                f"quadrature did not converge within {max_panels} panels "
                f"(error {flat_err[drive].max():.3g})",
                estimate=total, error=total_err)

        per_panel = err.reshape(a.size, -1)[:, drive]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(tol > 0, per_panel / tol, np.where(per_panel > 0, np.inf, 0.0))
        score = ratio[:, excess].max(axis=1)
        # panels left untouched then carry at most half of the budget
        split = score > 0.5 / a.size
        if not np.any(split):
            split = score >= score.max()
        mid = 0.5 * (a[split] + b[split])
        new_a = np.concatenate([a[split], mid])
        new_b = np.concatenate([mid, b[split]])
        new_val, new_err = _panels(f, new_a, new_b)
        keep = ~split
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
