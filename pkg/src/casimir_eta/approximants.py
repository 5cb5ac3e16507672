"""Closed-form surrogates for the plasma-model force reduction factor.

These are diagnostics only; the engine never uses them.  ``x`` is always
``lambda_P / L``.  Kinds:

``A``  second-order long-distance expansion
``B``  ``(1 + 11 x / 6 pi)^(-16/11)``
``C``  fourth-order expansion of ``B``
``U``  ``1 / (1 + 8 x / 3 pi)``, linear in ``L`` at short distance
"""

import numpy as np

from .exceptions import DomainError

KINDS = ("A", "B", "C", "U")


def eval_approximant(kind, x):
    kind = str(kind).upper()
    if kind not in KINDS:
        raise DomainError(f"approximant kind must be one of {KINDS}, got {kind!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("lambda_P/L must be non-negative")
    pi = np.pi
    if kind == "A":
        out = 1.0 - 8.0 / (3.0 * pi) * xa + 6.0 / pi ** 2 * xa ** 2
    elif kind == "B":
        out = (1.0 + 11.0 / (6.0 * pi) * xa) ** (-16.0 / 11.0)
    elif kind == "C":
        out = (1.0 - 8.0 / (3.0 * pi) * xa + 6.0 / pi ** 2 * xa ** 2
               - 38.0 / (3.0 * pi ** 3) * xa ** 3 + 931.0 / (9.0 * pi ** 4) * xa ** 4)
    else:
        out = 1.0 / (1.0 + 8.0 / (3.0 * pi) * xa)
    return float(out) if out.ndim == 0 else out


def approximant_report(x_grid, exact, kinds=KINDS):
    """Relative deviation of each approximant from exact plasma values.

    Parameters
    ----------
    x_grid : array_like
        ``lambda_P / L`` values.
    exact : array_like
        Exact eta_F on the same grid.

    Returns
    -------
    dict
        ``{"x": ..., "exact": ..., "<kind>": values, "dev_<kind>": signed
        relative deviation, "max_<kind>", "mean_<kind>"}``.  Values outside
        [0, 1] are kept as they are.
    """
    x = np.asarray(x_grid, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    if x.shape != exact.shape:
        raise DomainError(f"grid mismatch: {x.size} x-values but {exact.size} exact values")
    if np.any(exact <= 0.0):
        raise DomainError("exact values must be positive")
    report = {"x": x, "exact": exact}
    for kind in kinds:
        vals = np.atleast_1d(eval_approximant(kind, x))
        dev = vals / exact - 1.0
        report[kind] = vals
        report[f"dev_{kind}"] = dev
        report[f"max_{kind}"] = float(np.max(np.abs(dev)))
        report[f"mean_{kind}"] = float(np.mean(np.abs(dev)))
    return report
