"""Tabulated optical data and the dispersion relation for eps(i omega).

Frequencies in this module are photon energies in eV.  The main entry points:

* :func:`load_table` reads ``omega_eV,eps_imag`` or ``omega_eV,n,k`` files;
* :func:`eval_eps_pp` interpolates eps'' and extends it outside the data with
  an :class:`ExtrapolationPolicy`;
* :func:`fit_drude` fits the low-frequency data with a Drude model;
* :func:`kk_transform` / :func:`build_eps_grid` evaluate
  ``eps(i w) = 1 + 2/pi int x eps''(x) / (x^2 + w^2) dx``.
"""

import csv
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.optimize import least_squares

from . import _quadrature
from .constants import PHYSICAL
from .dielectric import DrudeParams, TabulatedDielectric
from .exceptions import ConvergenceError, DataError, DomainError, FitError

DEFAULT_KK_RANGE = (1e-6, 1e4)
DEFAULT_GRID = (1e-4, 1e3, 60)
HIGH_TAIL_CUTOFF = 1e4


@dataclass(frozen=True)
class OpticalTable:
    """Samples of eps''(x) on a strictly increasing grid of positive energies."""

    x: np.ndarray
    eps_pp: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        e = np.asarray(self.eps_pp, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "eps_pp", e)
        if x.ndim != 1 or x.shape != e.shape:
            raise DataError("x and eps_pp must be 1-D arrays of equal length")
        if x.size < 2:
            raise DataError("an optical table needs at least 2 samples")
        if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
            raise DataError("frequencies must be positive")
        if np.any(np.diff(x) <= 0.0):
            raise DataError("frequencies must be strictly increasing")
        if getattr(self, "_checked", True) and (np.any(e <= 0.0) or not np.all(np.isfinite(e))):
            raise DataError("eps'' must be positive")

    @classmethod
    def unchecked(cls, x, eps_pp, source_label=""):
        """Build a table without the eps'' > 0 check (test hook for degenerate data)."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_checked", False)
        obj.__init__(x, eps_pp, source_label)
        return obj

    def __len__(self):
        return self.x.size

    def digest(self):
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.x).tobytes())
        h.update(np.ascontiguousarray(self.eps_pp).tobytes())
        return h.hexdigest()


def load_table(path, format=None, source_label=None):
    """Read an optical-constants CSV.

    ``format`` is ``"two-column"`` (x, eps'') or ``"three-column"`` (x, n, k,
    converted with eps'' = 2 n k).  When omitted it is inferred from the
    header (``omega_eV,eps_imag`` or ``omega_eV,n,k``) or the column count.
    Lines starting with ``#`` are ignored.
    """
    path = Path(path)
    if format not in (None, "two-column", "three-column"):
        raise DataError(f"unknown table format {format!r}")
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc

    xs, ys = [], []
    with handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if not xs and not _is_number(cells[0]):
                header = [c.lower() for c in cells]
                if header == ["omega_ev", "eps_imag"]:
                    fmt = "two-column"
                elif header == ["omega_ev", "n", "k"]:
                    fmt = "three-column"
                else:
                    raise DataError(f"unrecognised header {','.join(cells)!r}", line=lineno)
                if format is not None and format != fmt:
                    raise DataError(f"header says {fmt} but {format} was requested", line=lineno)
                format = fmt
                continue
            if format is None:
                format = "two-column" if len(cells) == 2 else "three-column"
            ncol = 2 if format == "two-column" else 3
            if len(cells) != ncol:
                raise DataError(f"expected {ncol} columns, got {len(cells)}", line=lineno)
            try:
                vals = [float(c) for c in cells]
            except ValueError:
                raise DataError(f"malformed number in {','.join(cells)!r}", line=lineno) from None
            x = vals[0]
            eps_pp = vals[1] if ncol == 2 else 2.0 * vals[1] * vals[2]
            if not np.isfinite(x) or x <= 0.0:
                raise DataError(f"frequency must be positive, got {x}", line=lineno)
            if not np.isfinite(eps_pp) or eps_pp <= 0.0:
                raise DataError(f"eps'' must be positive, got {eps_pp}", line=lineno)
            if xs and x == xs[-1]:
                raise DataError(f"duplicate frequency {x}", line=lineno)
            if xs and x < xs[-1]:
                raise DataError(f"frequencies must increase ({x} after {xs[-1]})", line=lineno)
            xs.append(x)
            ys.append(eps_pp)
    if len(xs) < 2:
        raise DataError(f"{path}: need at least 2 data rows, found {len(xs)}")
    return OpticalTable(np.array(xs), np.array(ys), source_label or path.name)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


# -- extrapolation tails ------------------------------------------------------

@dataclass(frozen=True)
class DrudeTail:
    """Low-frequency Drude extension, parameters in eV."""

    omega_p: float
    gamma: float
    kind = "drude_tail"

    @classmethod
    def from_params(cls, params, units=PHYSICAL):
        return cls(units.to_ev(params.omega_p), units.to_ev(params.gamma))

    def __call__(self, x):
        g = self.gamma
        return self.omega_p ** 2 * g / (x * (x * x + g * g))

    def kk_below(self, a, w):
        """int_0^a x eps''(x) / (x^2 + w^2) dx in closed form."""
        g = self.gamma
        wp2g = self.omega_p ** 2 * g
        d = w * w - g * g
        near = np.abs(d) < 1e-6 * g * g
        d_safe = np.where(near, 1.0, d)
        generic = wp2g / d_safe * (np.arctan(a / g) / g - np.arctan(a / w) / w)
        equal = wp2g * (a / (2 * g * g * (a * a + g * g)) + np.arctan(a / g) / (2 * g ** 3))
        return np.where(near, equal, generic)


@dataclass(frozen=True)
class InverseOmega:
    """eps'' = amplitude / x below the data."""

    amplitude: float
    kind = "inverse_omega"

    @classmethod
    def matched(cls, table):
        return cls(float(table.eps_pp[0] * table.x[0]))

    def __call__(self, x):
        return self.amplitude / x

    def kk_below(self, a, w):
        return self.amplitude / w * np.arctan(a / w)


@dataclass(frozen=True)
class PowerLaw:
    """eps'' = amplitude * x**exponent above the data, zero beyond ``cutoff``."""

    exponent: float
    amplitude: float
    cutoff: float = HIGH_TAIL_CUTOFF
    kind = "power_law"

    @classmethod
    def fitted(cls, table, exponent=-3.0, decades=1.0, cutoff=HIGH_TAIL_CUTOFF):
        """Fix the exponent and fit the amplitude in log space over the last decades of data."""
        sel = table.x >= table.x[-1] / 10.0 ** decades
        logs = np.log(table.eps_pp[sel]) - exponent * np.log(table.x[sel])
        return cls(exponent, float(np.exp(np.mean(logs))), cutoff)

    def __call__(self, x):
        return np.where(x > self.cutoff, 0.0, self.amplitude * x ** self.exponent)


@dataclass(frozen=True)
class ZeroTail:
    kind = "zero"

    def __call__(self, x):
        return np.zeros_like(x)


INTERPOLATIONS = ("loglog_linear", "linlin_linear")


@dataclass(frozen=True)
class ExtrapolationPolicy:
    """How eps'' is interpolated inside the table and extended outside it."""

    low_end: Union[DrudeTail, InverseOmega]
    high_end: Union[PowerLaw, ZeroTail] = field(default_factory=ZeroTail)
    interpolation: str = "loglog_linear"
    seam_tolerance: Optional[float] = 0.05

    def __post_init__(self):
        if self.interpolation not in INTERPOLATIONS:
            raise DomainError(f"interpolation must be one of {INTERPOLATIONS}")

    @classmethod
    def default(cls, table, drude=None, units=PHYSICAL, **kwargs):
        """Drude (or matched 1/x) low tail and an x^-3 high tail fitted to the last decade."""
        if drude is None:
            low = InverseOmega.matched(table)
        elif isinstance(drude, DrudeParams):
            low = DrudeTail.from_params(drude, units)
        else:
            low = drude
        return cls(low, PowerLaw.fitted(table), **kwargs)

    def describe(self):
        return json.dumps({
            "low_end": {"kind": self.low_end.kind, **_fields(self.low_end)},
            "high_end": {"kind": self.high_end.kind, **_fields(self.high_end)},
            "interpolation": self.interpolation,
            "seam_tolerance": self.seam_tolerance,
        }, sort_keys=True)


def _fields(obj):
    return {k: float(v) for k, v in vars(obj).items()}


def check_seams(table, policy):
    """Raise :class:`DataError` if the low tail misses the first sample by more than the tolerance."""
    if policy.seam_tolerance is None:
        return
    x0, e0 = table.x[0], table.eps_pp[0]
    tail = float(policy.low_end(np.array(x0)))
    mismatch = abs(tail / e0 - 1.0)
    if mismatch > policy.seam_tolerance:
        raise DataError(f"low-frequency tail gives eps''={tail:.4g} at {x0:g} eV "
                        f"but the table has {e0:.4g} ({mismatch:.1%} mismatch)")


def eval_eps_pp(table, policy, x):
    """eps''(x) from the table, its interpolation and the policy tails."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("x must be positive")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    low = flat < table.x[0]
    high = flat > table.x[-1]
    inside = ~(low | high)
    if np.any(low):
        out[low] = policy.low_end(flat[low])
    if np.any(high):
        out[high] = policy.high_end(flat[high])
    if np.any(inside):
        xi = flat[inside]
        if policy.interpolation == "linlin_linear" or np.any(table.eps_pp <= 0.0):
            out[inside] = np.interp(xi, table.x, table.eps_pp)
        else:
            out[inside] = np.exp(np.interp(np.log(xi), np.log(table.x), np.log(table.eps_pp)))
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


# -- Drude fit ----------------------------------------------------------------

@dataclass(frozen=True)
class DrudeFitResult:
    params: DrudeParams
    omega_p_ev: float
    gamma_ev: float
    residual: float
    n_points: int
    fixed_omega_p: bool


def _drude_log_model(x, wp, g):
    return 2 * np.log(wp) + np.log(g) - np.log(x) - np.log(x * x + g * g)


def fit_drude(table, window=(None, 0.3), fixed_omega_p=None, units=PHYSICAL):
    """Least-squares Drude fit of log eps'' over an energy window.

    Parameters
    ----------
    table : OpticalTable
    window : (lo, hi)
        Energy window in eV; ``None`` means the table edge.
    fixed_omega_p : float, optional
        Plasma frequency in rad/s; only the relaxation rate is then fitted.
    units : UnitSystem
        Converts between rad/s and the table's eV.

    Returns
    -------
    DrudeFitResult
        Parameters (rad/s and eV) and the RMS relative residual.
    """
    lo = table.x[0] if window[0] is None else float(window[0])
    hi = table.x[-1] if window[1] is None else float(window[1])
    sel = (table.x >= lo) & (table.x <= hi)
    x, e = table.x[sel], table.eps_pp[sel]
    need = 2 if fixed_omega_p is not None else 3
    if x.size == 0:
        raise FitError(f"fit window [{lo:g}, {hi:g}] eV contains no samples")
    if x.size < need:
        raise FitError(f"fit window [{lo:g}, {hi:g}] eV holds {x.size} samples, need {need}")
    log_e = np.log(e)

    if fixed_omega_p is not None:
        wp = units.to_ev(float(fixed_omega_p))
        g0 = float(np.median(e * x ** 3)) / wp ** 2

        def resid(p):
            return _drude_log_model(x, wp, np.exp(p[0])) - log_e
        start = [np.log(g0)]
    else:
        # 1/(x eps'') = x^2/(wp^2 g) + g/wp^2 gives a linear first guess
        slope, icpt = np.polyfit(x * x, 1.0 / (x * e), 1)
        if slope > 0 and icpt > 0:
            g0 = np.sqrt(icpt / slope)
            wp0 = np.sqrt(g0 / icpt)
        else:
            g0 = 0.01 * x[0]
            wp0 = np.sqrt(np.median(e * x ** 3) / g0)

        def resid(p):
            return _drude_log_model(x, np.exp(p[0]), np.exp(p[1])) - log_e
        start = [np.log(wp0), np.log(g0)]

    sol = least_squares(resid, start, method="lm" if x.size >= len(start) else "trf",
                        xtol=1e-14, ftol=1e-14, gtol=1e-14)
    jac = np.atleast_2d(sol.jac)
    sv = np.linalg.svd(jac, compute_uv=False)
    if not sol.success or sv.size < len(start) or sv[-1] <= 1e-10 * max(sv[0], 1e-300):
        raise FitError("degenerate Drude fit: parameters are not determined by the window")
    if fixed_omega_p is not None:
        g = float(np.exp(sol.x[0]))
    else:
        wp, g = (float(v) for v in np.exp(sol.x))
    model = np.exp(_drude_log_model(x, wp, g))
    residual = float(np.sqrt(np.mean((model / e - 1.0) ** 2)))
    params = DrudeParams(units.ev(wp), units.ev(g))
    return DrudeFitResult(params, wp, g, residual, int(x.size), fixed_omega_p is not None)


# -- dispersion relation --------------------------------------------------------

def _check_range(integration_range):
    lo, hi = (float(v) for v in integration_range)
    if not 0.0 < lo < hi:
        raise DomainError("integration range must satisfy 0 < x_min < x_max")
    return lo, hi


def kk_transform(table, policy, omega, integration_range=DEFAULT_KK_RANGE,
                 low_tail="analytic", rtol=1e-9, max_panels=20000):
    """eps(i omega) from eps''(x) on the real axis.

    The numerical integral runs over ``integration_range`` in ``log x`` with
    panel edges at every table node and at ``x = omega``.  With
    ``low_tail="analytic"`` (default) the low-frequency tail model is also
    integrated in closed form from 0 up to ``x_min`` when ``x_min`` lies below
    the data; ``low_tail="truncate"`` keeps the bare finite-range integral.
    """
    if low_tail not in ("analytic", "truncate"):
        raise DomainError("low_tail must be 'analytic' or 'truncate'")
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise DomainError("omega must be positive")
    lo, hi = _check_range(integration_range)
    flat = np.atleast_1d(w).ravel()
    w2 = flat * flat

    def integrand(u):
        x = np.exp(u)
        x2 = x * x
        e = eval_eps_pp(table, policy, x)
        return (x2 * e)[:, None] / (x2[:, None] + w2[None, :])

    inner = [table.x, flat]
    cutoff = getattr(policy.high_end, "cutoff", None)
    if cutoff is not None:
        inner.append([cutoff])
    pts = np.concatenate([np.asarray(p, float).ravel() for p in inner])
    pts = pts[(pts > lo) & (pts < hi)]
    breaks = np.unique(np.log(np.concatenate([[lo, hi], pts])))
    try:
        val, _ = _quadrature.integrate(integrand, breaks, rtol=rtol, atol=0.0,
                                       max_panels=max(max_panels, 4 * breaks.size))
    except ConvergenceError as exc:
        est = None if exc.estimate is None else 1.0 + 2.0 / np.pi * exc.estimate
        raise ConvergenceError(f"Kramers-Kronig integral: {exc}", estimate=est,
                               error=exc.error) from exc
    if low_tail == "analytic" and lo <= table.x[0]:
        val = val + policy.low_end.kk_below(lo, flat)
    out = 1.0 + 2.0 / np.pi * val
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


@dataclass(frozen=True)
class EpsIGrid:
    """eps(i omega) sampled on a grid of energies (eV), tagged with a fingerprint."""

    omega: np.ndarray
    eps_i: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "eps_i", np.asarray(self.eps_i, dtype=float))
        if self.omega.shape != self.eps_i.shape or self.omega.ndim != 1:
            raise DataError("grid columns must be 1-D and of equal length")

    def dielectric(self, units=PHYSICAL, label=""):
        return TabulatedDielectric(self.omega, self.eps_i, units, label=label or self.fingerprint[:12])

    def to_csv(self, path, extra_header=None):
        """Write ``# fingerprint=...`` followed by ``omega_eV,eps_i`` rows, atomically."""
        path = Path(path)
        lines = [f"# fingerprint={self.fingerprint}"]
        lines += [f"# {k}={v}" for k, v in (extra_header or {}).items()]
        lines.append("omega_eV,eps_i")
        lines += [f"{w:.17g},{e:.17g}" for w, e in zip(self.omega, self.eps_i)]
        text = "\n".join(lines) + "\n"
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
        return path

    @classmethod
    def from_csv(cls, path):
        path = Path(path)
        fingerprint = ""
        rows = []
        with path.open() as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    if key.strip() == "fingerprint":
                        fingerprint = value.strip()
                    continue
                if line.lower().replace(" ", "") == "omega_ev,eps_i":
                    continue
                try:
                    w, e = (float(v) for v in line.split(","))
                except ValueError:
                    raise DataError(f"malformed grid row {line!r}", line=lineno) from None
                rows.append((w, e))
        if len(rows) < 1:
            raise DataError(f"{path}: empty eps(i omega) grid")
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], fingerprint)


def grid_fingerprint(table, policy, omega_grid, integration_range, low_tail="analytic"):
    payload = json.dumps({
        "table": table.digest(),
        "policy": policy.describe(),
        "omega": [float(v).hex() for v in np.asarray(omega_grid, float)],
        "range": [float(v) for v in integration_range],
        "low_tail": low_tail,
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def default_omega_grid(lo=DEFAULT_GRID[0], hi=DEFAULT_GRID[1], count=DEFAULT_GRID[2]):
    return np.logspace(np.log10(lo), np.log10(hi), int(count))


def build_eps_grid(table, policy, omega_grid=None, integration_range=DEFAULT_KK_RANGE,
                   cache_dir=None, low_tail="analytic"):
    """Evaluate :func:`kk_transform` on ``omega_grid`` (eV), reusing a cached file when present."""
    omega_grid = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, float)
    if omega_grid.ndim != 1 or omega_grid.size < 1:
        raise DomainError("omega_grid must be a non-empty 1-D sequence")
    if np.any(omega_grid <= 0.0) or np.any(np.diff(omega_grid) <= 0.0):
        raise DomainError("omega_grid must be positive and strictly increasing")
    check_seams(table, policy)
    fp = grid_fingerprint(table, policy, omega_grid, integration_range, low_tail)
    cache_file = None
    if cache_dir is not None:
        cache_file = Path(cache_dir) / f"epsgrid-{fp[:20]}.csv"
        if cache_file.exists():
            cached = EpsIGrid.from_csv(cache_file)
            if cached.fingerprint == fp:
                return cached
    eps = kk_transform(table, policy, omega_grid, integration_range, low_tail=low_tail)
    grid = EpsIGrid(omega_grid, np.atleast_1d(eps), fp)
    if cache_file is not None:
        grid.to_csv(cache_file)
    return grid


def range_sensitivity(table, policy, omega_grid=None, integration_range=DEFAULT_KK_RANGE,
                      factor=10 ** 0.5, low_tail="analytic"):
    """Largest relative change of eps(i omega) when either range end moves by ``factor``.

    Returns a dict mapping a perturbation label to the maximum relative change
    over ``omega_grid``.
    """
    omega_grid = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, float)
    lo, hi = _check_range(integration_range)
    base = kk_transform(table, policy, omega_grid, (lo, hi), low_tail=low_tail)
    variants = {
        "x_min/f": (lo / factor, hi),
        "x_min*f": (lo * factor, hi),
        "x_max/f": (lo, hi / factor),
        "x_max*f": (lo, hi * factor),
        "widen": (lo / factor, hi * factor),
        "shrink": (lo * factor, hi / factor),
    }
    out = {}
    for name, rng in variants.items():
        alt = kk_transform(table, policy, omega_grid, rng, low_tail=low_tail)
        out[name] = float(np.max(np.abs(alt / base - 1.0)))
    return out
