"""Reduction factors of the Casimir force and energy between plane mirrors.

The double integrals over the dimensionless wavevector ``K = kappa L`` and
frequency ``Omega = omega L / c`` are done with the substitution
``Omega = K t``:

    eta_F = 120/pi^4 * int_0^inf dK K^3 int_0^1 dt sum_p  r_p^2 e^{-2K} / (1 - r_p^2 e^{-2K})
    eta_E = 180/pi^4 * int_0^inf dK K^2 int_0^1 dt sum_p -log(1 - r_p^2 e^{-2K})

where ``r_p^2`` is the product of the two mirrors' amplitudes.  The inner
t-integral is computed for all outer nodes at once; both factors share the
same amplitude evaluations.
"""

import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from . import _quadrature
from ._validation import check_positive
from .constants import PHYSICAL
from .exceptions import ConvergenceError, DomainError
from .reflectivity import _mirror

FORCE_PREFACTOR = 120.0 / np.pi ** 4
ENERGY_PREFACTOR = 180.0 / np.pi ** 4
ALPHA_REFERENCE = 1.193

_K_BREAKS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
_T_BREAKS = (0.0, 1e-3, 1e-2, 0.1, 0.4, 1.0)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncations for every integral in the engine.

    ``spectral_range`` is an ``(low, high)`` pair in eV.  When set, each
    dielectric is frozen below ``low`` and made transparent above ``high``;
    ``None`` leaves analytic models untouched.
    """

    rel_tol: float = 1e-5
    abs_tol: float = 1e-12
    k_max: float = 40.0
    max_subdivisions: int = 4000
    spectral_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-2:
            raise DomainError("rel_tol must lie in (0, 1e-2]")
        if self.abs_tol < 0.0:
            raise DomainError("abs_tol must be non-negative")
        if self.k_max < 20.0:
            raise DomainError("k_max must be at least 20")
        if self.max_subdivisions < 16:
            raise DomainError("max_subdivisions must be at least 16")
        if self.spectral_range is not None:
            lo, hi = (float(v) for v in self.spectral_range)
            if not 0.0 < lo < hi:
                raise DomainError("spectral_range must satisfy 0 < low < high")
            object.__setattr__(self, "spectral_range", (lo, hi))


@dataclass(frozen=True)
class ReductionResult:
    L: float
    eta_f: float
    eta_e: float
    force_per_area: float
    energy_per_area: float
    err_f: float
    err_e: float
    units: str = "physical"

    def as_dict(self):
        return asdict(self)


def ideal_energy(area, L, units=PHYSICAL):
    """Perfect-mirror Casimir energy A hbar c pi^2 / (720 L^3), in J."""
    area = check_positive(area, "area")
    L = check_positive(L, "L")
    return area * units.hbar * units.c * np.pi ** 2 / (720.0 * L ** 3)


def ideal_force(area, L, units=PHYSICAL):
    """Perfect-mirror Casimir force A hbar c pi^2 / (240 L^4), in N."""
    area = check_positive(area, "area")
    L = check_positive(L, "L")
    return area * units.hbar * units.c * np.pi ** 2 / (240.0 * L ** 4)


def _tail_bounds(k_max):
    k = k_max
    e = np.exp(-2.0 * k)
    force = FORCE_PREFACTOR * 2.0 * e * (k ** 3 / 2 + 3 * k ** 2 / 4 + 3 * k / 4 + 3.0 / 8)
    energy = ENERGY_PREFACTOR * 2.0 * e * (k ** 2 / 2 + k / 2 + 0.25) / -np.expm1(-2.0 * k)
    return force, energy


def _prepare(mirror1, mirror2, cfg, units):
    mirror2 = mirror1 if mirror2 is None else mirror2
    if cfg.spectral_range is not None:
        lo, hi = (units.ev(v) for v in cfg.spectral_range)
        mirror1 = mirror1.map_dielectrics(lambda d: d.clamped(lo, hi))
        mirror2 = mirror2.map_dielectrics(lambda d: d.clamped(lo, hi))
    return mirror1, mirror2


def _integrals(mirror1, mirror2, L, cfg, units):
    c = units.c
    inner_rtol = 0.1 * cfg.rel_tol

    def inner(K):
        a = (K * c / L)[None, :]
        x = np.exp(-2.0 * K)[None, :]

        def f(t):
            omega = t[:, None] * a
            a_full = np.broadcast_to(a, omega.shape)
            te1, tm1 = _mirror(mirror1, omega, a_full, c)
            if mirror2 is mirror1:
                te2, tm2 = te1, tm1
            else:
                te2, tm2 = _mirror(mirror2, omega, a_full, c)
            out = np.empty(omega.shape + (2,))
            f_te = te1 * te2 * x
            f_tm = tm1 * tm2 * x
            out[..., 0] = f_te / (1.0 - f_te) + f_tm / (1.0 - f_tm)
            out[..., 1] = -np.log1p(-f_te) - np.log1p(-f_tm)
            return out

        # absolute floor per node: the outer weights K^3 and K^2 make small-K
        # nodes irrelevant, and the outer integral is of order one
        floor = np.empty((K.size, 2))
        floor[:, 0] = inner_rtol * 1e-2 / np.maximum(K ** 3, 1e-300)
        floor[:, 1] = inner_rtol * 1e-2 / np.maximum(K ** 2, 1e-300)
        return _quadrature.integrate(f, _T_BREAKS, rtol=inner_rtol, atol=floor,
                                     max_panels=cfg.max_subdivisions)

    def outer(K):
        val, err = inner(K)
        out = np.empty((K.size, 4))
        out[:, 0] = K ** 3 * val[:, 0]
        out[:, 1] = K ** 2 * val[:, 1]
        out[:, 2] = K ** 3 * err[:, 0]
        out[:, 3] = K ** 2 * err[:, 1]
        return out

    breaks = [k for k in _K_BREAKS if k < cfg.k_max] + [cfg.k_max]
    atol = cfg.abs_tol / FORCE_PREFACTOR
    try:
        val, err = _quadrature.integrate(outer, breaks, rtol=cfg.rel_tol, atol=atol,
                                         max_panels=cfg.max_subdivisions, n_drive=2)
    except ConvergenceError as exc:
        est = exc.estimate
        partial = None if est is None else (FORCE_PREFACTOR * est[0], ENERGY_PREFACTOR * est[1])
        raise ConvergenceError(f"eta integrals at L={L:.4g} m: {exc}", estimate=partial,
                               error=exc.error) from exc
    tail_f, tail_e = _tail_bounds(cfg.k_max)
    eta_f = FORCE_PREFACTOR * val[0]
    eta_e = ENERGY_PREFACTOR * val[1]
    err_f = FORCE_PREFACTOR * (err[0] + abs(val[2])) + tail_f
    err_e = ENERGY_PREFACTOR * (err[1] + abs(val[3])) + tail_e
    return eta_f, eta_e, err_f, err_e


def reduction_factors(mirror1, mirror2=None, L=None, cfg=None, units=PHYSICAL):
    """Evaluate both reduction factors at separation ``L`` (metres).

    ``mirror2`` defaults to ``mirror1``.  Returns a :class:`ReductionResult`.
    """
    L = check_positive(L, "L")
    cfg = QuadratureConfig() if cfg is None else cfg
    m1, m2 = _prepare(mirror1, mirror2, cfg, units)
    if mirror2 is None:
        m2 = m1
    eta_f, eta_e, err_f, err_e = _integrals(m1, m2, L, cfg, units)
    pressure = units.hbar * units.c * np.pi ** 2 / (240.0 * L ** 4)
    energy = units.hbar * units.c * np.pi ** 2 / (720.0 * L ** 3)
    return ReductionResult(L=L, eta_f=float(eta_f), eta_e=float(eta_e),
                           force_per_area=float(eta_f * pressure),
                           energy_per_area=float(eta_e * energy),
                           err_f=float(err_f), err_e=float(err_e), units=units.name)


def eta_force(mirror1, mirror2, L, cfg=None, units=PHYSICAL):
    """Force reduction factor and its absolute error estimate."""
    res = reduction_factors(mirror1, mirror2, L, cfg, units)
    return res.eta_f, res.err_f


def eta_energy(mirror1, mirror2, L, cfg=None, units=PHYSICAL):
    """Energy reduction factor and its absolute error estimate."""
    res = reduction_factors(mirror1, mirror2, L, cfg, units)
    return res.eta_e, res.err_e


def _alpha_integrand(u):
    # K = u^2 removes the K^(3/2) endpoint behaviour
    K = u * u
    damp = np.sqrt(2.0) * np.exp(-0.25 * K)
    inv_sqrt_sinh = damp / np.sqrt(-np.expm1(-K))
    inv_sqrt_cosh = damp / np.sqrt(1.0 + np.exp(-K))
    return 2.0 * u * np.exp(-0.75 * K) * K * K * (inv_sqrt_sinh - inv_sqrt_cosh)


def short_distance_alpha(cfg=None, full_output=False):
    """Coefficient of the linear short-distance law eta_F ~ alpha L / lambda_P."""
    cfg = QuadratureConfig() if cfg is None else cfg
    val, err = _quadrature.integrate(_alpha_integrand, [0.0, 1.0, 2.0, 4.0, 8.0, 16.0],
                                     rtol=min(cfg.rel_tol, 1e-8), atol=0.0,
                                     max_panels=cfg.max_subdivisions)
    scale = 30.0 / np.pi ** 2
    alpha, alpha_err = scale * float(val), scale * float(err)
    return (alpha, alpha_err) if full_output else alpha


def short_distance_eta(L_over_lambda_p, alpha=None):
    """Leading short-distance laws: (eta_F, eta_E) = (alpha x, 1.5 alpha x) with x = L/lambda_P."""
    alpha = short_distance_alpha() if alpha is None else alpha
    x = np.asarray(L_over_lambda_p, dtype=float)
    return alpha * x, 1.5 * alpha * x


def long_distance_eta(lambda_p_over_L, order=2):
    """Long-distance expansion 1 - (8/3pi) x + (6/pi^2) x^2 in x = lambda_P / L."""
    x = np.asarray(lambda_p_over_L, dtype=float)
    if np.any(x < 0.0) or np.any(x >= 1.0):
        raise DomainError("lambda_P/L must lie in [0, 1)")
    out = 1.0 - 8.0 / (3.0 * np.pi) * x
    if order >= 2:
        out = out + 6.0 / np.pi ** 2 * x * x
    return float(out) if out.ndim == 0 else out


def proximity_force(R, L, eta_e, units=PHYSICAL):
    """Plane-sphere force 2 pi R eta_E hbar c pi^2 / (720 L^3), in N."""
    R = check_positive(R, "R")
    L = check_positive(L, "L")
    eta_e = float(eta_e)
    if eta_e < 0.0:
        raise DomainError("eta_e must be non-negative")
    if R < 10.0 * L:
        warnings.warn("proximity force estimate assumes R >> L", stacklevel=2)
    return 2.0 * np.pi * R * eta_e * units.hbar * units.c * np.pi ** 2 / (720.0 * L ** 3)


def energy_force_consistency(mirror1, mirror2, L, cfg=None, units=PHYSICAL,
                             n_nodes=24, u_min=1e-2):
    """Relative mismatch between eta_E E_C(L) and the integral of eta_F F_C over [L, inf).

    With ``u = L/x`` the force integral becomes ``3 int_0^1 eta_F(L/u) u^2 du``
    in units of the ideal energy.  The piece ``u < u_min`` uses eta_F = 1.
    """
    L = check_positive(L, "L")
    cfg = QuadratureConfig() if cfg is None else cfg
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    u = 0.5 * (1.0 - u_min) * nodes + 0.5 * (1.0 + u_min)
    w = 0.5 * (1.0 - u_min) * weights
    eta_f = np.array([reduction_factors(mirror1, mirror2, L / ui, cfg, units).eta_f for ui in u])
    from_force = 3.0 * np.sum(w * eta_f * u * u) + u_min ** 3
    eta_e = reduction_factors(mirror1, mirror2, L, cfg, units).eta_e
    return float((eta_e - from_force) / eta_e)
