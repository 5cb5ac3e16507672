"""Reflection amplitudes at imaginary frequency and imaginary wavevector.

All quantities are real on the imaginary axes, so the Fabry-Perot algebra
below never needs complex arithmetic.  Internally the wavevector enters as
``a = c * kappa`` (rad/s) and each medium through ``chi`` and ``frac`` (see
:mod:`casimir_eta.dielectric`), which keeps the zero-frequency edge finite.
"""

from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from ._validation import check_nonnegative
from .constants import PHYSICAL
from .dielectric import DielectricFunction
from .exceptions import DomainError


class PolarizedAmplitudes(NamedTuple):
    r_te: np.ndarray
    r_tm: np.ndarray


@dataclass(frozen=True)
class Bulk:
    dielectric: DielectricFunction
    structure = "bulk"

    def dielectrics(self):
        return [self.dielectric]

    def map_dielectrics(self, fn):
        return Bulk(fn(self.dielectric))


@dataclass(frozen=True)
class Slab:
    dielectric: DielectricFunction
    thickness: float
    structure = "slab"

    def __post_init__(self):
        check_nonnegative(self.thickness, "thickness")

    def dielectrics(self):
        return [self.dielectric]

    def map_dielectrics(self, fn):
        return Slab(fn(self.dielectric), self.thickness)


@dataclass(frozen=True)
class Stack:
    """Layers listed from the vacuum side inwards, on top of a half-space substrate."""

    layers: Tuple[Tuple[DielectricFunction, float], ...]
    substrate: DielectricFunction
    structure = "stack"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple((d, float(t)) for d, t in self.layers))
        if not self.layers:
            raise DomainError("a stack needs at least one layer")
        for _, t in self.layers:
            if not t > 0.0:
                raise DomainError("layer thicknesses must be positive")

    def dielectrics(self):
        return [d for d, _ in self.layers] + [self.substrate]

    def map_dielectrics(self, fn):
        return Stack(tuple((fn(d), t) for d, t in self.layers), fn(self.substrate))


@dataclass(frozen=True)
class Perfect:
    """Ideal mirror with ``r = -1`` for both polarisations."""

    structure = "perfect"

    def dielectrics(self):
        return []

    def map_dielectrics(self, fn):
        return self


MirrorSpec = (Bulk, Slab, Stack, Perfect)


def _check_sector(omega, kappa, units):
    omega = np.asarray(omega, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if np.any(omega < 0.0) or np.any(kappa <= 0.0):
        raise DomainError("need omega >= 0 and kappa > 0")
    a = units.c * kappa
    if np.any(a < omega * (1.0 - 1e-12)):
        raise DomainError("kappa < omega/c lies outside the integration sector")
    return omega, a


def _interface(omega, a, chi, frac):
    """Vacuum/medium amplitudes in rationalised form."""
    s = np.sqrt(chi + a * a)
    r_te = -chi / (s + a) ** 2
    inv_eps = 1.0 - frac
    r_tm = (inv_eps * chi / (s + a) - a * frac) / (inv_eps * s + a)
    return r_te, r_tm, s


def bulk_amplitudes(omega, kappa, eps_i=None, *, chi=None, frac=None, units=PHYSICAL):
    """Amplitudes of a vacuum/metal interface.

    Either pass ``eps_i`` (requires ``omega > 0``), or the zero-frequency-safe
    pair ``chi = omega**2 (eps - 1)`` and ``frac = (eps - 1)/eps``.
    """
    omega, a = _check_sector(omega, kappa, units)
    if eps_i is not None:
        eps = np.asarray(eps_i, dtype=float)
        if np.any(eps < 1.0):
            raise DomainError("eps(i omega) must be >= 1")
        if np.any(omega <= 0.0):
            raise DomainError("eps_i form needs omega > 0; pass chi/frac for the omega = 0 limit")
        chi = omega * omega * (eps - 1.0)
        frac = (eps - 1.0) / eps
    elif chi is None or frac is None:
        raise DomainError("pass eps_i or both chi and frac")
    r_te, r_tm, _ = _interface(omega, a, np.asarray(chi, float), np.asarray(frac, float))
    return PolarizedAmplitudes(r_te, r_tm)


def slab_amplitude(rho, delta):
    """Fabry-Perot amplitude rho (1 - e^{-2 delta}) / (1 - rho^2 e^{-2 delta})."""
    rho = np.asarray(rho, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(np.abs(rho) >= 1.0) or np.any(delta < 0.0):
        raise DomainError("need |rho| < 1 and delta >= 0")
    e2 = np.exp(-2.0 * delta)
    out = rho * -np.expm1(-2.0 * delta) / (1.0 - rho * rho * e2)
    return float(out) if out.ndim == 0 else out


def optical_length(omega, kappa, eps_i, D, units=PHYSICAL):
    """(D/c) sqrt(omega^2 (eps - 1) + c^2 kappa^2), dimensionless."""
    omega, a = _check_sector(omega, kappa, units)
    D = check_nonnegative(D, "D")
    chi = omega * omega * (np.asarray(eps_i, dtype=float) - 1.0)
    out = D / units.c * np.sqrt(chi + a * a)
    return float(out) if out.ndim == 0 else out


def _fabry_perot(r_top, r_below, delta):
    e2 = np.exp(-2.0 * delta)
    return (r_top + r_below * e2) / (1.0 + r_top * r_below * e2)


def _between(s_i, y_i, chi_i, s_j, y_j, chi_j):
    """Interface amplitudes from medium i into medium j (both material)."""
    r_te = (chi_i - chi_j) / ((s_i + s_j) ** 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        r_tm = (y_j - y_i) / (y_j + y_i)
    # both admittances vanish only at omega = 0, where the top interface is
    # already perfectly reflecting and this factor drops out
    r_tm = np.where(np.isfinite(r_tm), r_tm, 0.0)
    return r_te, r_tm


def _mirror(spec, omega, a, c):
    if isinstance(spec, Perfect):
        minus_one = -np.ones(np.broadcast(omega, a).shape)
        return minus_one, minus_one.copy()
    if isinstance(spec, Bulk):
        d = spec.dielectric
        r_te, r_tm, _ = _interface(omega, a, d.chi(omega), d.frac(omega))
        return r_te, r_tm
    if isinstance(spec, Slab):
        d = spec.dielectric
        rho_te, rho_tm, s = _interface(omega, a, d.chi(omega), d.frac(omega))
        delta = spec.thickness / c * s
        if spec.thickness == 0.0:
            # nothing to reflect; avoids 0/0 where rho_tm = -1 at omega = 0
            zero = np.zeros(np.broadcast(omega, a).shape)
            return zero, zero.copy()
        e2 = np.exp(-2.0 * delta)
        damp = -np.expm1(-2.0 * delta)
        return (rho_te * damp / (1.0 - rho_te ** 2 * e2),
                rho_tm * damp / (1.0 - rho_tm ** 2 * e2))
    if isinstance(spec, Stack):
        media = [d for d, _ in spec.layers] + [spec.substrate]
        chis = [d.chi(omega) for d in media]
        fracs = [d.frac(omega) for d in media]
        ss = [np.sqrt(x + a * a) for x in chis]
        ys = [s * (1.0 - f) for s, f in zip(ss, fracs)]
        # innermost interface first, then walk outwards through the layers
        r_te, r_tm = _between(ss[-2], ys[-2], chis[-2], ss[-1], ys[-1], chis[-1])
        for j in range(len(spec.layers) - 1, -1, -1):
            delta = spec.layers[j][1] / c * ss[j]
            if j == 0:
                top_te, top_tm, _ = _interface(omega, a, chis[0], fracs[0])
            else:
                top_te, top_tm = _between(ss[j - 1], ys[j - 1], chis[j - 1],
                                          ss[j], ys[j], chis[j])
            r_te = _fabry_perot(top_te, r_te, delta)
            r_tm = _fabry_perot(top_tm, r_tm, delta)
        return r_te, r_tm
    raise DomainError(f"unsupported mirror specification {spec!r}")


def mirror_amplitudes(spec, omega, kappa, units=PHYSICAL):
    """TE/TM amplitudes of a bulk, slab, layered or perfect mirror."""
    omega, a = _check_sector(omega, kappa, units)
    r_te, r_tm = _mirror(spec, omega, a, units.c)
    return PolarizedAmplitudes(r_te, r_tm)
