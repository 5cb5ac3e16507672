"""Dielectric response at imaginary frequency.

Besides ``eps_i(omega) = eps(i omega)``, every dielectric function exposes two
combinations that stay finite at ``omega = 0`` and are what the reflection
amplitudes actually need:

``chi(omega)``
    ``omega**2 * (eps(i omega) - 1)`` in rad^2/s^2 (``omega_p**2`` for the
    plasma model at zero frequency, ``0`` for Drude).
``frac(omega)``
    ``(eps - 1) / eps``, which tends to 1 wherever ``eps`` diverges.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_nonnegative_array, as_positive_array, check_nonnegative, check_positive
from .constants import PHYSICAL
from .exceptions import DomainError


@dataclass(frozen=True)
class PlasmaParams:
    omega_p: float

    def __post_init__(self):
        check_positive(self.omega_p, "omega_p")


@dataclass(frozen=True)
class DrudeParams:
    """Plasma frequency and relaxation rate, both in rad/s."""

    omega_p: float
    gamma: float = 0.0

    def __post_init__(self):
        check_positive(self.omega_p, "omega_p")
        check_nonnegative(self.gamma, "gamma")
        if self.gamma / self.omega_p > 0.1:
            warnings.warn(f"gamma/omega_p = {self.gamma / self.omega_p:.3g} is not small; "
                          "the Drude description of a good conductor is doubtful",
                          stacklevel=3)

    @classmethod
    def from_ev(cls, omega_p_ev, gamma_ev=0.0, units=PHYSICAL):
        return cls(units.ev(omega_p_ev), units.ev(gamma_ev))


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def plasma_eps_i(omega, p):
    """1 + omega_p**2 / omega**2."""
    w = as_positive_array(omega, "omega (plasma model has a pole at omega = 0)")
    return _scalar_or_array(1.0 + (p.omega_p / w) ** 2, omega)


def drude_eps_i(omega, p):
    """1 + omega_p**2 / (omega (omega + gamma))."""
    w = as_positive_array(omega, "omega (Drude model has a pole at omega = 0)")
    return _scalar_or_array(1.0 + p.omega_p ** 2 / (w * (w + p.gamma)), omega)


def drude_eps_imag_real_axis(x, p):
    """Imaginary part of the Drude permittivity on the real frequency axis.

    ``omega_p**2 * gamma / (x (x**2 + gamma**2))``.  Only ratios enter, so ``x``
    may be in any unit as long as ``p`` uses the same one.
    """
    if p.gamma <= 0.0:
        raise DomainError("gamma must be positive for a lossy Drude response")
    xa = as_positive_array(x, "x")
    g = p.gamma
    return _scalar_or_array(p.omega_p ** 2 * g / (xa * (xa * xa + g * g)), x)


def plasma_frequency_from_density(n_electrons, m_eff, units=PHYSICAL):
    """Plasma frequency sqrt(N q^2 / (eps0 m*)) in rad/s.

    ``n_electrons`` is the conduction-electron density (per m^3); callers
    combine valence and atomic density themselves.
    """
    n = check_positive(n_electrons, "n_electrons")
    m = check_positive(m_eff, "m_eff")
    return float(np.sqrt(n * units.electron_charge ** 2 / (units.vacuum_permittivity * m)))


class DielectricFunction:
    """Base class; subclasses implement :meth:`chi` and :meth:`frac`."""

    variant = "abstract"

    def eps_i(self, omega):
        w = as_positive_array(omega, "omega")
        return _scalar_or_array(1.0 + self.chi(w) / (w * w), omega)

    def chi(self, omega):
        raise NotImplementedError

    def frac(self, omega):
        raise NotImplementedError

    def clamped(self, low, high):
        """Return a copy held constant below ``low`` and transparent above ``high`` (rad/s)."""
        return ClampedDielectric(self, low, high)


class PlasmaDielectric(DielectricFunction):
    variant = "plasma"

    def __init__(self, params):
        if not isinstance(params, PlasmaParams):
            params = PlasmaParams(float(params))
        self.params = params

    def __repr__(self):
        return f"PlasmaDielectric(omega_p={self.params.omega_p:.6g})"

    def eps_i(self, omega):
        return plasma_eps_i(omega, self.params)

    def chi(self, omega):
        w = as_nonnegative_array(omega, "omega")
        return np.full_like(w, self.params.omega_p ** 2)

    def frac(self, omega):
        w = as_nonnegative_array(omega, "omega")
        wp2 = self.params.omega_p ** 2
        return wp2 / (w * w + wp2)


class DrudeDielectric(DielectricFunction):
    variant = "drude"

    def __init__(self, params):
        self.params = params

    def __repr__(self):
        p = self.params
        return f"DrudeDielectric(omega_p={p.omega_p:.6g}, gamma={p.gamma:.6g})"

    def eps_i(self, omega):
        return drude_eps_i(omega, self.params)

    def chi(self, omega):
        w = as_nonnegative_array(omega, "omega")
        wp2, g = self.params.omega_p ** 2, self.params.gamma
        if g == 0.0:
            return np.full_like(w, wp2)
        return wp2 * w / (w + g)

    def frac(self, omega):
        w = as_nonnegative_array(omega, "omega")
        wp2 = self.params.omega_p ** 2
        return wp2 / (w * (w + self.params.gamma) + wp2)


class TabulatedDielectric(DielectricFunction):
    """``eps(i omega)`` interpolated log-log from sampled values.

    ``eps - 1`` is interpolated linearly in log-log coordinates.  Below the
    first sample the permittivity is held at its first value; above the last
    sample ``eps - 1`` continues along the power law of the final segment.
    """

    variant = "tabulated"

    def __init__(self, omega_ev, eps_i, units=PHYSICAL, label=""):
        omega_ev = as_positive_array(omega_ev, "omega_ev")
        eps_i = np.asarray(eps_i, dtype=float)
        if omega_ev.size < 2 or omega_ev.shape != eps_i.shape:
            raise DomainError("need at least two (omega, eps) samples of equal length")
        if np.any(np.diff(omega_ev) <= 0):
            raise DomainError("omega grid must be strictly increasing")
        if np.any(eps_i <= 1.0):
            raise DomainError("tabulated eps(i omega) must exceed 1")
        self.units = units
        self.label = label
        self.omega = omega_ev * units.ev_to_radps
        self._log_w = np.log(self.omega)
        self._log_s = np.log(eps_i - 1.0)
        self._tail_slope = (self._log_s[-1] - self._log_s[-2]) / (self._log_w[-1] - self._log_w[-2])

    def __repr__(self):
        return f"TabulatedDielectric({self.label or 'grid'}, n={self.omega.size})"

    def _eps_minus_one(self, w):
        s = np.empty_like(w)
        low = w <= self.omega[0]
        high = w >= self.omega[-1]
        mid = ~(low | high)
        s[low] = np.exp(self._log_s[0])
        s[mid] = np.exp(np.interp(np.log(w[mid]), self._log_w, self._log_s))
        s[high] = np.exp(self._log_s[-1] + self._tail_slope * (np.log(w[high]) - self._log_w[-1]))
        return s

    def chi(self, omega):
        w = as_nonnegative_array(omega, "omega")
        return w * w * self._eps_minus_one(np.atleast_1d(w)).reshape(w.shape)

    def frac(self, omega):
        w = as_nonnegative_array(omega, "omega")
        s = self._eps_minus_one(np.atleast_1d(w)).reshape(w.shape)
        return s / (1.0 + s)


class ClampedDielectric(DielectricFunction):
    """Restrict another dielectric to a finite spectral window.

    Below ``low`` the permittivity is frozen at ``eps(i low)``; above ``high``
    the medium is treated as vacuum (``eps = 1``).
    """

    def __init__(self, inner, low, high):
        low = check_positive(low, "spectral_range low")
        high = check_positive(high, "spectral_range high")
        if not low < high:
            raise DomainError("spectral_range must satisfy low < high")
        self.inner, self.low, self.high = inner, low, high
        self.variant = inner.variant
        self._eps_low_m1 = float(inner.chi(np.array(low))) / low ** 2

    def __repr__(self):
        return f"ClampedDielectric({self.inner!r}, {self.low:.4g}, {self.high:.4g})"

    def chi(self, omega):
        w = as_nonnegative_array(omega, "omega")
        out = np.where(w < self.low, w * w * self._eps_low_m1, self.inner.chi(w))
        return np.where(w > self.high, 0.0, out)

    def frac(self, omega):
        w = as_nonnegative_array(omega, "omega")
        frac_low = self._eps_low_m1 / (1.0 + self._eps_low_m1)
        out = np.where(w < self.low, frac_low, self.inner.frac(w))
        return np.where(w > self.high, 0.0, out)
