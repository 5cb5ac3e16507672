"""Physical constants, eV conversion presets and dimensionless variables.

Everything inside the library is SI; electron-volts only appear at the
input/output boundary, converted through a :class:`UnitSystem`.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import constants as _sc

from ._validation import check_positive
from .exceptions import DomainError

PAPER_EV_TO_RADPS = 1.537e15


@dataclass(frozen=True)
class UnitSystem:
    """Set of constants plus the eV -> rad/s factor used for I/O.

    Two presets exist: ``physical`` (factor e/hbar, about 1.519e15) and
    ``paper`` (1.537e15, needed to reproduce published plasma wavelengths).
    """

    name: str
    hbar: float = _sc.hbar
    c: float = _sc.c
    vacuum_permittivity: float = _sc.epsilon_0
    electron_charge: float = _sc.e
    electron_mass: float = _sc.m_e
    ev_to_radps: float = _sc.e / _sc.hbar

    def __post_init__(self):
        for field in ("hbar", "c", "vacuum_permittivity", "electron_charge",
                      "electron_mass", "ev_to_radps"):
            check_positive(getattr(self, field), field)

    def ev(self, value_ev):
        """Angular frequency in rad/s for an energy given in eV."""
        return value_ev * self.ev_to_radps

    def to_ev(self, omega):
        return omega / self.ev_to_radps


PHYSICAL = UnitSystem("physical")
PAPER = UnitSystem("paper", ev_to_radps=PAPER_EV_TO_RADPS)
PRESETS = {"physical": PHYSICAL, "paper": PAPER}


def get_units(preset):
    """Resolve a preset name (or pass a :class:`UnitSystem` through)."""
    if isinstance(preset, UnitSystem):
        return preset
    try:
        return PRESETS[preset]
    except KeyError:
        raise DomainError(f"unknown units preset {preset!r}; "
                          f"expected one of {sorted(PRESETS)}") from None


class DimensionlessPoint(NamedTuple):
    K: float
    Omega: float


def plasma_wavelength(omega_p, units=PHYSICAL):
    """Plasma wavelength 2*pi*c/omega_p in metres (omega_p in rad/s)."""
    omega_p = check_positive(omega_p, "omega_p")
    return 2.0 * np.pi * units.c / omega_p


def plasma_frequency_from_wavelength(lambda_p, units=PHYSICAL):
    lambda_p = check_positive(lambda_p, "lambda_p")
    return 2.0 * np.pi * units.c / lambda_p


def to_dimensionless(omega, kappa, L, units=PHYSICAL):
    """Map (omega, kappa) at separation L to (K, Omega) = (kappa L, omega L / c)."""
    L = check_positive(L, "L")
    omega = float(omega)
    kappa = float(kappa)
    if omega < 0.0:
        raise DomainError("omega must be non-negative")
    # small slack for round-off on the light cone
    if kappa * units.c < omega * (1.0 - 1e-14):
        raise DomainError("kappa < omega/c lies outside the integration sector")
    return DimensionlessPoint(kappa * L, omega * L / units.c)
