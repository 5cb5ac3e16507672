"""scikit-learn style front-ends.

``DrudeFitter`` and ``KramersKronigTransformer`` learn from optical data
(``X`` = photon energies in eV, ``y`` = eps''); ``CasimirReduction`` is
stateless apart from its validated configuration and maps separations ``X``
(metres) to reduction factors.  All three support ``get_params``/``set_params``
and can sit inside a :class:`sklearn.pipeline.Pipeline` or be cloned.
"""

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_1d, as_positive_array
from .constants import get_units
from .dielectric import drude_eps_imag_real_axis, DrudeParams
from .engine import QuadratureConfig, reduction_factors
from .exceptions import DomainError
from .optical import (DEFAULT_KK_RANGE, DrudeTail, ExtrapolationPolicy, InverseOmega,
                      OpticalTable, PowerLaw, ZeroTail, build_eps_grid, check_seams,
                      fit_drude, kk_transform)


def _as_table(X, y):
    if isinstance(X, OpticalTable):
        return X
    if y is None:
        raise DomainError("y (eps'') is required unless X is an OpticalTable")
    x = as_1d(X, "X")
    y = as_1d(y, "y")
    order = np.argsort(x)
    return OpticalTable(x[order], y[order])


class DrudeFitter(BaseEstimator):
    """Fit eps''(x) = wp^2 g / (x (x^2 + g^2)) to low-frequency data.

    Parameters
    ----------
    window : tuple of (float or None, float or None), default=(None, 0.3)
        Fit window in eV.
    fixed_omega_p : float, optional
        Plasma frequency in rad/s to hold fixed.
    units : str, default="physical"
        Units preset for the eV <-> rad/s conversion.

    Attributes
    ----------
    params_ : DrudeParams
    omega_p_ev_, gamma_ev_ : float
    residual_ : float
        RMS relative residual over the window.
    """

    def __init__(self, window=(None, 0.3), fixed_omega_p=None, units="physical"):
        self.window = window
        self.fixed_omega_p = fixed_omega_p
        self.units = units

    def fit(self, X, y=None):
        table = _as_table(X, y)
        result = fit_drude(table, self.window, self.fixed_omega_p, get_units(self.units))
        self.result_ = result
        self.params_ = result.params
        self.omega_p_ev_ = result.omega_p_ev
        self.gamma_ev_ = result.gamma_ev
        self.residual_ = result.residual
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        x = as_positive_array(as_1d(X), "X")
        return drude_eps_imag_real_axis(x, DrudeParams(self.omega_p_ev_, self.gamma_ev_))


class KramersKronigTransformer(TransformerMixin, BaseEstimator):
    """Learn eps'' from data and transform energies to eps(i omega).

    Parameters
    ----------
    interpolation : {"loglog_linear", "linlin_linear"}
    low_end : {"drude", "inverse_omega"}
        Low-frequency extension.  ``"drude"`` uses ``drude_params`` (eV pair)
        when given, otherwise a :class:`DrudeFitter` on ``drude_window``.
    high_end : {"power_law", "zero"}
    integration_range : (float, float)
        Real-axis integration range in eV.
    low_tail : {"analytic", "truncate"}
        Whether the low tail below ``integration_range[0]`` is added in closed form.
    """

    def __init__(self, interpolation="loglog_linear", low_end="drude", drude_params=None,
                 drude_window=(None, 0.3), fixed_omega_p=None, high_end="power_law",
                 integration_range=DEFAULT_KK_RANGE, low_tail="analytic",
                 seam_tolerance=0.05, units="physical"):
        self.interpolation = interpolation
        self.low_end = low_end
        self.drude_params = drude_params
        self.drude_window = drude_window
        self.fixed_omega_p = fixed_omega_p
        self.high_end = high_end
        self.integration_range = integration_range
        self.low_tail = low_tail
        self.seam_tolerance = seam_tolerance
        self.units = units

    def fit(self, X, y=None):
        table = _as_table(X, y)
        units = get_units(self.units)
        self.drude_ = None
        if self.low_end == "drude":
            if self.drude_params is not None:
                low = DrudeTail(*(float(v) for v in self.drude_params))
            else:
                fitter = DrudeFitter(self.drude_window, self.fixed_omega_p, self.units).fit(table)
                self.drude_ = fitter.result_
                low = DrudeTail(fitter.omega_p_ev_, fitter.gamma_ev_)
        elif self.low_end == "inverse_omega":
            low = InverseOmega.matched(table)
        else:
            raise DomainError(f"unknown low_end {self.low_end!r}")
        if self.high_end == "power_law":
            high = PowerLaw.fitted(table)
        elif self.high_end == "zero":
            high = ZeroTail()
        else:
            raise DomainError(f"unknown high_end {self.high_end!r}")
        policy = ExtrapolationPolicy(low, high, self.interpolation, self.seam_tolerance)
        check_seams(table, policy)
        self.table_ = table
        self.policy_ = policy
        self.units_ = units
        return self

    def transform(self, X):
        check_is_fitted(self, "policy_")
        w = as_positive_array(as_1d(X), "X")
        return np.atleast_1d(kk_transform(self.table_, self.policy_, w, self.integration_range,
                                          low_tail=self.low_tail))

    def eps_grid(self, omega_grid=None, cache_dir=None):
        check_is_fitted(self, "policy_")
        return build_eps_grid(self.table_, self.policy_, omega_grid, self.integration_range,
                              cache_dir=cache_dir, low_tail=self.low_tail)

    def dielectric(self, omega_grid=None, cache_dir=None):
        """A :class:`TabulatedDielectric` ready for use in a mirror."""
        return self.eps_grid(omega_grid, cache_dir).dielectric(self.units_)


class CasimirReduction(BaseEstimator):
    """Force and energy reduction factors as a function of separation.

    ``fit`` only validates the configuration (there is nothing to learn);
    ``predict`` returns eta_F, ``predict_energy`` eta_E and ``transform`` the
    four columns ``eta_F, err_F, eta_E, err_E``.

    Parameters
    ----------
    mirror1, mirror2 : mirror specification
        ``Bulk``, ``Slab``, ``Stack`` or ``Perfect``; ``mirror2`` defaults to ``mirror1``.
    units : str, default="physical"
    rel_tol, abs_tol, k_max, max_subdivisions, spectral_range
        Forwarded to :class:`QuadratureConfig`.
    n_jobs : int, optional
        Separations evaluated in parallel threads; output order follows ``X``.
    """

    def __init__(self, mirror1=None, mirror2=None, units="physical", rel_tol=1e-5,
                 abs_tol=1e-12, k_max=40.0, max_subdivisions=4000, spectral_range=None,
                 n_jobs=None):
        self.mirror1 = mirror1
        self.mirror2 = mirror2
        self.units = units
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.k_max = k_max
        self.max_subdivisions = max_subdivisions
        self.spectral_range = spectral_range
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        if self.mirror1 is None:
            raise DomainError("mirror1 must be given")
        self.config_ = QuadratureConfig(self.rel_tol, self.abs_tol, self.k_max,
                                        self.max_subdivisions, self.spectral_range)
        self.units_ = get_units(self.units)
        return self

    def evaluate(self, X):
        """One :class:`ReductionResult` per separation in ``X``."""
        check_is_fitted(self, "config_")
        L = as_positive_array(as_1d(X, "L"), "L")
        job = delayed(reduction_factors)
        if self.n_jobs in (None, 1):
            return [reduction_factors(self.mirror1, self.mirror2, l, self.config_, self.units_)
                    for l in L]
        return Parallel(n_jobs=self.n_jobs, prefer="threads")(
            job(self.mirror1, self.mirror2, l, self.config_, self.units_) for l in L)

    def transform(self, X):
        res = self.evaluate(X)
        return np.array([[r.eta_f, r.err_f, r.eta_e, r.err_e] for r in res]).reshape(-1, 4)

    def predict(self, X):
        return self.transform(X)[:, 0]

    def predict_energy(self, X):
        return self.transform(X)[:, 2]
