import numpy as np
import pytest

from casimir_eta import (PAPER, PHYSICAL, DrudeDielectric, DrudeParams, PlasmaDielectric,
                         PlasmaParams, TabulatedDielectric, drude_eps_i,
                         drude_eps_imag_real_axis, plasma_eps_i, plasma_frequency_from_density)
from casimir_eta.dielectric import ClampedDielectric
from casimir_eta.exceptions import DomainError


def test_plasma_examples():
    p = PlasmaParams(3.0)
    assert plasma_eps_i(3.0, p) == pytest.approx(2.0)
    assert plasma_eps_i(6.0, p) == pytest.approx(1.25)
    assert plasma_eps_i(3e3, p) == pytest.approx(1 + 1e-6, rel=1e-12)


def test_drude_examples():
    with pytest.warns(UserWarning):
        p = DrudeParams(2.0, 2.0)
    assert drude_eps_i(2.0, p) == pytest.approx(1.5)
    # eV in, eV out: the formula only sees ratios
    assert drude_eps_i(0.1, DrudeParams(9.0, 0.035)) == pytest.approx(6001.0, rel=1e-12)


def test_pole_rejected():
    with pytest.raises(DomainError):
        plasma_eps_i(0.0, PlasmaParams(1.0))
    with pytest.raises(DomainError):
        drude_eps_i(0.0, DrudeParams(1.0, 0.1))
    with pytest.raises(DomainError):
        drude_eps_imag_real_axis(0.0, DrudeParams(1.0, 0.1))


def test_real_axis_absorption():
    p = DrudeParams(9.0, 0.035)
    assert drude_eps_imag_real_axis(0.035, p) == pytest.approx(81 / (2 * 0.035 ** 2))
    x = 100 * 0.035
    ratio = drude_eps_imag_real_axis(x, p) / (81 * 0.035 / x ** 3)
    assert abs(ratio - 1) < 0.01


def test_density_to_plasma_frequency():
    wp = plasma_frequency_from_density(5.90e28, PHYSICAL.electron_mass)
    assert PHYSICAL.to_ev(wp) == pytest.approx(9.0, abs=0.05)
    assert plasma_frequency_from_density(4 * 5.90e28, PHYSICAL.electron_mass) == pytest.approx(2 * wp)
    heavy = plasma_frequency_from_density(5.90e28, 1.45 * PHYSICAL.electron_mass)
    assert heavy == pytest.approx(wp / np.sqrt(1.45))
    with pytest.raises(DomainError):
        plasma_frequency_from_density(-1.0, 1.0)


def test_gamma_zero_is_plasma():
    w = np.logspace(-3, 3, 13)
    assert np.allclose(drude_eps_i(w, DrudeParams(2.0, 0.0)), plasma_eps_i(w, PlasmaParams(2.0)),
                       rtol=1e-15)


def test_large_damping_warns():
    with pytest.warns(UserWarning):
        DrudeParams(1.0, 0.5)


def test_from_ev_converts():
    p = DrudeParams.from_ev(9.0, 0.035, PAPER)
    assert p.omega_p == pytest.approx(9.0 * 1.537e15)
    assert p.gamma == pytest.approx(0.035 * 1.537e15)


def test_chi_finite_at_zero():
    wp = 1e16
    assert PlasmaDielectric(PlasmaParams(wp)).chi(0.0) == pytest.approx(wp ** 2)
    assert DrudeDielectric(DrudeParams(wp, 1e13)).chi(0.0) == 0.0
    d = DrudeDielectric(DrudeParams(wp, 1e13))
    w = np.array([1e12, 1e15])
    assert np.allclose(d.chi(w), w ** 2 * (d.eps_i(w) - 1))
    assert np.allclose(d.frac(w), (d.eps_i(w) - 1) / d.eps_i(w))


def test_tabulated_reproduces_nodes_and_interpolates():
    units = PHYSICAL
    p = DrudeParams(9.0, 0.035)
    w_ev = np.logspace(-4, 3, 60)
    tab = TabulatedDielectric(w_ev, drude_eps_i(w_ev, p), units)
    assert np.allclose(tab.eps_i(units.ev(w_ev)), drude_eps_i(w_ev, p), rtol=1e-12)
    mid = np.sqrt(w_ev[:-1] * w_ev[1:])
    assert np.allclose(tab.eps_i(units.ev(mid)), drude_eps_i(mid, p), rtol=5e-3)
    # beyond the grid: monotone and bounded by 1
    hi = tab.eps_i(units.ev(np.array([2e3, 1e5])))
    assert np.all(hi >= 1) and hi[0] >= hi[1]


def test_clamped_dielectric():
    inner = DrudeDielectric(DrudeParams(1e16, 1e14))
    c = ClampedDielectric(inner, 1e13, 1e17)
    assert c.chi(1e20) == 0.0
    assert c.eps_i(1e12) == pytest.approx(inner.eps_i(1e13))
    assert c.eps_i(1e15) == pytest.approx(inner.eps_i(1e15))
