import numpy as np
import pytest
from scipy import constants as sc

from casimir_eta import (PHYSICAL, Bulk, DrudeDielectric, DrudeParams, Perfect, PlasmaDielectric,
                         PlasmaParams, Slab, Stack, mirror_amplitudes)
from casimir_eta.exceptions import DomainError
from casimir_eta.reflectivity import bulk_amplitudes, optical_length, slab_amplitude

C = sc.c
WP = PHYSICAL.ev(9.0)


def naive_interface(eps_i, eps_j, omega, kappa):
    """Textbook amplitudes from medium i into medium j at imaginary frequency."""
    ki = np.sqrt(kappa ** 2 + (eps_i - 1) * omega ** 2 / C ** 2)
    kj = np.sqrt(kappa ** 2 + (eps_j - 1) * omega ** 2 / C ** 2)
    te = (ki - kj) / (ki + kj)
    tm = (eps_i * kj - eps_j * ki) / (eps_j * ki + eps_i * kj)
    return te, tm, kj


def naive_stack(eps_layers, thicknesses, eps_sub, omega, kappa):
    media = [1.0] + list(eps_layers) + [eps_sub]
    te, tm, _ = naive_interface(media[-2], media[-1], omega, kappa)
    for j in range(len(eps_layers), 0, -1):
        t_te, t_tm, k = naive_interface(media[j - 1], media[j], omega, kappa)
        e = np.exp(-2 * k * thicknesses[j - 1])
        te = (t_te + te * e) / (1 + t_te * te * e)
        tm = (t_tm + tm * e) / (1 + t_tm * tm * e)
    return te, tm


def test_transparent_medium():
    r = bulk_amplitudes(1e15, 1e8, 1.0)
    assert r.r_te == 0.0 and r.r_tm == 0.0


def test_perfect_conductor_limit():
    r = bulk_amplitudes(1e14, 1e7, 1e20)
    assert r.r_te == pytest.approx(-1, abs=1e-6)
    assert r.r_tm == pytest.approx(-1, abs=1e-6)
    p = mirror_amplitudes(Perfect(), 1e14, 1e7)
    assert p.r_te == -1.0 and p.r_tm == -1.0


def test_plasma_zero_frequency_limit():
    d = PlasmaDielectric(PlasmaParams(WP))
    r = bulk_amplitudes(0.0, WP / C, chi=d.chi(0.0), frac=d.frac(0.0))
    assert r.r_te == pytest.approx(-(np.sqrt(2) - 1) / (np.sqrt(2) + 1), rel=1e-12)
    assert r.r_te == pytest.approx(-0.17157, abs=1e-5)
    assert r.r_tm == pytest.approx(-1.0)


def test_bulk_matches_textbook_form():
    d = DrudeDielectric(DrudeParams(WP, PHYSICAL.ev(0.035)))
    omega = np.logspace(12, 17, 9)
    kappa = 1.7 * omega / C
    r = mirror_amplitudes(Bulk(d), omega, kappa)
    te, tm, _ = naive_interface(1.0, d.eps_i(omega), omega, kappa)
    assert np.allclose(r.r_te, te, rtol=1e-9, atol=1e-15)
    assert np.allclose(r.r_tm, tm, rtol=1e-9, atol=1e-15)


def test_rationalized_form_near_transparency():
    # eps - 1 = 1e-14: the naive difference of square roots loses all digits
    omega, kappa = 1e15, 1e15 / C
    r = bulk_amplitudes(omega, kappa, 1 + 1e-14)
    assert r.r_te == pytest.approx(-1e-14 / 4, rel=1e-6)


def test_sector_enforced():
    with pytest.raises(DomainError):
        bulk_amplitudes(1e15, 1.0, 2.0)
    with pytest.raises(DomainError):
        bulk_amplitudes(1e15, -1.0, 2.0)
    with pytest.raises(DomainError):
        bulk_amplitudes(0.0, 1.0, 2.0)


def test_slab_amplitude_examples():
    assert slab_amplitude(0.5, 1.0) == pytest.approx(0.5 * (1 - np.exp(-2)) / (1 - 0.25 * np.exp(-2)))
    assert slab_amplitude(0.5, 1.0) == pytest.approx(0.4475, abs=1e-4)
    assert slab_amplitude(-0.3, 0.0) == 0.0
    assert slab_amplitude(-0.3, 200.0) == pytest.approx(-0.3, rel=1e-15)


def test_optical_length_examples():
    assert optical_length(1e14, 2e7, 1.0, 3e-7) == pytest.approx(2e7 * 3e-7)
    assert optical_length(1e14, 2e7, 5.0, 0.0) == 0.0
    lam = 2 * np.pi * C / WP
    D = 0.3 * lam
    # omega -> 0 and kappa -> 0 together with omega^2 (eps-1) -> wp^2
    w = 1e-6 * WP
    eps = 1 + (WP / w) ** 2
    assert optical_length(w, w / C, eps, D) == pytest.approx(2 * np.pi * D / lam, rel=1e-9)


def test_slab_thick_limit_and_zero_thickness():
    d = PlasmaDielectric(PlasmaParams(WP))
    lam = 2 * np.pi * C / WP
    omega = np.array([0.0, 1e13, 1e15, 1e16])
    kappa = np.array([1e5, 1e6, 1e8, 1e9])
    thick = mirror_amplitudes(Slab(d, 10 * lam), omega, kappa)
    bulk = mirror_amplitudes(Bulk(d), omega, kappa)
    assert np.allclose(thick.r_te, bulk.r_te, atol=1e-6, rtol=0)
    assert np.allclose(thick.r_tm, bulk.r_tm, atol=1e-6, rtol=0)
    with pytest.raises(DomainError):
        Slab(d, -1.0)


def test_stack_homogeneous_reduction():
    d = DrudeDielectric(DrudeParams(WP, PHYSICAL.ev(0.035)))
    omega = np.array([0.0, 1e12, 1e14, 1e15, 1e16])
    kappa = np.array([1e5, 1e6, 1e7, 1e8, 1e9])
    s = mirror_amplitudes(Stack(((d, 5e-8),), d), omega, kappa)
    b = mirror_amplitudes(Bulk(d), omega, kappa)
    assert np.allclose(s.r_te, b.r_te, atol=1e-12, rtol=0)
    assert np.allclose(s.r_tm, b.r_tm, atol=1e-12, rtol=0)


def test_stack_over_vacuum_substrate_is_slab():
    d = PlasmaDielectric(PlasmaParams(WP))
    vac = PlasmaDielectric(PlasmaParams(1e-30))
    omega = np.array([1e13, 1e15, 3e16])
    kappa = 2 * omega / C
    s = mirror_amplitudes(Stack(((d, 2e-8),), vac), omega, kappa)
    sl = mirror_amplitudes(Slab(d, 2e-8), omega, kappa)
    assert np.allclose(s.r_te, sl.r_te, rtol=1e-10)
    assert np.allclose(s.r_tm, sl.r_tm, rtol=1e-10)


def test_two_layer_stack_matches_textbook_recursion():
    au = DrudeDielectric(DrudeParams(WP, PHYSICAL.ev(0.035)))
    al = DrudeDielectric(DrudeParams(PHYSICAL.ev(11.5), PHYSICAL.ev(0.05)))
    cu = DrudeDielectric(DrudeParams(PHYSICAL.ev(7.5), PHYSICAL.ev(0.13)))
    spec = Stack(((au, 2e-8), (al, 3e-8)), cu)
    omega = np.logspace(13, 16.5, 8)
    kappa = 1.3 * omega / C
    r = mirror_amplitudes(spec, omega, kappa)
    te, tm = naive_stack([au.eps_i(omega), al.eps_i(omega)], [2e-8, 3e-8], cu.eps_i(omega),
                         omega, kappa)
    assert np.allclose(r.r_te, te, rtol=1e-9)
    assert np.allclose(r.r_tm, tm, rtol=1e-9)


def test_gold_layer_on_copper_close_to_bulk_gold():
    au = DrudeDielectric(DrudeParams(WP, PHYSICAL.ev(0.035)))
    cu = DrudeDielectric(DrudeParams(PHYSICAL.ev(9.0), PHYSICAL.ev(0.030)))
    omega = np.logspace(12, 16, 9)
    kappa = 1.2 * omega / C
    s = mirror_amplitudes(Stack(((au, 5e-8),), cu), omega, kappa)
    b = mirror_amplitudes(Bulk(au), omega, kappa)
    assert np.all(np.abs(s.r_te / b.r_te - 1) < 0.01)
    assert np.all(np.abs(s.r_tm / b.r_tm - 1) < 0.01)


def test_stack_requires_layers():
    d = PlasmaDielectric(PlasmaParams(WP))
    with pytest.raises(DomainError):
        Stack((), d)
    with pytest.raises(DomainError):
        Stack(((d, 0.0),), d)


@pytest.mark.parametrize("spec_kind", ["bulk", "slab", "stack"])
def test_continuity_across_zero_frequency(spec_kind):
    d = DrudeDielectric(DrudeParams(WP, PHYSICAL.ev(0.035)))
    p = PlasmaDielectric(PlasmaParams(WP))
    spec = {"bulk": Bulk(p), "slab": Slab(p, 3e-8), "stack": Stack(((d, 3e-8),), p)}[spec_kind]
    kappa = 3e6
    at0 = mirror_amplitudes(spec, 0.0, kappa)
    near = mirror_amplitudes(spec, 1e-9 * C * kappa, kappa)
    assert near.r_te == pytest.approx(at0.r_te, abs=1e-6)
    assert near.r_tm == pytest.approx(at0.r_tm, abs=1e-6)


def test_high_frequency_transparency():
    d = PlasmaDielectric(PlasmaParams(WP))
    kappa = 1e3
    omega = np.array([1, 10, 100]) * WP
    r = mirror_amplitudes(Bulk(d), omega, np.maximum(kappa, omega / C))
    assert np.all(np.diff(r.r_te ** 2) < 0) and np.all(np.diff(r.r_tm ** 2) < 0)
    assert r.r_te[-1] ** 2 < 1e-6


def test_zero_thickness_slab_reflects_nothing():
    d = PlasmaDielectric(PlasmaParams(WP))
    r = mirror_amplitudes(Slab(d, 0.0), np.array([0.0, 1e15]), np.array([1e6, 1e8]))
    assert np.all(r.r_te == 0.0) and np.all(r.r_tm == 0.0)
