import numpy as np
import pytest

from casimir_eta import (PHYSICAL, DrudeParams, EpsIGrid, ExtrapolationPolicy, OpticalTable,
                         build_eps_grid, drude_eps_i, eval_eps_pp, fit_drude, kk_transform,
                         load_table)
from casimir_eta import optical
from casimir_eta.exceptions import DataError, DomainError, FitError
from casimir_eta.optical import (DrudeTail, InverseOmega, PowerLaw, ZeroTail, check_seams,
                                 default_omega_grid, range_sensitivity)

from conftest import drude_table

WP, G = 9.0, 0.035


def drude_policy(table, **kw):
    return ExtrapolationPolicy(DrudeTail(WP, G), PowerLaw.fitted(table), **kw)


def analytic(w):
    return drude_eps_i(w, DrudeParams(WP, G))


# -- parsing --------------------------------------------------------------------

def test_two_column_parse(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# comment\nomega_eV,eps_imag\n1.0,2.0\n2.0,0.5\n")
    t = load_table(p)
    assert t.eps_pp[0] == 2.0 and len(t) == 2 and t.source_label == "t.csv"


def test_three_column_parse(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("omega_eV,n,k\n1.0,1.0,0.5\n2.0,0.5,0.5\n")
    t = load_table(p)
    assert t.eps_pp[0] == pytest.approx(1.0)


def test_headerless_inference(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1.0,1.0,0.5\n2.0,0.5,0.5\n")
    assert load_table(p).eps_pp[1] == pytest.approx(0.5)


@pytest.mark.parametrize("body, line, fragment", [
    ("omega_eV,eps_imag\n2.0,1.0\n1.0,0.5\n", 3, "increase"),
    ("omega_eV,eps_imag\n1.0,1.0\n2.0,-0.5\n", 3, "positive"),
    ("omega_eV,eps_imag\n1.0,1.0\n2.0,abc\n", 3, "malformed"),
    ("omega_eV,eps_imag\n1.0,1.0\n2.0,0.5,3\n", 3, "columns"),
    ("omega_eV,eps_imag\n1.0,1.0\n1.0,0.5\n", 3, "duplicate"),
    ("freq,loss\n1.0,1.0\n", 1, "header"),
])
def test_parse_errors_carry_line(tmp_path, body, line, fragment):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(DataError) as info:
        load_table(p)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_too_few_rows(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("omega_eV,eps_imag\n1.0,1.0\n")
    with pytest.raises(DataError):
        load_table(p)
    with pytest.raises(DataError):
        load_table(tmp_path / "missing.csv")


def test_table_invariants():
    with pytest.raises(DataError):
        OpticalTable([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(DataError):
        OpticalTable([2.0, 1.0], [1.0, 1.0])
    t = OpticalTable.unchecked([1.0, 2.0], [0.0, 0.0])
    assert t.eps_pp.sum() == 0.0


# -- interpolation and tails ------------------------------------------------------

def test_interpolation_examples():
    t = OpticalTable([1.0, 100.0], [100.0, 1.0])
    pol = ExtrapolationPolicy(InverseOmega.matched(t), ZeroTail())
    assert eval_eps_pp(t, pol, 10.0) == pytest.approx(10.0)
    lin = ExtrapolationPolicy(InverseOmega.matched(t), ZeroTail(), "linlin_linear")
    assert eval_eps_pp(t, lin, 10.0) == pytest.approx(91.0)


def test_drude_low_tail_value():
    t = drude_table(g_ev=0.030)
    pol = ExtrapolationPolicy(DrudeTail(9.0, 0.030), ZeroTail())
    x = 0.01
    assert eval_eps_pp(t, pol, x) == pytest.approx(81 * 0.03 / (x * (x * x + 0.03 ** 2)))


def test_sparse_table_bumps():
    # three samples spanning 0.065-1.3 eV of a steep absorption curve
    x = np.array([0.065, 0.3, 1.3])
    e = 81 * 0.03 / (x * (x * x + 0.03 ** 2))
    t = OpticalTable(x, e)
    log = ExtrapolationPolicy(InverseOmega.matched(t), ZeroTail())
    lin = ExtrapolationPolicy(InverseOmega.matched(t), ZeroTail(), "linlin_linear")
    mids = np.sqrt(x[:-1] * x[1:])
    assert np.all(eval_eps_pp(t, lin, mids) > eval_eps_pp(t, log, mids))


def test_seam_check():
    t = drude_table()
    check_seams(t, drude_policy(t))
    with pytest.raises(DataError):
        check_seams(t, ExtrapolationPolicy(DrudeTail(5.0, 0.035), ZeroTail()))
    check_seams(t, ExtrapolationPolicy(DrudeTail(5.0, 0.035), ZeroTail(), seam_tolerance=None))


def test_inverse_omega_matches_first_sample():
    t = drude_table()
    tail = InverseOmega.matched(t)
    assert tail(t.x[0]) == pytest.approx(t.eps_pp[0])


def test_power_law_tail():
    t = drude_table()
    tail = PowerLaw.fitted(t)
    assert tail.exponent == -3.0
    assert tail(t.x[-1]) == pytest.approx(t.eps_pp[-1], rel=0.05)
    assert tail(2e4) == 0.0


def test_policy_validation():
    with pytest.raises(DomainError):
        ExtrapolationPolicy(ZeroTail(), ZeroTail(), "spline")


# -- Drude fit ------------------------------------------------------------------

def test_fit_round_trip():
    t = drude_table(lo=0.05)
    res = fit_drude(t, (0.1, 0.5))
    assert res.omega_p_ev == pytest.approx(WP, rel=0.01)
    assert res.gamma_ev == pytest.approx(G, rel=0.01)
    assert res.params.omega_p == pytest.approx(PHYSICAL.ev(res.omega_p_ev))
    assert res.residual < 1e-6


def test_fit_fixed_plasma_frequency():
    t = drude_table(lo=0.05)
    res = fit_drude(t, (0.1, 0.5), fixed_omega_p=PHYSICAL.ev(WP))
    assert res.gamma_ev == pytest.approx(G, rel=0.005)
    assert res.fixed_omega_p


def test_fit_window_errors():
    t = drude_table()
    with pytest.raises(FitError):
        fit_drude(t, (1e-3, 1e-2))
    with pytest.raises(FitError):
        fit_drude(t, (t.x[0], t.x[1]))
    assert issubclass(FitError, DataError)


def test_fit_noisy_data_stays_close():
    rng = np.random.default_rng(7)
    t = drude_table(lo=0.05)
    noisy = OpticalTable(t.x, t.eps_pp * np.exp(0.02 * rng.standard_normal(t.x.size)))
    res = fit_drude(noisy, (0.05, 0.5))
    assert res.omega_p_ev == pytest.approx(WP, rel=0.03)
    assert res.gamma_ev == pytest.approx(G, rel=0.05)


# -- Kramers-Kronig ---------------------------------------------------------------

def test_kk_closure_single_point():
    t = drude_table()
    val = kk_transform(t, drude_policy(t), 1.0)
    assert val == pytest.approx(1 + WP ** 2 / (1.0 * (1.0 + G)), rel=5e-3)


def test_kk_closure_default_grid():
    t = drude_table()
    w = default_omega_grid()
    assert w.size == 60 and w[0] == pytest.approx(1e-4) and w[-1] == pytest.approx(1e3)
    eps = kk_transform(t, drude_policy(t), w)
    assert np.max(np.abs(eps / analytic(w) - 1)) < 5e-3
    assert np.all(np.diff(eps) <= 0) and np.all(eps >= 1)


def test_kk_zero_absorption_gives_vacuum():
    t = OpticalTable.unchecked([0.1, 1.0, 10.0], [0.0, 0.0, 0.0])
    pol = ExtrapolationPolicy(InverseOmega(0.0), ZeroTail())
    assert kk_transform(t, pol, np.array([0.01, 1.0, 100.0])) == pytest.approx(np.ones(3), abs=0)


def test_kk_truncated_tail_underestimates():
    t = drude_table()
    full = kk_transform(t, drude_policy(t), 1e-4)
    bare = kk_transform(t, drude_policy(t), 1e-4, low_tail="truncate")
    assert bare < full
    assert abs(bare / analytic(1e-4) - 1) < 0.02


def test_kk_domain_errors():
    t = drude_table()
    pol = drude_policy(t)
    with pytest.raises(DomainError):
        kk_transform(t, pol, 0.0)
    with pytest.raises(DomainError):
        kk_transform(t, pol, 1.0, (1.0, 0.1))
    with pytest.raises(DomainError):
        kk_transform(t, pol, 1.0, low_tail="none")


def test_range_sensitivity_small():
    t = drude_table()
    rep = range_sensitivity(t, drude_policy(t))
    assert set(rep) == {"x_min/f", "x_min*f", "x_max/f", "x_max*f", "widen", "shrink"}
    assert max(rep.values()) < 0.01


# -- grids and caching --------------------------------------------------------------

def test_grid_single_point_matches_transform():
    t = drude_table()
    pol = drude_policy(t)
    g = build_eps_grid(t, pol, [1.0])
    assert g.eps_i[0] == pytest.approx(kk_transform(t, pol, 1.0), rel=1e-12)


def test_grid_csv_round_trip(tmp_path):
    t = drude_table()
    g = build_eps_grid(t, drude_policy(t), np.logspace(-2, 2, 9))
    path = g.to_csv(tmp_path / "sub" / "g.csv")
    back = EpsIGrid.from_csv(path)
    assert back.fingerprint == g.fingerprint
    assert np.array_equal(back.omega, g.omega) and np.array_equal(back.eps_i, g.eps_i)
    assert list(tmp_path.joinpath("sub").iterdir()) == [path]


def test_grid_cache_hit_skips_integration(tmp_path, monkeypatch):
    t = drude_table()
    pol = drude_policy(t)
    w = np.logspace(-2, 2, 9)
    first = build_eps_grid(t, pol, w, cache_dir=tmp_path)

    def boom(*a, **k):
        raise AssertionError("integration ran on a cache hit")
    monkeypatch.setattr(optical, "kk_transform", boom)
    second = build_eps_grid(t, pol, w, cache_dir=tmp_path)
    assert np.array_equal(first.eps_i, second.eps_i)
    # a different policy misses the cache
    with pytest.raises(AssertionError):
        build_eps_grid(t, drude_policy(t, interpolation="linlin_linear"), w, cache_dir=tmp_path)


def test_grid_validation():
    t = drude_table()
    with pytest.raises(DomainError):
        build_eps_grid(t, drude_policy(t), [1.0, 0.5])


def test_grid_feeds_tabulated_dielectric():
    t = drude_table()
    g = build_eps_grid(t, drude_policy(t))
    d = g.dielectric(PHYSICAL)
    w = PHYSICAL.ev(np.array([1e-3, 0.3, 30.0]))
    assert np.allclose(d.eps_i(w), analytic(np.array([1e-3, 0.3, 30.0])), rtol=1e-2)


def test_malformed_grid_file(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("# fingerprint=abc\nomega_eV,eps_i\n1.0;2.0\n")
    with pytest.raises(DataError):
        EpsIGrid.from_csv(p)
