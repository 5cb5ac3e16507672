import numpy as np
import pytest

from casimir_eta import Bulk, PlasmaDielectric, PlasmaParams
from casimir_eta.constants import plasma_frequency_from_wavelength
from casimir_eta.optical import OpticalTable

LAMBDA_P = 136e-9


@pytest.fixture
def plasma136():
    wp = plasma_frequency_from_wavelength(LAMBDA_P)
    return Bulk(PlasmaDielectric(PlasmaParams(wp)))


def drude_table(wp_ev=9.0, g_ev=0.035, lo=0.1, hi=1e3, n=200):
    """Synthetic eps'' samples of a Drude metal (energies in eV)."""
    x = np.logspace(np.log10(lo), np.log10(hi), n)
    y = wp_ev ** 2 * g_ev / (x * (x ** 2 + g_ev ** 2))
    return OpticalTable(x, y, "synthetic-drude")


def write_two_column(path, x, y):
    lines = ["omega_eV,eps_imag"] + [f"{a:.12g},{b:.12g}" for a, b in zip(x, y)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def drude_csv(tmp_path):
    t = drude_table()
    return write_two_column(tmp_path / "drude.csv", t.x, t.eps_pp)


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request, capsys):
    """Record and print one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
