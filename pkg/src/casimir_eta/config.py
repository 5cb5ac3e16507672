"""Run configuration: flat ``section.key = value`` files plus overrides.

Example::

    units.preset = paper
    mirror1.structure = bulk
    mirror1.model = drude
    mirror1.omega_p_eV = 7.5
    mirror1.gamma_meV = 130
    distance.values = 1e-7, 5e-7, 3e-6
    output.format = csv

Dielectric blocks live under a prefix (``mirror1``, ``mirror1.layer2``,
``mirror1.substrate``...).  ``model`` is one of ``plasma``, ``drude``,
``grid`` (a cached eps(i omega) CSV) or ``table`` (optical data run through
the dispersion relation).  Rates are read in rad/s (``omega_p``, ``gamma``)
or with explicit unit suffixes (``omega_p_eV``, ``gamma_meV``, ``gamma_eV``,
``lambda_p`` in metres).
"""

import configparser
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .constants import PRESETS, get_units, plasma_frequency_from_wavelength
from .dielectric import DrudeDielectric, DrudeParams, PlasmaDielectric, PlasmaParams
from .engine import QuadratureConfig
from .exceptions import ConfigError, DomainError
from .optical import (DEFAULT_KK_RANGE, DrudeTail, EpsIGrid, ExtrapolationPolicy,
                      InverseOmega, PowerLaw, ZeroTail, build_eps_grid, default_omega_grid,
                      fit_drude, load_table)
from .reflectivity import Bulk, Perfect, Slab, Stack

CACHE_ENV = "CASIMIR_ETA_CACHE_DIR"

DEFAULTS = {
    "units.preset": "physical",
    "mirror1.structure": "bulk",
    "distance.scale": "log",
    "distance.count": "1",
    "kk.range_low": str(DEFAULT_KK_RANGE[0]),
    "kk.range_high": str(DEFAULT_KK_RANGE[1]),
    "kk.grid_low": "1e-4",
    "kk.grid_high": "1e3",
    "kk.grid_count": "60",
    "kk.low_tail": "analytic",
    "output.format": "csv",
}


def read_config(path):
    """Parse a flat key=value file into a ``{dotted.key: str}`` dict."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", field=str(path)) from exc
    try:
        parser.read_string("[__root__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", field=str(path)) from exc
    out = {}
    for section in parser.sections():
        prefix = "" if section == "__root__" else section + "."
        for key, value in parser.items(section):
            out[prefix + key.strip()] = value.strip()
    return out


def parse_override(text):
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {text!r}")
    return key.strip(), value.strip()


def merge(*layers):
    out = dict(DEFAULTS)
    for layer in layers:
        out.update({k: v for k, v in layer.items() if v is not None})
    return out


# keys that only say where things are written; they never change the numbers
_LOCATION_KEYS = ("output.path", "cache.dir")


def fingerprint(flat):
    """Stable hash of the configuration and library version."""
    config = {k: v for k, v in sorted(flat.items()) if k not in _LOCATION_KEYS}
    payload = json.dumps({"version": __version__, "config": config}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


class _Reader:
    def __init__(self, flat):
        self.flat = flat

    def has(self, key):
        return key in self.flat and self.flat[key] != ""

    def str(self, key, default=None, choices=None):
        value = self.flat.get(key, default)
        if value is None or value == "":
            if default is None:
                raise ConfigError("missing required value", field=key)
            value = default
        if choices is not None and value not in choices:
            raise ConfigError(f"expected one of {sorted(choices)}, got {value!r}", field=key)
        return value

    def float(self, key, default=None, positive=False):
        raw = self.flat.get(key)
        if raw is None or raw == "":
            if default is None:
                raise ConfigError("missing required value", field=key)
            return float(default)
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"not a number: {raw!r}", field=key) from None
        if positive and not value > 0.0:
            raise ConfigError(f"must be positive, got {value}", field=key)
        return value

    def int(self, key, default=None, minimum=None):
        value = self.float(key, default)
        if value != int(value):
            raise ConfigError(f"must be an integer, got {value}", field=key)
        value = int(value)
        if minimum is not None and value < minimum:
            raise ConfigError(f"must be >= {minimum}", field=key)
        return value

    def floats(self, key):
        raw = self.flat.get(key, "")
        try:
            return [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"not a list of numbers: {raw!r}", field=key) from None


@dataclass
class RunConfig:
    flat: Dict[str, str]
    units: object
    mirror1: object
    mirror2: Optional[object]
    distances: np.ndarray
    quadrature: QuadratureConfig
    output_path: Optional[str]
    output_format: str
    cache_dir: Optional[str]
    provenance: List[dict] = field(default_factory=list)

    @property
    def fingerprint(self):
        return fingerprint(self.flat)


def cache_dir_from(flat):
    return os.environ.get(CACHE_ENV) or flat.get("cache.dir") or None


def _rate(r, prefix, name, units, required=True):
    """Read a rate given in rad/s, eV or meV under ``prefix.name[_eV|_meV]``."""
    if r.has(f"{prefix}.{name}"):
        return r.float(f"{prefix}.{name}", positive=name == "omega_p")
    if r.has(f"{prefix}.{name}_eV"):
        return units.ev(r.float(f"{prefix}.{name}_eV"))
    if r.has(f"{prefix}.{name}_meV"):
        return units.ev(1e-3 * r.float(f"{prefix}.{name}_meV"))
    if required:
        raise ConfigError(f"missing; give {name}, {name}_eV or {name}_meV", field=f"{prefix}.{name}")
    return None


def kk_policy(r, prefix, table, units):
    """Extrapolation policy for a table-backed dielectric block."""
    interp = r.str(f"{prefix}.interpolation", "loglog_linear",
                   choices={"loglog_linear", "linlin_linear"})
    low_kind = r.str(f"{prefix}.low_end", "drude", choices={"drude", "inverse_omega"})
    info = {}
    if low_kind == "drude":
        wp = _rate(r, f"{prefix}.drude", "omega_p", units, required=False)
        g = _rate(r, f"{prefix}.drude", "gamma", units, required=False)
        if wp is not None and g is not None:
            params = DrudeParams(wp, g)
        else:
            window = (r.float(f"{prefix}.fit.window_low", table.x[0]),
                      r.float(f"{prefix}.fit.window_high", 0.3))
            res = fit_drude(table, window, wp, units)
            params = res.params
            info = {"drude_fit": {"omega_p_eV": res.omega_p_ev, "gamma_eV": res.gamma_ev,
                                  "residual": res.residual, "n_points": res.n_points}}
        low = DrudeTail.from_params(params, units)
    else:
        low = InverseOmega.matched(table)
    high_kind = r.str(f"{prefix}.high_end", "power_law", choices={"power_law", "zero"})
    high = PowerLaw.fitted(table) if high_kind == "power_law" else ZeroTail()
    seam = r.float(f"{prefix}.seam_tolerance", 0.05)
    return ExtrapolationPolicy(low, high, interp, seam if seam > 0 else None), info


def kk_settings(r):
    rng = (r.float("kk.range_low", positive=True), r.float("kk.range_high", positive=True))
    grid = default_omega_grid(r.float("kk.grid_low", positive=True),
                              r.float("kk.grid_high", positive=True),
                              r.int("kk.grid_count", minimum=1))
    low_tail = r.str("kk.low_tail", choices={"analytic", "truncate"})
    return rng, grid, low_tail


def build_dielectric(r, prefix, units, cache_dir, provenance):
    model = r.str(f"{prefix}.model", choices={"plasma", "drude", "grid", "table"})
    try:
        if model in ("plasma", "drude"):
            if r.has(f"{prefix}.lambda_p"):
                wp = plasma_frequency_from_wavelength(r.float(f"{prefix}.lambda_p", positive=True),
                                                      units)
            else:
                wp = _rate(r, prefix, "omega_p", units)
            if model == "plasma":
                return PlasmaDielectric(PlasmaParams(wp))
            gamma = _rate(r, prefix, "gamma", units)
            return DrudeDielectric(DrudeParams(wp, gamma))
        if model == "grid":
            grid = EpsIGrid.from_csv(r.str(f"{prefix}.grid"))
            provenance.append({"block": prefix, "grid_fingerprint": grid.fingerprint})
            return grid.dielectric(units)
        # a mirror without its own table inherits the kk.* block
        src = prefix if r.has(f"{prefix}.table") else "kk"
        table = load_table(r.str(f"{src}.table"), r.flat.get(f"{src}.format") or None)
        policy, info = kk_policy(r, src, table, units)
        rng, grid_w, low_tail = kk_settings(r)
        grid = build_eps_grid(table, policy, grid_w, rng, cache_dir=cache_dir, low_tail=low_tail)
        provenance.append({"block": prefix, "grid_fingerprint": grid.fingerprint, **info})
        return grid.dielectric(units, label=table.source_label)
    except DomainError as exc:
        raise ConfigError(str(exc), field=prefix) from exc


def build_mirror(r, prefix, units, cache_dir, provenance):
    structure = r.str(f"{prefix}.structure", "bulk", choices={"bulk", "slab", "stack", "perfect"})
    if structure == "perfect":
        return Perfect()
    if structure == "bulk":
        return Bulk(build_dielectric(r, prefix, units, cache_dir, provenance))
    if structure == "slab":
        return Slab(build_dielectric(r, prefix, units, cache_dir, provenance),
                    r.float(f"{prefix}.thickness", positive=False))
    n = r.int(f"{prefix}.layers", minimum=1)
    layers = []
    for i in range(1, n + 1):
        lp = f"{prefix}.layer{i}"
        layers.append((build_dielectric(r, lp, units, cache_dir, provenance),
                       r.float(f"{lp}.thickness", positive=True)))
    substrate = build_dielectric(r, f"{prefix}.substrate", units, cache_dir, provenance)
    return Stack(tuple(layers), substrate)


def distances_from(r):
    if r.has("distance.values"):
        values = np.array(r.floats("distance.values"))
        if values.size == 0 or np.any(values <= 0):
            raise ConfigError("distances must be positive", field="distance.values")
        return np.sort(values)
    start = r.float("distance.start", positive=True)
    count = r.int("distance.count", minimum=1)
    stop = r.float("distance.stop", start, positive=True)
    if count == 1:
        return np.array([start])
    scale = r.str("distance.scale", choices={"log", "linear"})
    if scale == "log":
        return np.logspace(np.log10(start), np.log10(stop), count)
    return np.linspace(start, stop, count)


def quadrature_from(r):
    spectral = None
    if r.has("quadrature.spectral_low") or r.has("quadrature.spectral_high"):
        spectral = (r.float("quadrature.spectral_low", 1e-4, positive=True),
                    r.float("quadrature.spectral_high", 1e3, positive=True))
    try:
        return QuadratureConfig(
            rel_tol=r.float("quadrature.rel_tol", 1e-5),
            abs_tol=r.float("quadrature.abs_tol", 1e-12),
            k_max=r.float("quadrature.k_max", 40.0),
            max_subdivisions=r.int("quadrature.max_subdivisions", 4000),
            spectral_range=spectral)
    except DomainError as exc:
        raise ConfigError(str(exc), field="quadrature") from exc


def mirror_keys_present(flat, prefix):
    return any(k.startswith(prefix + ".") for k in flat)


def build_run_config(flat, need_mirrors=True, need_distances=True):
    """Validate a merged flat config and construct every run object."""
    r = _Reader(flat)
    units = get_units(r.str("units.preset", choices=set(PRESETS)))
    cache_dir = cache_dir_from(flat)
    provenance = []
    mirror1 = mirror2 = None
    if need_mirrors:
        mirror1 = build_mirror(r, "mirror1", units, cache_dir, provenance)
        if mirror_keys_present(flat, "mirror2"):
            mirror2 = build_mirror(r, "mirror2", units, cache_dir, provenance)
    distances = distances_from(r) if need_distances else np.array([])
    return RunConfig(flat=flat, units=units, mirror1=mirror1, mirror2=mirror2,
                     distances=distances, quadrature=quadrature_from(r),
                     output_path=flat.get("output.path") or None,
                     output_format=r.str("output.format", choices={"csv", "json"}),
                     cache_dir=cache_dir, provenance=provenance)
