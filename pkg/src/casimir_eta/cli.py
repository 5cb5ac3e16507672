"""Command-line interface: ``casimir-eta <subcommand> [options]``.

Every subcommand reads an optional ``--config`` file, applies ``--set
key=value`` overrides and the convenience flags on top, and writes CSV or
JSON stamped with the configuration fingerprint and units preset.

Exit status: 0 success, 2 configuration error, 3 data error, 4 quadrature
did not converge.
"""

import argparse
import io
import json
import logging
import sys

import numpy as np

from . import __version__
from . import config as cfgmod
from .approximants import KINDS, approximant_report
from .constants import plasma_frequency_from_wavelength
from .dielectric import PlasmaDielectric, PlasmaParams
from .engine import (ALPHA_REFERENCE, QuadratureConfig, proximity_force,
                     reduction_factors, short_distance_alpha)
from .exceptions import ConfigError, ConvergenceError, DataError, DomainError
from .optical import build_eps_grid, fit_drude, load_table, range_sensitivity
from .reflectivity import Bulk

log = logging.getLogger("casimir_eta")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_CONVERGENCE = 0, 2, 3, 4

RESULT_COLUMNS = ["L_m", "eta_F", "err_F", "eta_E", "err_E", "F_per_area_Pa", "E_per_area_J_m2"]


# -- argument parsing -----------------------------------------------------------

def _common(parser):
    g = parser.add_argument_group("run configuration")
    g.add_argument("--config", metavar="PATH", help="flat key=value configuration file")
    g.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                   help="override any configuration key (repeatable)")
    g.add_argument("--paper-units", action="store_true",
                   help="use 1 eV = 1.537e15 rad/s instead of e/hbar")
    g.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    g.add_argument("--format", choices=["csv", "json"], help="output format")
    g.add_argument("--cache-dir", metavar="DIR", help="eps(i omega) grid cache directory")


def _mirror_flags(parser, with_table=True):
    g = parser.add_argument_group("mirror (mirror1; mirror2 defaults to the same)")
    g.add_argument("--structure", choices=["bulk", "slab", "stack", "perfect"])
    g.add_argument("--model", choices=["plasma", "drude", "grid", "table"])
    g.add_argument("--omega-p-ev", type=float, metavar="EV")
    g.add_argument("--gamma-mev", type=float, metavar="MEV")
    g.add_argument("--lambda-p", type=float, metavar="M", help="plasma wavelength in metres")
    g.add_argument("--thickness", type=float, metavar="M", help="slab thickness in metres")
    if with_table:
        g.add_argument("--table", metavar="PATH", help="optical data file (model=table)")
    g.add_argument("--grid", metavar="PATH", help="cached eps(i omega) grid (model=grid)")


def _distance_flags(parser):
    g = parser.add_argument_group("distances (metres)")
    g.add_argument("--L", type=float, nargs="+", metavar="M", help="explicit separations")
    g.add_argument("--L-start", type=float)
    g.add_argument("--L-stop", type=float)
    g.add_argument("--L-count", type=int)
    g.add_argument("--L-scale", choices=["log", "linear"])


def _quad_flags(parser):
    g = parser.add_argument_group("quadrature")
    g.add_argument("--rel-tol", type=float)
    g.add_argument("--k-max", type=float)
    g.add_argument("--spectral-range", type=float, nargs=2, metavar=("LOW_EV", "HIGH_EV"))
    g.add_argument("--jobs", type=int, default=1, help="parallel distance evaluations")


def _table_flags(parser, prefix="kk"):
    g = parser.add_argument_group("optical data")
    g.add_argument("--table", dest="kk_table", metavar="PATH")
    g.add_argument("--table-format", choices=["two-column", "three-column"])
    g.add_argument("--interpolation", choices=["loglog_linear", "linlin_linear"])
    g.add_argument("--low-end", choices=["drude", "inverse_omega"])
    g.add_argument("--high-end", choices=["power_law", "zero"])
    g.add_argument("--drude-omega-p-ev", type=float, metavar="EV")
    g.add_argument("--drude-gamma-mev", type=float, metavar="MEV")
    g.add_argument("--fit-window", type=float, nargs=2, metavar=("LO_EV", "HI_EV"))
    g.add_argument("--range", type=float, nargs=2, metavar=("XMIN_EV", "XMAX_EV"),
                   help="real-axis integration range")
    g.add_argument("--omega-grid", type=float, nargs=3, metavar=("LO_EV", "HI_EV", "COUNT"))
    g.add_argument("--low-tail", choices=["analytic", "truncate"])


def build_parser():
    p = argparse.ArgumentParser(prog="casimir-eta", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eta", help="force/energy reduction factors over a distance grid")
    _common(s); _mirror_flags(s); _distance_flags(s); _quad_flags(s)

    s = sub.add_parser("kk", help="eps(i omega) grid from optical data")
    _common(s); _table_flags(s)
    s.add_argument("--sensitivity", action="store_true",
                   help="also report the half-decade integration-range sensitivity")

    s = sub.add_parser("fit-drude", help="Drude fit of low-frequency optical data")
    _common(s)
    s.add_argument("--table", dest="kk_table", metavar="PATH")
    s.add_argument("--table-format", choices=["two-column", "three-column"])
    s.add_argument("--window", type=float, nargs=2, metavar=("LO_EV", "HI_EV"))
    s.add_argument("--omega-p-ev", type=float, metavar="EV", help="hold the plasma frequency fixed")

    s = sub.add_parser("alpha", help="short-distance coefficient alpha")
    _common(s)

    s = sub.add_parser("approximants", help="closed-form approximants vs the exact plasma result")
    _common(s); _quad_flags(s)
    s.add_argument("--x-min", type=float, default=1e-2, help="smallest L/lambda_P")
    s.add_argument("--x-max", type=float, default=1e2, help="largest L/lambda_P")
    s.add_argument("--count", type=int, default=41)

    s = sub.add_parser("proximity", help="plane-sphere force from the energy reduction factor")
    _common(s); _mirror_flags(s); _distance_flags(s); _quad_flags(s)
    s.add_argument("--radius", type=float, metavar="M")
    s.add_argument("--eta-e", type=float, help="use this eta_E instead of computing it")

    s = sub.add_parser("sensitivity", help="integration-range sensitivity checks")
    _common(s); _table_flags(s); _mirror_flags(s, with_table=False); _distance_flags(s); _quad_flags(s)
    s.add_argument("--factor", type=float, default=10 ** 0.5)
    return p


_FLAG_KEYS = {
    "structure": "mirror1.structure",
    "model": "mirror1.model",
    "omega_p_ev": "mirror1.omega_p_eV",
    "gamma_mev": "mirror1.gamma_meV",
    "lambda_p": "mirror1.lambda_p",
    "thickness": "mirror1.thickness",
    "table": "mirror1.table",
    "grid": "mirror1.grid",
    "L_start": "distance.start",
    "L_stop": "distance.stop",
    "L_count": "distance.count",
    "L_scale": "distance.scale",
    "rel_tol": "quadrature.rel_tol",
    "k_max": "quadrature.k_max",
    "kk_table": "kk.table",
    "table_format": "kk.format",
    "interpolation": "kk.interpolation",
    "low_end": "kk.low_end",
    "high_end": "kk.high_end",
    "drude_omega_p_ev": "kk.drude.omega_p_eV",
    "drude_gamma_mev": "kk.drude.gamma_meV",
    "low_tail": "kk.low_tail",
    "format": "output.format",
    "out": "output.path",
    "cache_dir": "cache.dir",
    "radius": "proximity.radius",
    "eta_e": "proximity.eta_e",
}


def _flag_layer(args):
    flat = {}
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            flat[key] = repr(value) if isinstance(value, float) else str(value)
    if args.paper_units:
        flat["units.preset"] = "paper"
    if getattr(args, "L", None):
        flat["distance.values"] = ",".join(repr(v) for v in args.L)
    if getattr(args, "spectral_range", None):
        flat["quadrature.spectral_low"], flat["quadrature.spectral_high"] = map(repr, args.spectral_range)
    if getattr(args, "fit_window", None):
        flat["kk.fit.window_low"], flat["kk.fit.window_high"] = map(repr, args.fit_window)
    if getattr(args, "window", None):
        flat["kk.fit.window_low"], flat["kk.fit.window_high"] = map(repr, args.window)
    if args.command == "fit-drude" and args.omega_p_ev is not None:
        flat.pop("mirror1.omega_p_eV", None)
        flat["kk.drude.omega_p_eV"] = repr(args.omega_p_ev)
    if getattr(args, "range", None):
        flat["kk.range_low"], flat["kk.range_high"] = map(repr, args.range)
    if getattr(args, "omega_grid", None):
        lo, hi, n = args.omega_grid
        flat["kk.grid_low"], flat["kk.grid_high"], flat["kk.grid_count"] = repr(lo), repr(hi), str(int(n))
    return flat


def resolve_config(args):
    layers = []
    if args.config:
        layers.append(cfgmod.read_config(args.config))
    layers.append(_flag_layer(args))
    layers.append(dict(cfgmod.parse_override(s) for s in args.set))
    return cfgmod.merge(*layers)


# -- output -------------------------------------------------------------------

def _stamp(flat, units_name):
    return {"version": __version__, "fingerprint": cfgmod.fingerprint(flat), "units": units_name}


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(stamp, columns, rows, footer=()):
    buf = io.StringIO()
    for key in ("version", "fingerprint", "units"):
        buf.write(f"# {key}={stamp[key]}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else f"{v:.10g}" for v in row) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _json_text(stamp, payload):
    return json.dumps({**stamp, **payload}, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _write(run_flat, units_name, fmt, path, columns, rows, extra=None, footer=()):
    stamp = _stamp(run_flat, units_name)
    if fmt == "json":
        payload = {"columns": columns, "rows": [list(r) for r in rows], "config": run_flat}
        payload.update(extra or {})
        _emit(_json_text(stamp, payload), path)
    else:
        _emit(_csv_text(stamp, columns, rows, footer), path)


# -- subcommands ----------------------------------------------------------------

def _evaluate(run, distances, jobs=1):
    def one(L):
        return reduction_factors(run.mirror1, run.mirror2, L, run.quadrature, run.units)
    if jobs and jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, distances))
    return [one(L) for L in distances]


def cmd_eta(args, flat):
    run = cfgmod.build_run_config(flat)
    results = _evaluate(run, run.distances, args.jobs)
    rows = [(r.L, r.eta_f, r.err_f, r.eta_e, r.err_e, r.force_per_area, r.energy_per_area)
            for r in results]
    _write(flat, run.units.name, run.output_format, run.output_path, RESULT_COLUMNS, rows,
           extra={"provenance": run.provenance})
    return EXIT_OK


def _table_and_policy(flat):
    r = cfgmod._Reader(flat)
    units = cfgmod.get_units(r.str("units.preset"))
    table = load_table(r.str("kk.table"), flat.get("kk.format") or None)
    policy, info = cfgmod.kk_policy(r, "kk", table, units)
    return r, units, table, policy, info


def cmd_kk(args, flat):
    r, units, table, policy, info = _table_and_policy(flat)
    rng, grid_w, low_tail = cfgmod.kk_settings(r)
    cache_dir = cfgmod.cache_dir_from(flat)
    grid = build_eps_grid(table, policy, grid_w, rng, cache_dir=cache_dir, low_tail=low_tail)
    stamp = _stamp(flat, units.name)
    out = flat.get("output.path")
    if out:
        grid.to_csv(out, extra_header={"config_fingerprint": stamp["fingerprint"],
                                       "units": units.name})
    else:
        sys.stdout.write(f"# fingerprint={grid.fingerprint}\n"
                         f"# config_fingerprint={stamp['fingerprint']}\n# units={units.name}\n"
                         "omega_eV,eps_i\n")
        for w, e in zip(grid.omega, grid.eps_i):
            sys.stdout.write(f"{w:.17g},{e:.17g}\n")
    if info:
        log.info("drude fit: %s", info["drude_fit"])
    if args.sensitivity:
        report = range_sensitivity(table, policy, grid_w, rng, low_tail=low_tail)
        for name, value in report.items():
            status = "ok" if value < 0.01 else "ABOVE 1%"
            sys.stderr.write(f"range {name}: max relative change {value:.3e} ({status})\n")
    return EXIT_OK


def cmd_fit_drude(args, flat):
    r = cfgmod._Reader(flat)
    units = cfgmod.get_units(r.str("units.preset"))
    table = load_table(r.str("kk.table"), flat.get("kk.format") or None)
    fixed = cfgmod._rate(r, "kk.drude", "omega_p", units, required=False)
    window = (r.float("kk.fit.window_low", table.x[0]), r.float("kk.fit.window_high", 0.3))
    res = fit_drude(table, window, fixed, units)
    columns = ["parameter", "value"]
    rows = []
    if not res.fixed_omega_p:
        rows.append(("omega_p_eV", res.omega_p_ev))
    rows += [("gamma_meV", 1e3 * res.gamma_ev), ("rms_relative_residual", res.residual),
             ("n_points", float(res.n_points))]
    if res.fixed_omega_p:
        rows.append(("fixed_omega_p_eV", res.omega_p_ev))
    _write(flat, units.name, r.str("output.format"), flat.get("output.path"), columns, rows)
    return EXIT_OK


def cmd_alpha(args, flat):
    r = cfgmod._Reader(flat)
    alpha, err = short_distance_alpha(full_output=True)
    rows = [("alpha", alpha), ("quadrature_error", err), ("reference", ALPHA_REFERENCE)]
    _write(flat, r.str("units.preset"), r.str("output.format"), flat.get("output.path"),
           ["quantity", "value"], rows)
    return EXIT_OK


def cmd_approximants(args, flat):
    r = cfgmod._Reader(flat)
    quad = cfgmod.quadrature_from(r)
    units = cfgmod.get_units(r.str("units.preset"))
    if not 0 < args.x_min < args.x_max or args.count < 2:
        raise ConfigError("need 0 < x-min < x-max and count >= 2", field="approximants")
    ratio = np.logspace(np.log10(args.x_min), np.log10(args.x_max), args.count)
    lam = 1e-7
    mirror = Bulk(PlasmaDielectric(PlasmaParams(plasma_frequency_from_wavelength(lam, units))))
    exact = np.array([reduction_factors(mirror, None, q * lam, quad, units).eta_f for q in ratio])
    rep = approximant_report(1.0 / ratio, exact)
    columns = ["L_over_lambda_P", "eta_F_exact"] + list(KINDS) + [f"dev_{k}" for k in KINDS]
    rows = [(ratio[i], exact[i], *(rep[k][i] for k in KINDS), *(rep[f"dev_{k}"][i] for k in KINDS))
            for i in range(ratio.size)]
    summary = {f"max_dev_{k}": rep[f"max_{k}"] for k in KINDS}
    footer = [f"max_dev_{k}={rep[f'max_{k}']:.6g}" for k in KINDS]
    footer.append(f"uniform_approximant_within_5pct={'yes' if rep['max_U'] <= 0.05 else 'no'}")
    _write(flat, units.name, r.str("output.format"), flat.get("output.path"), columns, rows,
           extra={"summary": summary}, footer=footer)
    return EXIT_OK


def cmd_proximity(args, flat):
    r = cfgmod._Reader(flat)
    radius = r.float("proximity.radius", positive=True)
    direct = r.has("proximity.eta_e")
    run = cfgmod.build_run_config(flat, need_mirrors=not direct)
    rows = []
    for L in run.distances:
        if direct:
            eta_e = r.float("proximity.eta_e")
        else:
            eta_e = reduction_factors(run.mirror1, run.mirror2, L, run.quadrature, run.units).eta_e
        rows.append((radius, L, eta_e, proximity_force(radius, L, eta_e, run.units)))
    _write(flat, run.units.name, run.output_format, run.output_path,
           ["R_m", "L_m", "eta_E", "F_pt_N"], rows)
    return EXIT_OK


def cmd_sensitivity(args, flat):
    rows = []
    r = cfgmod._Reader(flat)
    units = cfgmod.get_units(r.str("units.preset"))
    if r.has("kk.table"):
        _, units, table, policy, _ = _table_and_policy(flat)
        rng, grid_w, low_tail = cfgmod.kk_settings(r)
        for name, value in range_sensitivity(table, policy, grid_w, rng, args.factor,
                                             low_tail).items():
            rows.append(("kk_range", name, value, "" if value < 0.01 else "above 1%"))
    if cfgmod.mirror_keys_present({k: v for k, v in flat.items()
                                   if k != "mirror1.structure"}, "mirror1"):
        run = cfgmod.build_run_config(flat)
        base = run.quadrature.spectral_range or (1e-4, 1e3)
        f = args.factor
        variants = {"shrink": (base[0] * f, base[1] / f), "widen": (base[0] / f, base[1] * f)}

        def etas(rng):
            q = QuadratureConfig(run.quadrature.rel_tol, run.quadrature.abs_tol,
                                 run.quadrature.k_max, run.quadrature.max_subdivisions, rng)
            res = [reduction_factors(run.mirror1, run.mirror2, L, q, run.units)
                   for L in run.distances]
            return np.array([x.eta_f for x in res]), np.array([x.eta_e for x in res])

        f0, e0 = etas(base)
        for name, rng in variants.items():
            f1, e1 = etas(rng)
            df = float(np.max(np.abs(f1 / f0 - 1.0)))
            de = float(np.max(np.abs(e1 / e0 - 1.0)))
            rows.append(("spectral_range_eta_F", name, df, "" if df < 0.015 else "above 1.5%"))
            rows.append(("spectral_range_eta_E", name, de, "" if de < 0.02 else "above 2%"))
    if not rows:
        raise ConfigError("nothing to check: give --table and/or a mirror with distances")
    _write(flat, units.name, r.str("output.format"), flat.get("output.path"),
           ["check", "variant", "max_relative_change", "flag"], rows)
    return EXIT_OK


COMMANDS = {
    "eta": cmd_eta,
    "kk": cmd_kk,
    "fit-drude": cmd_fit_drude,
    "alpha": cmd_alpha,
    "approximants": cmd_approximants,
    "proximity": cmd_proximity,
    "sensitivity": cmd_sensitivity,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        flat = resolve_config(args)
        return COMMANDS[args.command](args, flat)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"configuration error: {exc}")
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, f"quadrature did not converge: {exc}")
    except DataError as exc:
        return _fail(EXIT_DATA, f"data error: {exc}")
    except DomainError as exc:
        return _fail(EXIT_CONFIG, f"invalid input: {exc}")


def _fail(code, message):
    sys.stderr.write(f"casimir-eta: {message}\n")
    return code

if __name__ == "__main__":
    sys.exit(main())
