"""Command-line front end.

Subcommands:
  expand NAME        print a generator series to the configured order
  wdvv solve|verify  run the coefficient recursion / its verification
  bracket MU NU      evaluate a two-point quantum bracket
  table              emit the hyperelliptic BPS table as CSV
  verify [SUITE...]  run acceptance suites (exit 1 on failure)

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .scalars import Q, scalar_str
from .series import qseries_to_json
from .config import Config
from . import cache as cache_mod
from . import jacobi, wdvv, gwseries, fock, verify as verify_mod


def _series_pretty(series, out):
    cap = f"  (reliable for s-exponent <= {series.s_cap})" if series.s_cap is not None else ""
    out.write(f"# q-window [{series.q_min}, {series.q_max}]{cap}\n")
    for d in range(series.q_min, series.q_max + 1):
        row = series.q_row(d)
        if not row:
            out.write(f"q^{d}: 0\n")
            continue
        bits = []
        for e in sorted(row):
            c = scalar_str(row[e])
            bits.append(c if e == 0 else f"{c}*s^{e}")
        out.write(f"q^{d}: " + " + ".join(bits) + "\n")


def _series_csv(series, out):
    out.write("q,s,re,im\n")
    for d in range(series.q_min, series.q_max + 1):
        row = series.q_row(d)
        for e in sorted(row):
            from .scalars import real_part, imag_part

            out.write(f"{d},{e},{real_part(row[e])},{imag_part(row[e])}\n")


def _emit_series(series, fmt, out, cfg, op=None, args=None):
    payload = qseries_to_json(series)
    if op is not None and cfg.cache_dir:
        cached = cache_mod.fetch(cfg.cache_dir, op, args)
        if cached is not None and cached != payload:
            raise RuntimeError("cache entry differs from recomputation")
        cache_mod.store(cfg.cache_dir, op, args, payload)
    if fmt == "json":
        json.dump(payload, out, sort_keys=True)
        out.write("\n")
    elif fmt == "csv":
        _series_csv(series, out)
    else:
        _series_pretty(series, out)


def cmd_expand(ns, cfg, out):
    name = ns.name
    q_max = cfg.q_max
    prefactored = {
        "Theta_D4": lambda: jacobi.theta_d4(q_max),
        "theta1": lambda: jacobi.theta1(q_max),
        "eta": lambda: jacobi.eta_quotient(q_max, [(1, 1)]),
    }
    if name in prefactored:
        ps = prefactored[name]()
        out.write(f"# q-prefactor {ps.prefactor}\n")
        _emit_series(ps.series, cfg.output, out, cfg, f"expand:{name}", {"q_max": q_max})
        return 0
    if name.startswith("J3_"):
        n = int(name[3:])
        series = jacobi.deformed_j3_half_grid(n, 2 * q_max)
        out.write("# series in u = q^(1/2); row m is the q^(m/2) coefficient\n")
        _emit_series(series, cfg.output, out, cfg, f"expand:{name}", {"q_max": q_max})
        return 0
    try:
        form = jacobi.generator(name, q_max)
    except KeyError as exc:
        sys.stderr.write(str(exc.args[0]) + "\n")
        return 2
    out.write(
        f"# weight {form.weight}, index {Q(form.index2, 2)}, pole order {form.pole_order_z0}\n"
    )
    _emit_series(form.series, cfg.output, out, cfg, f"expand:{name}", {"q_max": q_max})
    return 0


def cmd_wdvv(ns, cfg, out):
    q_max = cfg.q_max
    k_window = ns.k_window if ns.k_window is not None else max(2 * q_max, 4)
    table = wdvv.solve(max(q_max, 1), k_window)
    if ns.action == "solve":
        if cfg.output == "json":
            payload = {
                which: qseries_to_json(wdvv.table_to_qseries(table, which, k_window))
                for which in ("H", "I", "T")
            }
            json.dump(payload, out, sort_keys=True)
            out.write("\n")
        else:
            out.write(table.to_csv())
        return 0
    reports = [
        wdvv.verify_closed_forms(table),
        wdvv.residual_check(table),
        wdvv.itoh_check(table),
        wdvv.trelations_check(table),
        wdvv.h_symmetry_check(table),
    ]
    ok = True
    for r in reports:
        out.write(("OK   " if r.ok else "FAIL ") + r.detail + "\n")
        ok = ok and r.ok
    return 0 if ok else 1


MONO_TOKEN = re.compile(r"p\(\s*([+-]?\d+)\s*,\s*([A-Za-z]\w*)\s*\)|1(?:_S)?|\S+")


def parse_monomial(text, model):
    """Parse 'p(-2,w) p(-1,F) 1' into a creation monomial."""
    parts = []
    saw_vacuum = False
    for match in MONO_TOKEN.finditer(text):
        token = match.group(0)
        if token in ("1", "1_S"):
            saw_vacuum = True
            continue
        if match.group(1) is None:
            caret = " " * match.start() + "^"
            raise ValueError(f"cannot parse monomial token:\n{text}\n{caret}")
        m = int(match.group(1))
        if m >= 0:
            caret = " " * match.start() + "^"
            raise ValueError(f"only creation operators p(-n, class) allowed:\n{text}\n{caret}")
        cls = model.class_index(match.group(2))
        parts.append((-m, cls))
    if not saw_vacuum:
        raise ValueError(f"monomial must end with the vacuum '1': {text!r}")
    return fock.mono(*parts)


def cmd_bracket(ns, cfg, out):
    model = (
        fock.SurfaceModel.k3_rank24()
        if cfg.surface_model == "k3-rank24"
        else fock.SurfaceModel.elliptic_mini()
    )
    try:
        mu = parse_monomial(ns.mu, model)
        nu = parse_monomial(ns.nu, model)
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    if fock.energy(mu) != fock.energy(nu):
        sys.stderr.write(
            f"energy mismatch: |mu| = {fock.energy(mu)}, |nu| = {fock.energy(nu)}\n"
        )
        return 2
    ctx = fock.QuantumContext(model, cfg.q_max)
    series = ctx.ehilb_bracket(fock.FockVector.unit(mu), fock.FockVector.unit(nu))
    _emit_series(series, cfg.output, out, cfg, "bracket", {"mu": ns.mu, "nu": ns.nu, "q_max": cfg.q_max})
    if ns.fit:
        target = (series * jacobi.delta(cfg.q_max + 2)).truncate(cfg.q_max)
        d = fock.energy(mu)
        try:
            fit = jacobi.qjac_fit(target, 2 + 2 * d, 2 * (d - 1), w_order=cfg.w_order)
            out.write(
                f"# fit: {fit.describe()}\n# weight {fit.weight}, index {Q(fit.index2, 2)}, "
                f"holomorphic at z=0: {fit.holomorphic}, verified through q^{fit.verified_q}\n"
            )
        except jacobi.FitError as exc:
            out.write(f"# fit failed: {exc}\n")
            return 1
    return 0


def cmd_table(ns, cfg, out):
    h_max = ns.h_max if ns.h_max is not None else (15 if cfg.long_checks else 10)
    table = gwseries.hyperelliptic_tables(h_max, ns.g_max)
    out.write(table.to_csv())
    return 0


def cmd_verify(ns, cfg, out):
    names = ns.suites or None
    if names:
        unknown = set(names) - set(verify_mod.ALL_SUITES)
        if unknown:
            sys.stderr.write(
                f"unknown suites: {sorted(unknown)}; "
                f"known: {', '.join(verify_mod.ALL_SUITES)}\n"
            )
            return 2
    results = verify_mod.run(names, long=cfg.long_checks, conja_mode=cfg.conja_mode)
    ok = True
    for r in results:
        out.write(f"{'PASS' if r.ok else 'FAIL'} {r.name:12s} {r.seconds:7.1f}s  {r.detail}\n")
        ok = ok and r.ok
    return 0 if ok else 1


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--qmax", type=int, default=None)
    shared.add_argument("--worder", type=int, default=None)
    shared.add_argument("--model", default=None, choices=["k3-rank24", "elliptic-mini"])
    shared.add_argument("--mode", default=None, choices=["full", "sampled"])
    shared.add_argument("--format", default=None, choices=["json", "csv", "pretty"])
    shared.add_argument("--cache-dir", default=None)
    shared.add_argument("--config", default=None)
    shared.add_argument("--long", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="hilbk3", description=__doc__, parents=[shared])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("expand", help="print a generator series", parents=[shared])
    s.add_argument("name")
    s.set_defaults(fn=cmd_expand)

    s = sub.add_parser("wdvv", help="coefficient recursion", parents=[shared])
    s.add_argument("action", choices=["solve", "verify"])
    s.add_argument("--k-window", type=int, default=None)
    s.set_defaults(fn=cmd_wdvv)

    s = sub.add_parser("bracket", help="two-point quantum bracket", parents=[shared])
    s.add_argument("mu")
    s.add_argument("nu")
    s.add_argument("--fit", action="store_true")
    s.set_defaults(fn=cmd_bracket)

    s = sub.add_parser("table", help="hyperelliptic BPS table (CSV)", parents=[shared])
    s.add_argument("--h-max", dest="h_max", type=int, default=None)
    s.add_argument("--g-max", dest="g_max", type=int, default=6)
    s.set_defaults(fn=cmd_table)

    s = sub.add_parser("verify", help="run acceptance suites", parents=[shared])
    s.add_argument("suites", nargs="*")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    flags = {
        "q_max": ns.qmax,
        "w_order": ns.worder,
        "surface_model": ns.model,
        "conja_mode": ns.mode,
        "output": ns.format,
        "cache_dir": ns.cache_dir,
        "long_checks": ns.long,
    }
    try:
        cfg = Config.load(flag_values=flags, config_path=ns.config)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    return ns.fn(ns, cfg, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
