"""Command-line front end.

Usage::

    pathtransport transport --entry constant_gamma --path line --s 0 --t 1
    pathtransport wilson --entry u1_uniform --path circle
    pathtransport laws --entry su2_constant --suite groupoid --suite axioms
    pathtransport laws --mock path_global
    pathtransport roundtrip --entry sphere_levi_civita
    pathtransport convergence --format csv

Settings are resolved as defaults, then ``--config FILE`` (JSON), then
explicit flags. Exit codes: 0 all checks passed, 1 a law failed, 2 the
configuration could not be parsed or resolved, 3 a numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np
from pydantic import ValidationError

from . import catalog, mocks, suites
from .descriptors import COMMANDS, SUITE_NAMES, RunConfig, build_connection, build_path, build_potential
from .errors import NumericalError, TransportError
from .gauge import wilson_loop
from .linear import IntegratorConfig, transport_matrix
from .matrices import frob
from .parallel import AxiomSuite, check_axioms, rule_from_transport
from .report import SCHEMA_VERSION, LawReport, dumps, merge, to_csv
from .transport import check_groupoid

EXIT_OK, EXIT_LAW, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    """The run configuration is malformed or refers to something that does not exist."""


# --------------------------------------------------------------------------
# Argument parsing and configuration merging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathtransport",
                                     description="Transports along paths: integration, holonomy and law checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override its fields")
    common.add_argument("--tol", type=float, help="main tolerance for the selected checks")
    common.add_argument("--steps", type=int, help="integrator steps per transport")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--entry", help=f"catalog entry: {', '.join(catalog.CATALOG)}")
    common.add_argument("--param", action="append", default=None, metavar="KEY=JSON",
                        help="catalog entry parameter, e.g. --param B=3.14 (repeatable)")
    common.add_argument("--path", dest="path_name", help="name of a path listed by the catalog entry")

    p = sub.add_parser("transport", parents=[common], help="print H(t, s) along a path")
    p.add_argument("--s", type=float, help="source parameter (default: start of the path)")
    p.add_argument("--t", type=float, help="target parameter (default: end of the path)")

    sub.add_parser("wilson", parents=[common], help="group element round a closed loop")

    p = sub.add_parser("laws", parents=[common], help="run law suites and write a report table")
    p.add_argument("--suite", dest="suites", action="append", choices=SUITE_NAMES,
                   help="suite to run (repeatable; default groupoid and locality)")
    p.add_argument("--mock", choices=sorted(mocks.MOCKS), help="run groupoid, locality and axiom checks on a "
                   "negative-control transport instead of a catalog entry")
    p.add_argument("--grid", type=int, help="grid points per path for the mock checks (default 9)")

    sub.add_parser("roundtrip", parents=[common], help="transport and parallel-rule round trips; "
                   "without --entry uses the frame example")

    p = sub.add_parser("convergence", parents=[common], help="residual-vs-steps tables and fitted orders")
    p.add_argument("--steps-list", type=int, nargs="+", help="step counts (default 250 500 1000 2000)")
    return parser


def _parse_params(items: Sequence[str] | None) -> dict:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--param expects KEY=JSON, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < config file < flags."""
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data["command"] = args.command
    flags = {
        "tol": args.tol, "format": args.format, "out": args.out, "entry": args.entry,
        "path_name": args.path_name, "s": getattr(args, "s", None), "t": getattr(args, "t", None),
        "suites": getattr(args, "suites", None), "mock": getattr(args, "mock", None),
        "grid": getattr(args, "grid", None), "steps_list": getattr(args, "steps_list", None),
    }
    for key, value in flags.items():
        if value is not None:
            data[key] = value
    params = _parse_params(args.param)
    if params:
        data["entry_params"] = {**data.get("entry_params", {}), **params}
    if args.steps is not None:
        data["integrator"] = {**data.get("integrator", {}), "steps": args.steps}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# Helpers


def matrix_json(M: np.ndarray) -> dict:
    M = np.asarray(M)
    return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}


def _entry(cfg: RunConfig, required: bool = True) -> catalog.CatalogEntry | None:
    if cfg.entry is None:
        if required:
            raise ConfigError("this command needs --entry (or 'entry' in the config)")
        return None
    try:
        return catalog.get_entry(cfg.entry, **cfg.entry_params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {cfg.entry}: {exc}") from exc


def _entry_path(entry: catalog.CatalogEntry, name: str | None, default: str):
    try:
        return name or default, entry.path(name or default)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc


def _tol(cfg: RunConfig, kwargs: dict) -> dict:
    if cfg.tol is not None and "tol" not in kwargs:
        kwargs["tol"] = cfg.tol
    return kwargs


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_failures(rep: LawReport) -> None:
    for s in rep.summary():
        if not s.passed:
            w = s.witness
            where = f"{w.path} s={w.s:.6g} t={w.t:.6g}" if w else ""
            print(f"FAIL {s.law}: max residual {s.residual:.3e} ({where})", file=sys.stderr)


# --------------------------------------------------------------------------
# Commands


def cmd_transport(cfg: RunConfig) -> int:
    icfg = cfg.integrator.build()
    entry = _entry(cfg, required=cfg.connection is None)
    conn = build_connection(cfg.connection) if cfg.connection is not None else entry.connection
    label = None
    if cfg.path is not None:
        path = build_path(cfg.path)
    elif entry is not None:
        label, path = _entry_path(entry, cfg.path_name, next(iter(entry.paths)))
    else:
        raise ConfigError("transport needs a path descriptor or a catalog entry")
    s = path.domain.a if cfg.s is None else cfg.s
    t = path.domain.b if cfg.t is None else cfg.t
    H = transport_matrix(conn, path, s, t, icfg)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "transport",
        "connection": conn.name,
        "path": path.label,
        "s": float(s),
        "t": float(t),
        "steps": icfg.steps,
        "matrix": matrix_json(H),
    }
    if entry is not None and label is not None and cfg.connection is None and cfg.path is None:
        doc["oracle_residual"] = frob(H - entry.oracle(label, s, t))
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("row", "col", "re", "im"))
        for (i, j), z in np.ndenumerate(H):
            w.writerow((i, j, format(float(np.real(z)), ".17g"), format(float(np.imag(z)), ".17g")))
        _emit(buf.getvalue(), cfg)
    else:
        _emit(dumps(doc), cfg)
    return EXIT_OK


def cmd_wilson(cfg: RunConfig) -> int:
    icfg = cfg.integrator.build()
    entry = _entry(cfg, required=cfg.potential is None)
    if cfg.potential is not None:
        A = build_potential(cfg.potential)
    elif entry.potential is None:
        raise ConfigError(f"catalog entry {entry.name!r} has no gauge potential")
    else:
        A = entry.potential
    if cfg.path is not None:
        loop = build_path(cfg.path)
    elif entry is not None:
        _, loop = _entry_path(entry, cfg.path_name, entry.loops[0] if entry.loops else next(iter(entry.paths)))
    else:
        raise ConfigError("wilson needs a loop descriptor or a catalog entry")
    g = wilson_loop(A, loop, icfg)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "wilson",
        "group": g.group,
        "potential": A.name,
        "loop": loop.label,
        "base_point": [float(x) for x in g.base_point],
        "steps": icfg.steps,
        "matrix": matrix_json(g.matrix),
        "phase": g.phase,
    }
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("row", "col", "re", "im"))
        for (i, j), z in np.ndenumerate(g.matrix):
            w.writerow((i, j, format(float(np.real(z)), ".17g"), format(float(np.imag(z)), ".17g")))
        _emit(buf.getvalue(), cfg)
    else:
        _emit(dumps(doc), cfg)
    return EXIT_OK


def _mock_report(cfg: RunConfig, icfg: IntegratorConfig) -> LawReport:
    entry = _entry(cfg, required=False) or catalog.constant_gamma()
    fam = mocks.MOCKS[cfg.mock]
    I = fam() if cfg.mock == "path_global" else fam(cfg=icfg)
    fine_I = fam() if cfg.mock == "path_global" else fam(cfg=suites.fine(icfg))
    paths = list(entry.paths.values())
    tol = cfg.tol if cfg.tol is not None else suites.DEFAULT_TOL
    grid_of = (lambda p: p.domain.grid(cfg.grid))
    rep = LawReport(f"mock:{cfg.mock}")
    for p in paths:
        check_groupoid(I, p, grid_of(p), tol=tol, report=rep)
    rep.extend(suites.locality_suite(I, paths, tol=tol, fine_family=fine_I))
    rep.extend(check_axioms(rule_from_transport(fine_I), AxiomSuite(paths), tol=tol))
    return rep


def _suite_report(name: str, entry: catalog.CatalogEntry, cfg: RunConfig, icfg: IntegratorConfig) -> LawReport | None:
    fn = suites.SUITES[name]
    if name == "gauge" and entry.potential is None:
        return None
    kwargs = _tol(cfg, {})
    return fn(entry, icfg, **kwargs)


def cmd_laws(cfg: RunConfig) -> int:
    icfg = cfg.integrator.build()
    if cfg.mock is not None:
        rep = _mock_report(cfg, icfg)
        reports = [rep]
    else:
        entries = [_entry(cfg)] if cfg.entry is not None else catalog.all_entries()
        reports = []
        for e in entries:
            for name in cfg.suites:
                r = _suite_report(name, e, cfg, icfg)
                if r is not None:
                    reports.append(r)
    return _finish(reports, cfg, "laws")


def _finish(reports: list[LawReport], cfg: RunConfig, name: str) -> int:
    rep = merge(name, reports)
    if cfg.format == "csv":
        _emit(to_csv([rep]), cfg)
    else:
        doc = rep.to_dict()
        doc["suites"] = [r.name for r in reports]
        _emit(dumps(doc), cfg)
    _report_failures(rep)
    return EXIT_OK if rep.passed else EXIT_LAW


def cmd_roundtrip(cfg: RunConfig) -> int:
    icfg = cfg.integrator.build()
    entry = _entry(cfg, required=False)
    kwargs = _tol(cfg, {})
    reports = [suites.roundtrip_suite(entry, icfg, **kwargs), suites.reconstruction_suite(entry, icfg, **kwargs)]
    return _finish(reports, cfg, "roundtrip")


def cmd_convergence(cfg: RunConfig) -> int:
    entries = [_entry(cfg)] if cfg.entry is not None else catalog.all_entries()
    rep, studies = suites.convergence_suite(entries, cfg.steps_list, **({"tol": cfg.tol} if cfg.tol else {}))
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("entry", "path", "steps", "residual"))
        for st in studies:
            for n, r in zip(st.steps, st.residuals):
                w.writerow((st.entry, st.path, n, format(r, ".17g")))
        _emit(buf.getvalue(), cfg)
    else:
        doc = {"schema_version": SCHEMA_VERSION, "command": "convergence",
               "studies": [st.to_dict() for st in studies], "report": rep.to_dict()}
        _emit(dumps(doc), cfg)
    _report_failures(rep)
    return EXIT_OK if rep.passed else EXIT_LAW


COMMAND_FUNCS = {
    "transport": cmd_transport,
    "wilson": cmd_wilson,
    "laws": cmd_laws,
    "roundtrip": cmd_roundtrip,
    "convergence": cmd_convergence,
}
assert set(COMMAND_FUNCS) == set(COMMANDS)


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration and return the exit code."""
    try:
        return COMMAND_FUNCS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TransportError, ValidationError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
