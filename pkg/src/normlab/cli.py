"""Command-line interface: norms, operator norms, pseudospectrum scans,
and the verification suite.

Exit codes: 0 ok, 1 usage error, 2 solver gap, 3 I/O failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from .coeffs import Coeffs
from . import spaces as sp
from . import operators as op
from . import opnorm
from . import pseudospectrum as ps
from . import convex
from . import verify

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER_GAP = 2
EXIT_IO = 3
EXIT_VERIFY = 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    space: sp.SpaceSpec | None = None
    operator: op.OperatorSpec | None = None
    vector: Coeffs | None = None
    z: complex = 0.0
    eps: float = 0.5
    trunc: int = 30
    grid: tuple = (-3.0, 3.0, -3.0, 3.0)
    res: int = 61
    tol: float = 1e-8
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    only: tuple = ()


class UsageError(Exception):
    pass


def _parse_json(text, label):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise UsageError("malformed %s JSON: %s" % (label, exc))


def _parse_complex(text) -> complex:
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise UsageError("bad complex number %r: %s" % (text, exc))


def _build_config(args) -> RunConfig:
    space = operator = vector = None
    if args.space:
        space = sp.space_from_json_obj(_parse_json(args.space, "--space"))
    if getattr(args, "operator", None):
        operator = op.operator_from_json_obj(
            _parse_json(args.operator, "--operator"))
    if getattr(args, "vector", None):
        vector = Coeffs.from_json_obj(_parse_json(args.vector, "--vector"))
    grid = (-3.0, 3.0, -3.0, 3.0)
    if getattr(args, "grid", None):
        parts = args.grid.split(",")
        if len(parts) != 4:
            raise UsageError("--grid needs re0,re1,im0,im1")
        grid = tuple(float(v) for v in parts)
    only = tuple(s for s in (getattr(args, "only", "") or "").split(",") if s)
    return RunConfig(
        command=args.command, space=space, operator=operator, vector=vector,
        z=_parse_complex(getattr(args, "z", "0") or "0"),
        eps=getattr(args, "eps", 0.5), trunc=getattr(args, "trunc", 30),
        grid=grid, res=getattr(args, "res", 61),
        tol=getattr(args, "tol", 1e-8), seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None), fmt=getattr(args, "format", "csv"),
        only=only)


def _write_out(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError("cannot write %s: %s" % (path, exc))


def _emit(cfg: RunConfig, text: str, stdout) -> None:
    if cfg.out:
        _write_out(cfg.out, text)
    else:
        stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_norm(cfg: RunConfig, stdout) -> int:
    if cfg.space is None or cfg.vector is None:
        raise UsageError("norm needs --space and --vector")
    if isinstance(cfg.space, sp.RenormedL2):
        trunc = cfg.trunc if cfg.trunc else cfg.space.trunc
        value, d = convex.minkowski_norm(cfg.vector, trunc, cfg.tol)
        payload = {"schema_version": SCHEMA_VERSION, "value": value,
                   "decomposition": d.to_json_obj()}
        if cfg.fmt == "json":
            _emit(cfg, json.dumps(payload, sort_keys=True), stdout)
        else:
            _emit(cfg, "%.6f" % value, stdout)
        if not d.converged:
            stdout.write("solver gap %.3g above tolerance\n" % d.gap)
            return EXIT_SOLVER_GAP
        return EXIT_OK
    value = sp.norm_eval(cfg.space, cfg.vector)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps({"schema_version": SCHEMA_VERSION,
                               "value": value}, sort_keys=True), stdout)
    else:
        _emit(cfg, "%.6f" % value, stdout)
    return EXIT_OK


def cmd_opnorm(cfg: RunConfig, stdout) -> int:
    if cfg.space is None or cfg.operator is None:
        raise UsageError("opnorm needs --space and --operator")
    cfgo = opnorm.OpnormConfig(seed=cfg.seed)
    report = opnorm.operator_norm(cfg.operator, cfg.space, cfg.space,
                                  cfg.trunc, cfgo)
    if cfg.fmt == "json":
        payload = {"schema_version": SCHEMA_VERSION}
        payload.update(report.to_json_obj())
        _emit(cfg, json.dumps(payload, sort_keys=True), stdout)
    else:
        _emit(cfg, "%.10f method=%s attainment=%s"
              % (report.value, report.method, report.attainment), stdout)
    return EXIT_OK


def cmd_pspec(cfg: RunConfig, stdout) -> int:
    if cfg.space is None or cfg.operator is None:
        raise UsageError("pspec needs --space and --operator")
    if cfg.res < 2:
        raise UsageError("--res must be at least 2 per axis")
    cfgo = opnorm.OpnormConfig(seed=cfg.seed)
    grid = ps.grid_scan(cfg.operator, cfg.space, cfg.grid, cfg.res,
                        cfg.eps, cfg.trunc, cfgo)
    text = (json.dumps(grid.to_json_obj(), sort_keys=True)
            if cfg.fmt == "json" else grid.to_csv())
    if cfg.out:
        _write_out(cfg.out, text)
    else:
        stdout.write(text)
    counts = {"strict": 0, "level": 0, "outside": 0}
    for _, _, c in grid.cells():
        counts[c] += 1
    stdout.write("strict=%d level=%d outside=%d radius=%.6f\n"
                 % (counts["strict"], counts["level"], counts["outside"],
                    ps.strict_radius(grid)))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stdout) -> int:
    try:
        results = verify.run_checks(cfg.only or None)
    except KeyError as exc:
        raise UsageError(str(exc))
    for r in results:
        stdout.write("%s: %s\n" % (r.check_id, "PASS" if r.ok else "FAIL"))
    report = {"schema_version": SCHEMA_VERSION,
              "results": [r.to_json_obj() for r in results],
              "all_ok": all(r.ok for r in results)}
    if cfg.out:
        _write_out(cfg.out, json.dumps(report, sort_keys=True))
    elif cfg.fmt == "json":
        stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return EXIT_OK if report["all_ok"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normlab",
        description="sequence-space norms, operator norms, pseudospectra")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, operator=True, vector=False):
        p.add_argument("--space", help="space spec JSON")
        if operator:
            p.add_argument("--operator", help="operator spec JSON")
        if vector:
            p.add_argument("--vector", help="coefficient JSON [[i,re,im],…]")
        p.add_argument("--z", default="0", help="complex shift, e.g. 1+2j")
        p.add_argument("--eps", type=float, default=0.5)
        p.add_argument("--trunc", type=int, default=30)
        p.add_argument("--grid", help="re0,re1,im0,im1")
        p.add_argument("--res", type=int, default=61)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("norm", help="norm of a vector"),
           operator=False, vector=True)
    common(sub.add_parser("opnorm", help="operator norm on a truncation"))
    common(sub.add_parser("pspec", help="pseudospectrum grid scan"))
    pv = sub.add_parser("verify", help="run the acceptance checks")
    common(pv, operator=False)
    pv.add_argument("--only", help="comma-separated check ids, e.g. AC3")
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _build_config(args)
        handler = {"norm": cmd_norm, "opnorm": cmd_opnorm,
                   "pspec": cmd_pspec, "verify": cmd_verify}[cfg.command]
        return handler(cfg, stdout)
    except UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except IOError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
