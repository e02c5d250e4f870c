"""Command-line entry point: ``python -m levinapprox <command> ...``.

Exit status is 0 on success, 2 when a checked property fails and 1 on
structural errors (bad input, unsolvable map, malformed files).

Examples
--------
  python -m levinapprox validate --set example1:-3,3
  python -m levinapprox solve-map --set single:-1,1 --out single.map
  python -m levinapprox rho --map single.map --x1 -1 --x2 1
  python -m levinapprox approx --set gapfree:-3,3 --fn abs-pow:x0=0,alpha=0.5 \\
      --method kernel --sigmas 4,8,16,32
  python -m levinapprox --seed 7 --out results rates --fn tau-pow:x0=0,alpha=0.3
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .bandlimited import ConditioningError
from .functions import parse_function
from .levinmap import LevinMap, SolverError, solve_parameters
from .realset import validate_geometry
from .taumetric import PairPool, euclidean, omega_star, tau

log = logging.getLogger("levinapprox")


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors are structural errors: exit status 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text):
    return ex._parse_floats(text)


def _emit(args, name, text):
    """Write ``text`` to ``<out>/<name>`` when ``--out`` is set, else stdout."""
    if args.out:
        path = Path(args.out) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _csv_text(kind, columns, rows, meta=()):
    lines = [f"# levinapprox {kind} v{ex.CSV_VERSION}", *(f"# {m}" for m in meta), ",".join(columns)]
    lines += [",".join(ex._fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _config(args):
    cfg = ex.ExperimentConfig.read(args.config) if args.config else ex.ExperimentConfig()
    over = {k: getattr(args, k, None) for k in
            ("set", "c_tilde", "order", "seed", "pairs", "fn", "sigmas", "gap", "out")}
    if over["sigmas"] is not None:
        over["sigmas"] = _floats(over["sigmas"])
    if getattr(args, "no_kernel", False):
        over["kernel"] = False
    return cfg.updated(**over)


def _set(args):
    cfg = _config(args)
    return cfg, cfg.build_set()


def _report_checks(checks):
    for c in checks:
        print(c.line())
    if not all(c.passed for c in checks):
        raise CheckFailed(", ".join(c.name for c in checks if not c.passed))


# -- commands ---------------------------------------------------------------

def cmd_validate(args):
    _, E = _set(args)
    report = validate_geometry(E, args.threshold_c1, args.threshold_c2)
    print(f"n_gaps={E.n_gaps}")
    print("\n".join(report.as_lines()))
    if not report.valid:
        raise CheckFailed("geometry thresholds violated")


def cmd_solve_map(args):
    cfg, E = _set(args)
    lmap = solve_parameters(E, order=cfg.order)
    target = args.map_out or (Path(args.out) / "map.txt" if args.out else None)
    if target:
        lmap.write(target)
        print(f"wrote {target}")
    for j, (c, u, v) in enumerate(zip(lmap.tips, lmap.bases, lmap.heights)):
        print(f"gap {j}: c={float(c)!r} u={float(u)!r} v={float(v)!r} "
              f"residual={lmap.residuals[j]:.3e}")
    print(f"scale={float(lmap.scale)!r} offset={float(lmap.offset)!r}")


def cmd_tau(args):
    cfg, E = _set(args)
    if args.c is not None:
        E = E.with_c_tilde(args.c)
    print(repr(float(tau(E, args.x1, args.x2))))


def _load_map(args, cfg):
    if args.map:
        return LevinMap.read(args.map)
    return solve_parameters(cfg.build_set(), order=cfg.order)


def cmd_rho(args):
    cfg = _config(args)
    lmap = _load_map(args, cfg)
    print(repr(float(lmap.rho(args.x1, args.x2))))


def cmd_omega_star(args):
    cfg, E = _set(args)
    lmap = solve_parameters(E, order=cfg.order) if (args.dist == "rho" or "rho-pow" in cfg.fn) else None
    f = parse_function(cfg.fn, E, lmap)
    deltas = np.sort(_floats(args.deltas))
    focus = [float(f.params["x0"])] if "x0" in f.params else []
    pool = PairPool(E, n_bulk=cfg.n_bulk, m_max=cfg.m_max, focus=focus, focus_scale=0.25)
    metric = {"rho": lambda a, b: lmap.rho(a, b), "tau": lambda a, b: tau(E, a, b),
              "euclidean": euclidean}[args.dist]
    values = omega_star(f, metric, deltas, pool)
    meta = [f"set={cfg.set}", f"fn={f.label}", f"dist={args.dist}", f"pairs={pool.n_pairs}"]
    _emit(args, "omega_star.csv", _csv_text("omega-star", ("delta", "omega_star"),
                                            zip(deltas, values), meta))


def cmd_approx(args):
    cfg, E = _set(args)
    lmap = solve_parameters(E, order=cfg.order) if "rho-pow" in cfg.fn else None
    f = parse_function(cfg.fn, E, lmap)
    report = ex.measure_rates(f, E, np.asarray(cfg.sigmas, float), args.method)
    meta = [f"set={cfg.set}", f"fn={f.label}", f"type_factor={report.type_factor:g}"]
    if not np.isnan(report.slope):
        meta.append(f"slope={report.slope:.6g} intercept={report.intercept:.6g} "
                    f"residual={report.residual:.3g}")
    _emit(args, f"approx_{args.method}.csv",
          _csv_text("approx", ("sigma", "error", "method"), report.rows(), meta))


def cmd_theorem1(args):
    cfg = _config(args)
    report = ex.run_theorem1(cfg)
    print("\n".join(report.provenance + report.summary_lines()))
    if args.out:
        print(f"wrote {report.write(Path(args.out) / 'theorem1.csv')}")
    _report_checks(report.checks())


def cmd_lemma36(args):
    cfg = _config(args)
    report = ex.run_lemma36(cfg)
    for r in report.regimes:
        print(f"regime {r.regime} x={r.x:.6g} slope={r.slope:.6f} level={r.level:.6g}")
    for n in report.notices:
        print(f"notice: {n}")
    if args.out:
        print(f"wrote {report.write(Path(args.out) / 'lemma36.csv')}")
    _report_checks(report.checks())


def cmd_rates(args):
    cfg = _config(args)
    result = ex.run_rates(cfg)
    print("\n".join(result.summary_lines()))
    if args.out:
        for p in result.write(args.out):
            print(f"wrote {p}")
    _report_checks(result.checks())


# -- parser -------------------------------------------------------------------

def _add_global(p, suppress):
    d = argparse.SUPPRESS
    p.add_argument("--config", default=d if suppress else None, help="key=value config file")
    p.add_argument("--seed", type=int, default=d if suppress else None)
    if p.prog.split()[-1] != "solve-map":
        p.add_argument("--out", default=d if suppress else None, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", default=d if suppress else False)


def build_parser():
    parser = _Parser(prog="levinapprox", description=__doc__.splitlines()[0])
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_global(p, suppress=True)
        p.set_defaults(func=func)
        return p

    def with_set(p, required=False):
        p.add_argument("--set", required=required, help="set file or generator (default four-gap or the config value)")
        p.add_argument("--c-tilde", dest="c_tilde", type=float)
        p.add_argument("--order", type=int)
        return p

    p = with_set(command("validate", cmd_validate, "print the geometry report"))
    p.add_argument("--threshold-c1", type=float, default=10.0)
    p.add_argument("--threshold-c2", type=float, default=10.0)

    p = with_set(command("solve-map", cmd_solve_map, "solve the slit map and write a map file"))
    p.add_argument("--out", dest="map_out", help="map file")

    p = with_set(command("tau", cmd_tau, "explicit distance between two points"))
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)
    p.add_argument("--c", type=float, help="override c_tilde")

    p = with_set(command("rho", cmd_rho, "conformal distance between two points"), required=False)
    p.add_argument("--map", help="map file from solve-map")
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)

    p = with_set(command("omega-star", cmd_omega_star, "sampled modulus of continuity"))
    p.add_argument("--fn", required=True)
    p.add_argument("--dist", choices=("tau", "rho", "euclidean"), default="rho")
    p.add_argument("--deltas", required=True, help="comma-separated list")

    p = with_set(command("approx", cmd_approx, "approximation errors over a sigma sweep"))
    p.add_argument("--fn", required=True)
    p.add_argument("--method", choices=("kernel", "minimax"), default="minimax")
    p.add_argument("--sigmas", default="4,8,16,32,64,128")

    p = with_set(command("theorem1", cmd_theorem1, "rho / tau bracket over stratified pairs"),
                 required=False)
    p.add_argument("--pairs", type=int)

    p = with_set(command("lemma36", cmd_lemma36, "vertical displacement regimes"), required=False)
    p.add_argument("--gap", type=int)

    p = with_set(command("rates", cmd_rates, "A_sigma and omega* exponents, bound checks"),
                 required=False)
    p.add_argument("--fn")
    p.add_argument("--sigmas")
    p.add_argument("--no-kernel", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "map"):
        args.map = None
    if not hasattr(args, "map_out"):
        args.map_out = None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError, SolverError, ConditioningError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
