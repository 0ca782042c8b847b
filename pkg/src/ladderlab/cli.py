"""Command-line front end: builds, ladders, verification, plot scripts.

Every run is driven by a RunConfig assembled from (in order of
precedence) command-line flags, a flat key=value config file, and the
built-in defaults.  All commands are deterministic for a fixed config:
evaluation order is fixed, randomized checks use a constant seed, and
rerunning a command rewrites byte-identical data files.

Exit codes: 0 success, 1 verification assertion failed, 2 usage or
config error, 3 I/O or state error.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib
import sys
from dataclasses import dataclass, fields
from typing import Dict, Optional

import numpy as np

from . import asymptotics, ladder, quadrature, zeta
from .constants import default_constants
from .errors import (BracketError, DomainError, LadderlabError,
                     PreconditionError, RangeError, StateError)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    """Flat run parameters; every key may come from file or flag."""

    t_max: float = quadrature.DEFAULT_TABLE_T_MAX
    y0: float = ladder.DEFAULT_Y0
    mu_family: str = "k_log"
    mu_k: float = ladder.DEFAULT_K
    mu_rho: float = 0.0
    mu_n: float = 1.0
    rel_tol: float = quadrature.REL_TOL
    abs_tol: float = 1e-10
    tol_eq: float = ladder.TOL_EQ_SCALE
    tol_inv: float = ladder.TOL_INV_SCALE
    t_grid_start: float = 60.0
    t_grid_stop: float = 1e4
    t_grid_count: int = 40
    y_grid_start: float = 200.0
    y_grid_stop: float = 2e4
    y_grid_count: int = 40
    out: str = "."
    format: str = "csv"

    def validate(self) -> None:
        for name in ("rel_tol", "abs_tol", "tol_eq", "tol_inv"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        for pre in ("t_grid", "y_grid"):
            start = getattr(self, pre + "_start")
            stop = getattr(self, pre + "_stop")
            count = getattr(self, pre + "_count")
            if not (0 < start < stop) or count < 2:
                raise PreconditionError(
                    f"{pre} needs 0 < start < stop and count >= 2")
        if self.mu_family not in ("k_log", "beam"):
            raise PreconditionError(
                f"mu_family must be k_log or beam, got {self.mu_family!r}")
        if self.format not in ("csv", "json"):
            raise PreconditionError("format must be csv or json")

    def require_grid_cover(self) -> None:
        # only meaningful for commands that consume the T grid
        if self.t_max < self.t_grid_stop:
            raise PreconditionError("t_max must cover the T grid")

    def mu(self) -> ladder.MuSpec:
        if self.mu_family == "k_log":
            return ladder.MuSpec.k_log(self.mu_k, y0=self.y0)
        return ladder.MuSpec.beam(self.mu_rho, self.mu_n, y0=self.y0)

    def t_grid(self) -> np.ndarray:
        return np.geomspace(self.t_grid_start, self.t_grid_stop,
                            self.t_grid_count)

    def y_grid(self) -> np.ndarray:
        return np.geomspace(self.y_grid_start, self.y_grid_stop,
                            self.y_grid_count)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key: str, raw: str):
    t = _FIELD_TYPES[key]
    if t in ("float", float):
        return float(raw)
    if t in ("int", int):
        return int(raw)
    return raw


def load_config_file(path) -> Dict[str, object]:
    """Flat key=value file; '#' starts a comment, blank lines skipped."""
    out: Dict[str, object] = {}
    text = pathlib.Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise PreconditionError(
                f"{path}:{lineno}: expected key=value, got {body!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise PreconditionError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _parse_value(key, raw)
        except ValueError:
            raise PreconditionError(
                f"{path}:{lineno}: bad value for {key}: {raw!r}")
    return out


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in _FIELD_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "out", None):
        values["out"] = args.out
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# shared plumbing

def _out_dir(cfg: RunConfig) -> pathlib.Path:
    path = pathlib.Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(args, payload: dict, text_lines) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _checkpoints(cfg: RunConfig, path: Optional[str]
                 ) -> quadrature.CumulativeTable:
    if path:
        return quadrature.load_checkpoints_csv(path)
    if (cfg.t_max == quadrature.DEFAULT_TABLE_T_MAX
            and cfg.rel_tol == quadrature.REL_TOL):
        return quadrature.default_checkpoints()
    return quadrature.build_checkpoints(cfg.t_max, rel_tol=cfg.rel_tol)


def _ladder_prereqs(cfg: RunConfig, args):
    cfg.require_grid_cover()
    table = _checkpoints(cfg, getattr(args, "checkpoints", None))
    engine = quadrature.default_engine()
    model = quadrature.phi_model(engine)
    return table, engine, model


# ---------------------------------------------------------------------------
# commands

def cmd_checkpoints(cfg: RunConfig, args) -> int:
    table = quadrature.build_checkpoints(cfg.t_max, rel_tol=cfg.rel_tol)
    path = pathlib.Path(args.output) if args.output \
        else _out_dir(cfg) / "checkpoints.csv"
    quadrature.save_checkpoints_csv(table, path)
    _emit(args, {"path": str(path), "knots": int(table.knots.shape[0]),
                 "t_max": table.t_max, "I_t_max": float(table.knots[-1, 1])},
          [f"wrote {path} ({table.knots.shape[0]} knots, "
           f"I({_fmt(table.t_max)}) = {_fmt(table.knots[-1, 1])})"])
    return EXIT_OK


def cmd_zeros(cfg: RunConfig, args) -> int:
    records = zeta.find_zeros(args.t_lo, args.t_hi)
    path = pathlib.Path(args.output) if args.output \
        else _out_dir(cfg) / "zeros.csv"
    with path.open("w") as fh:
        fh.write("index,gamma,bracket_width,z_residual\n")
        for r in records:
            fh.write(f"{r.index},{_fmt(r.gamma)},{_fmt(r.bracket_width)},"
                     f"{_fmt(r.z_residual)}\n")
    tangential = sum(1 for r in records if r.tangential)
    _emit(args, {"path": str(path), "count": len(records),
                 "tangential": tangential},
          [f"wrote {path} ({len(records)} zeros, {tangential} tangential)"])
    return EXIT_OK


def cmd_ladder(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    mu = cfg.mu()
    t0 = ladder.solve_M(mu.y0, mu, table, engine)
    grid = cfg.t_grid()
    keep = grid >= t0
    if not np.all(keep):
        print(f"warning: omitted {int((~keep).sum())} grid rows below "
              f"T0 = {_fmt(t0)}", file=sys.stderr)
        grid = grid[keep]
    if grid.size < 2:
        raise PreconditionError(
            f"T grid has fewer than 2 points at or above T0 = {_fmt(t0)}")
    lt = ladder.build_ladder(mu, table, T_grid=grid, engine=engine,
                             model=model)
    path = pathlib.Path(args.output) if args.output \
        else _out_dir(cfg) / "ladder.csv"
    ladder.save_ladder_csv(lt, path)
    # normalize by I(T), which equals the weighted integral to within
    # the residual itself
    scale = np.maximum(1.0, [quadrature.hl_integral(float(t), table)
                             for t in lt.Ts])
    worst = float(np.max(lt.residuals / scale))
    payload = {"path": str(path), "rows": int(lt.points.shape[0]),
               "T0": lt.T0, "threshold_1_9": lt.threshold_1_9,
               "worst_relative_residual": worst}
    _emit(args, payload,
          [f"wrote {path} ({lt.points.shape[0]} rows, T0 = {_fmt(lt.T0)}, "
           f"worst relative residual = {_fmt(worst)})"])
    if worst > cfg.tol_eq:
        print(f"residuals exceed tol_eq = {_fmt(cfg.tol_eq)}",
              file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_ladder_gap(cfg: RunConfig, args) -> int:
    a = ladder.load_ladder_csv(args.file_a)
    b = ladder.load_ladder_csv(args.file_b)
    if a.shape[0] != b.shape[0] \
            or not np.allclose(a[:, 0], b[:, 0], rtol=1e-12, atol=0.0):
        raise PreconditionError(
            "ladder files must share the same T grid to be compared")
    gap = np.abs(a[:, 1] - b[:, 1])
    prod = gap * a[:, 0]
    payload = {"rows": int(a.shape[0]),
               "max_abs_gap": float(gap.max()),
               "max_gap_times_T": float(prod.max()),
               "gap_times_T": prod.tolist()}
    _emit(args, payload,
          [f"{a.shape[0]} shared T points",
           f"max |phi_a - phi_b|      = {_fmt(gap.max())}",
           f"max |phi_a - phi_b| * T  = {_fmt(prod.max())}"])
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    report = asymptotics.verification_report(
        args.suite, table=table, engine=engine, model=model)
    path = _out_dir(cfg) / f"report-{args.suite}.json"
    path.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    lines = [f"wrote {path}"]
    for name, sec in report["sections"].items():
        lines.append(f"  {name:<12} {'PASS' if sec['pass'] else 'FAIL'}")
    lines.append(f"suite {args.suite}: "
                 f"{'PASS' if report['pass'] else 'FAIL'}")
    _emit(args, report, lines)
    return EXIT_OK if report["pass"] else EXIT_ASSERTION


def cmd_coeffs(cfg: RunConfig, args) -> int:
    if args.n < 1:
        raise PreconditionError("--n must be >= 1")
    k = default_constants()
    a = asymptotics.expansion_A(args.n)
    b = asymptotics.expansion_B(args.n, k)
    payload = {"n": args.n,
               "A": [a.entry_str(j) for j in range(1, args.n + 1)],
               "B": [b.entry_str(j) for j in range(1, args.n + 1)]}
    lines = [f"A_{j} = {payload['A'][j - 1]}" for j in range(1, args.n + 1)]
    lines += [f"B_{j} = {payload['B'][j - 1]}" for j in range(1, args.n + 1)]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_pi_compare(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    k = default_constants()
    mu = cfg.mu()
    rows = []
    for T in (1e3, 3e3, 1e4):
        y = ladder.phi_fast(T, mu, table, model)
        approx = asymptotics.pi_approx(T, y, k)
        exact = asymptotics.sieve_pi(T)
        rows.append({"T": T, "sieve": exact, "approx": approx,
                     "rel_err": abs(approx - exact) / exact})
    path = _out_dir(cfg) / "primes.csv"
    with path.open("w") as fh:
        fh.write("T,sieve,approx,rel_err\n")
        for r in rows:
            fh.write(f"{_fmt(r['T'])},{r['sieve']},{_fmt(r['approx'])},"
                     f"{_fmt(r['rel_err'])}\n")
    _emit(args, {"path": str(path), "rows": rows},
          [f"wrote {path}"] + [
              f"T = {r['T']:>7g}  sieve = {r['sieve']:>5d}  "
              f"approx = {r['approx']:10.3f}  rel err = {r['rel_err']:.4f}"
              for r in rows])
    return EXIT_OK


def cmd_tangent(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    k = default_constants()
    mu = cfg.mu()
    lt = ladder.build_ladder(mu, table, engine=engine, model=model)
    slope = asymptotics.tangent_alpha(args.T, args.U, lt, table, model, k)
    residual = asymptotics.tangent_law_residual(args.T, args.U, lt, table,
                                                k, model)
    y1 = ladder.phi_fast(args.T, mu, table, model)
    main = args.U * (math.log(0.5 * y1) - k.a) * slope
    payload = {"T": args.T, "U": args.U, "tan_alpha": slope,
               "alpha": math.atan(slope), "main_term": main,
               "residual": residual,
               "residual_over_main": residual / main}
    _emit(args, payload,
          [f"tan(alpha)        = {_fmt(slope)}",
           f"main term         = {_fmt(main)}",
           f"residual          = {_fmt(residual)}",
           f"residual / main   = {_fmt(residual / main)}"])
    return EXIT_OK


def cmd_beam(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    report = ladder.beam_experiment(
        [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)],
        y_grid=np.linspace(150.0, 400.0, 6),
        T_grid=np.array([500.0, 1000.0, 2000.0, 4000.0]),
        table=table, engine=engine, y0=cfg.y0, model=model)
    path = _out_dir(cfg) / "beam.json"
    path.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    _emit(args, report,
          [f"wrote {path}",
           f"members: {', '.join(report['members'])}",
           f"spread * T: {[float(v) for v in report['spread_times_T']]}"])
    return EXIT_OK


def cmd_c0_fit(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    lt = ladder.build_ladder(cfg.mu(), table, T_grid=cfg.t_grid(),
                             engine=engine, model=model)
    c0, unc = asymptotics.estimate_c0(lt, table)
    path = _out_dir(cfg) / "c0.json"
    path.write_text(json.dumps({"c0": c0, "uncertainty": unc},
                               sort_keys=True) + "\n")
    _emit(args, {"path": str(path), "c0": c0, "uncertainty": unc},
          [f"c0 = {_fmt(c0)} +- {_fmt(unc)}", f"wrote {path}"])
    return EXIT_OK


_GNUPLOT_HEADER = "set datafile separator ','\nset key left top\n"


def cmd_plot_scripts(cfg: RunConfig, args) -> int:
    table, engine, model = _ladder_prereqs(cfg, args)
    out = _out_dir(cfg)
    k = default_constants()
    mu = cfg.mu()
    lt = ladder.build_ladder(mu, table, T_grid=cfg.t_grid(), engine=engine,
                             model=model)
    c0, unc = asymptotics.estimate_c0(lt, table)
    kc = k.with_c0(c0, unc)

    with (out / "envelope.csv").open("w") as fh:
        fh.write("T,phi,lower,upper\n")
        for t, y, _ in lt.points:
            fh.write(f"{_fmt(t)},{_fmt(y)},{_fmt(1.9 * t)},{_fmt(2 * t)}\n")
    (out / "plot_envelope.gnuplot").write_text(
        _GNUPLOT_HEADER
        + "plot 'envelope.csv' using 1:2 with lines title 'phi(T)', \\\n"
          "     'envelope.csv' using 1:3 with lines title '1.9T', \\\n"
          "     'envelope.csv' using 1:4 with lines title '2T'\n")

    rs = np.array([abs(asymptotics.remainder(float(t), lt, table, kc,
                                             model)) for t in lt.Ts])
    fit_c = float(np.max(rs * lt.phis / np.log(lt.phis)))
    with (out / "remainder.csv").open("w") as fh:
        fh.write("T,abs_remainder,fitted_envelope\n")
        for t, y, r in zip(lt.Ts, lt.phis, rs):
            fh.write(f"{_fmt(t)},{_fmt(r)},"
                     f"{_fmt(fit_c * math.log(y) / y)}\n")
    (out / "plot_remainder.gnuplot").write_text(
        _GNUPLOT_HEADER + "set logscale xy\n"
        + "plot 'remainder.csv' using 1:2 with points title '|I - F(phi)|',"
          " \\\n     'remainder.csv' using 1:3 with lines "
          "title 'fitted C ln(phi)/phi'\n")

    beam = ladder.beam_experiment(
        [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)],
        y_grid=np.linspace(150.0, 400.0, 6),
        T_grid=np.array([500.0, 1000.0, 2000.0, 4000.0]),
        table=table, engine=engine, y0=cfg.y0, model=model)
    with (out / "beam_spread.csv").open("w") as fh:
        fh.write("T,spread,spread_times_T\n")
        for t, s, p in zip(beam["T_grid"], beam["spread"],
                           beam["spread_times_T"]):
            fh.write(f"{_fmt(t)},{_fmt(s)},{_fmt(p)}\n")
    (out / "plot_beam.gnuplot").write_text(
        _GNUPLOT_HEADER
        + "plot 'beam_spread.csv' using 1:2 with linespoints "
          "title 'output beam spread'\n")

    with (out / "primes.csv").open("w") as fh:
        fh.write("T,sieve,approx,rel_err\n")
        for T in (1e3, 3e3, 1e4):
            y = ladder.phi_fast(T, mu, table, model)
            approx = asymptotics.pi_approx(T, y, k)
            exact = asymptotics.sieve_pi(T)
            fh.write(f"{_fmt(T)},{exact},{_fmt(approx)},"
                     f"{_fmt(abs(approx - exact) / exact)}\n")
    (out / "plot_primes.gnuplot").write_text(
        _GNUPLOT_HEADER
        + "plot 'primes.csv' using 1:2 with points title 'sieve', \\\n"
          "     'primes.csv' using 1:3 with linespoints title 'ladder'\n")

    names = ["envelope.csv", "plot_envelope.gnuplot", "remainder.csv",
             "plot_remainder.gnuplot", "beam_spread.csv",
             "plot_beam.gnuplot", "primes.csv", "plot_primes.gnuplot"]
    _emit(args, {"out": str(out), "files": names},
          [f"wrote {out / n}" for n in names])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _add_shared_flags(p: argparse.ArgumentParser, top_level: bool) -> None:
    # accepted both before and after the subcommand; SUPPRESS keeps an
    # absent subcommand flag from clobbering the pre-subcommand value
    default = None if top_level else argparse.SUPPRESS
    p.add_argument("--config", default=default,
                   help="flat key=value config file")
    p.add_argument("--out", default=default, help="output directory")
    p.add_argument("--json", action="store_true",
                   default=False if top_level else argparse.SUPPRESS,
                   help="print the summary as JSON")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    _add_shared_flags(p, top_level=False)
    for key, t in _FIELD_TYPES.items():
        if key in ("out",):
            continue
        flag = "--" + key.replace("_", "-")
        if t in ("float", float):
            p.add_argument(flag, dest=key, type=float, default=None)
        elif t in ("int", int):
            p.add_argument(flag, dest=key, type=int, default=None)
        else:
            p.add_argument(flag, dest=key, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ladderlab",
        description="Numerical laboratory for Z^2-transformation ladders")
    _add_shared_flags(parser, top_level=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_config_flags(p)
        p.set_defaults(fn=fn)
        return p

    p = add("checkpoints", cmd_checkpoints,
            "build the cumulative integral table and write CSV + manifest")
    p.add_argument("-o", "--output", help="checkpoint CSV path")

    p = add("zeros", cmd_zeros, "find zeros of Z and export them as CSV")
    p.add_argument("--t-lo", dest="t_lo", type=float, default=0.0)
    p.add_argument("--t-hi", dest="t_hi", type=float, default=100.0)
    p.add_argument("-o", "--output", help="zeros CSV path")

    p = add("ladder", cmd_ladder, "solve the ladder on the T grid")
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")
    p.add_argument("-o", "--output", help="ladder CSV path")

    p = add("ladder-gap", cmd_ladder_gap,
            "compare two ladder CSVs sharing one T grid")
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = add("verify", cmd_verify, "run a verification suite")
    p.add_argument("suite", choices=list(asymptotics._SUITES))
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")

    p = add("coeffs", cmd_coeffs, "print exact series coefficients")
    p.add_argument("--n", type=int, required=True)

    p = add("pi-compare", cmd_pi_compare,
            "compare the prime-count proxy against a sieve")
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")

    p = add("tangent", cmd_tangent, "evaluate the chord law at (T, U)")
    p.add_argument("--T", dest="T", type=float, required=True)
    p.add_argument("--U", dest="U", type=float, required=True)
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")

    p = add("beam", cmd_beam, "run the diverging-beam experiment")
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")

    p = add("c0-fit", cmd_c0_fit, "fit the additive constant c0")
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")

    p = add("plot-scripts", cmd_plot_scripts,
            "emit plot data CSVs and gnuplot scripts")
    p.add_argument("--checkpoints", help="existing checkpoint CSV to load")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_run_config(args)
        return args.fn(cfg, args)
    except (DomainError, PreconditionError, RangeError,
            BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LadderlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
