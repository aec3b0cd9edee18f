"""
Command-line front end.

Commands: ``kernel-info``, ``ground-state``, ``verify``, ``propagate`` and
``sweep``.  Settings come from built-in defaults, then an optional flat
``key = value`` file given with ``--config``, then command-line flags; later
sources win.

Exit codes::

    0  success
    2  invalid configuration or arguments
    3  couplings not admissible
    4  no convergence, or a standing wave failed verification
    5  blow-up monitor tripped (partial output written)
    6  corrupt field file
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dynamics import DIAGNOSTIC_COLUMNS, BlowUpDetected, NonfiniteField, PropagationConfig, boost, split_step
from .fieldio import CorruptFieldFile, read_field, write_diagnostics_csv, write_field, write_plot_files
from .functionals import Couplings, admissible
from .grid import Field, make_grid
from .ground_state import (
    MaxItersExceeded,
    MinimizerConfig,
    NotAdmissible,
    aspect_ratio,
    solve_ground_state,
    verify_field,
)
from .kernel import DEFAULT_AXIS, SYMBOL_MAX, SYMBOL_MIN, apply, apply_via_poisson, build_kernel, kernel_bounds

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_NO_CONVERGENCE = 4
EXIT_BLOW_UP = 5
EXIT_CORRUPT = 6


class ConfigError(ValueError):
    pass


def _triple(cast):
    def parse(text):
        parts = [p for p in str(text).replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise ConfigError(f"expected three comma-separated values, got {text!r}")
        return tuple(cast(p) for p in parts)

    return parse


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    step: float

    def values(self):
        if self.step == 0:
            return [self.start]
        count = math.floor((self.stop - self.start) / self.step + 1e-9)
        if count < 0:
            raise ConfigError(f"empty range {self.start}:{self.stop}:{self.step}")
        return [self.start + k * self.step for k in range(count + 1)]


def _range(text):
    parts = str(text).split(":")
    if len(parts) == 1:
        x = float(parts[0])
        return Range(x, x, 0.0)
    if len(parts) != 3:
        raise ConfigError(f"range must be a:b:step, got {text!r}")
    a, b, s = (float(p) for p in parts)
    if s < 0 or (s == 0 and a != b):
        raise ConfigError(f"range step must be positive, got {text!r}")
    return Range(a, b, s)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {text!r}")
    return v


# key -> (parser, default)
KEYS = {
    "grid": (_triple(int), (64, 64, 64)),
    "box": (_triple(float), (16.0, 16.0, 16.0)),
    "lambda1": (float, -1.0),
    "lambda2": (float, 0.0),
    "axis": (_triple(float), DEFAULT_AXIS),
    "omega": (float, 1.0),
    "out": (str, None),
    "seed": (_seed, 0),
    "max_iters": (int, 50000),
    "tol_grad": (float, 1e-8),
    "tol_J": (float, 1e-10),
    "precondition_shift": (float, 1.0),
    "symmetrize_every": (int, 25),
    "widths": (_triple(float), None),
    "perturbation": (float, 0.0),
    "velocity": (_triple(float), None),
    "dt": (float, 1e-3),
    "steps": (int, 1000),
    "trap": (_bool, False),
    "snapshot_stride": (int, None),
    "diag_stride": (int, 1),
    "diag": (str, None),
    "lambda1_range": (_range, None),
    "lambda2_range": (_range, None),
    "solve": (_bool, False),
    "workers": (int, 1),
}


def parse_config_file(path):
    """Flat ``key = value`` pairs; ``#`` starts a comment; unknown keys are errors."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def _convert(key, value):
    parser = KEYS[key][0]
    try:
        return parser(value)
    except ConfigError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {value!r}") from None


def resolve(args):
    """Merge defaults, the config file and explicit flags into one dict."""
    cfg = {k: d for k, (_, d) in KEYS.items()}
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    for key in KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = _convert(key, val) if isinstance(val, str) else val
    return cfg


def _grid(cfg):
    try:
        return make_grid(cfg["grid"], cfg["box"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _couplings(cfg):
    try:
        return Couplings(cfg["lambda1"], cfg["lambda2"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _minimizer(cfg):
    try:
        return MinimizerConfig(
            max_iters=cfg["max_iters"],
            tol_J=cfg["tol_J"],
            tol_grad=cfg["tol_grad"],
            widths=cfg["widths"],
            symmetrize_every=cfg["symmetrize_every"],
            precondition_shift=cfg["precondition_shift"],
            seed=cfg["seed"],
            perturbation=cfg["perturbation"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _kernel(grid, axis):
    try:
        return build_kernel(grid, axis)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _probe_density(grid):
    x1, x2, x3 = grid.coords
    rho = np.exp(-(x1**2 + 2 * x2**2 + 0.5 * x3**2) / 2) + 0.5 * np.exp(-((x1 - 1) ** 2 + x2**2 + (x3 + 1) ** 2))
    return Field(grid, rho)


def cmd_kernel_info(cfg, out):
    grid = _grid(cfg)
    kernel = _kernel(grid, cfg["axis"])
    lo, hi = kernel_bounds(kernel)
    in_range = SYMBOL_MIN - 1e-12 <= lo and hi <= SYMBOL_MAX + 1e-12
    print(f"grid {grid.n}  box {grid.L}  axis {kernel.axis}", file=out)
    print(f"symbol max = {hi:.6f}   (8 pi/3 = {SYMBOL_MAX:.6f})", file=out)
    print(f"symbol min = {lo:.6f}  (-4 pi/3 = {SYMBOL_MIN:.6f})", file=out)
    print(f"range check [-4 pi/3, 8 pi/3]: {'ok' if in_range else 'VIOLATED'}", file=out)
    if kernel.is_canonical:
        rho = _probe_density(grid)
        a = apply(kernel, rho).values
        b = apply_via_poisson(rho).values
        res = float(np.linalg.norm(a - b) / np.linalg.norm(a))
        print(f"path equivalence residual (Fourier vs Poisson) = {res:.3e}", file=out)
    else:
        print("path equivalence residual: n/a (Poisson path needs the axis (0, 0, 1))", file=out)
    return EXIT_OK if in_range else EXIT_VALIDATION


def _headline(c):
    if c.lambda1 >= 0 and c.lambda2 != 0:
        return "standing wave with repulsive or vanishing contact term: existence is due solely to the dipolar interaction"
    if c.lambda2 == 0:
        return "standing wave of the cubic equation (no dipolar term)"
    return "standing wave with attractive contact and dipolar terms"


def _report_text(c, omega, axis, gs, report):
    lines = [
        _headline(c),
        f"couplings lambda1 = {c.lambda1:g}, lambda2 = {c.lambda2:g}; omega = {omega:g}; axis = {tuple(axis)}",
    ]
    if gs is not None:
        lines.append(f"j = {gs.j:.12g}   C* = {gs.C_star:.12g}   aspect ratio = {aspect_ratio(gs.u, axis):.6f}")
    lines.append(f"E = {report.energy:.12g}   T = {report.kinetic:.12g}")
    lines.append(report.summary())
    lines.append("verification: " + ("PASSED" if report.passed else "FAILED"))
    return "\n".join(lines)


def _write_trace(path, trace):
    with open(path, "w") as fh:
        fh.write("iteration,J,grad_norm,step\n")
        # row 0 is the initial guess
        for i, (J, gn, st) in enumerate(zip(trace["J"], trace["grad_norm"], trace["step"])):
            fh.write(f"{i},{float(J)!r},{float(gn)!r},{float(st)!r}\n")


def cmd_ground_state(cfg, out):
    grid = _grid(cfg)
    c = _couplings(cfg)
    cls = admissible(c)
    if not cls.ok:
        print(f"refused: {cls.message}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    if not cfg["omega"] > 0:
        raise ConfigError("omega must be positive")
    _kernel(grid, cfg["axis"])
    path = cfg["out"] or "ground_state.dgpe"
    try:
        gs = solve_ground_state(grid, c, cfg["omega"], cfg["axis"], _minimizer(cfg))
    except MaxItersExceeded as exc:
        trace_path = f"{path}.trace.csv"
        _write_trace(trace_path, exc.result.trace)
        print(f"no convergence: {exc}; trace written to {trace_path}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    write_field(path, gs.u, c, gs.omega, gs.axis)
    text = _report_text(c, gs.omega, gs.axis, gs, gs.report)
    with open(f"{path}.report.txt", "w") as fh:
        fh.write(text + "\n")
    payload = gs.report.as_dict()
    payload.update(j=gs.j, C_star=gs.C_star, lambda1=c.lambda1, lambda2=c.lambda2, omega=gs.omega,
                   axis=list(gs.axis), iterations=gs.minimize.iterations)
    with open(f"{path}.report.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    print(text, file=out)
    print(f"wrote {path}", file=out)
    return EXIT_OK if gs.report.passed else EXIT_NO_CONVERGENCE


def cmd_verify(cfg, path, out):
    ff = read_field(path)
    try:
        report = verify_field(ff.field, ff.omega, ff.couplings, ff.axis)
    except ValueError as exc:
        raise CorruptFieldFile(f"corrupt field file {path}: {exc}") from None
    print(_report_text(ff.couplings, ff.omega, ff.axis, None, report), file=out)
    print(json.dumps(report.as_dict()), file=out)
    return EXIT_OK if report.passed else EXIT_NO_CONVERGENCE


def cmd_propagate(cfg, path, out):
    ff = read_field(path)
    psi = ff.field
    c = ff.couplings
    # couplings in the file can be overridden from the command line or config
    if cfg.get("_lambda1_set"):
        c = Couplings(cfg["lambda1"], c.lambda2)
    if cfg.get("_lambda2_set"):
        c = Couplings(c.lambda1, cfg["lambda2"])
    try:
        pcfg = PropagationConfig(dt=cfg["dt"], steps=cfg["steps"], snapshot_stride=cfg["snapshot_stride"],
                                 diag_stride=cfg["diag_stride"], trap=cfg["trap"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["velocity"] is not None:
        psi, track = boost(psi, ff.omega, cfg["velocity"])
        note = " (snapped to the frequency lattice)" if track.snapped else ""
        print(f"boost velocity {track.velocity}{note}", file=out)
    kernel = build_kernel(psi.grid, ff.axis) if c.lambda2 != 0 else None
    prefix = cfg["out"] or "run"
    diag_path = cfg["diag"] or f"{prefix}_diag.csv"
    code = EXIT_OK
    try:
        traj = split_step(psi, kernel, c, pcfg)
    except (BlowUpDetected, NonfiniteField) as exc:
        traj = exc.trajectory
        print(f"blow-up detected: {exc}", file=sys.stderr)
        code = EXIT_BLOW_UP
    for i, (t, f) in enumerate(traj.snapshots):
        write_field(f"{prefix}_{i:05d}.dgpe", f, c, ff.omega, ff.axis)
    write_diagnostics_csv(diag_path, DIAGNOSTIC_COLUMNS, traj.rows())
    write_plot_files(prefix, traj.diagnostics)
    print(f"{traj.steps_taken} steps, {len(traj.snapshots)} snapshots; diagnostics in {diag_path}", file=out)
    return code


def _sweep_row(args):
    l1, l2, cfg = args
    c = Couplings(l1, l2)
    cls = admissible(c)
    row = {"lambda1": l1, "lambda2": l2, "admissible": int(cls.ok), "branch": cls.branch,
           "condition": cls.condition, "j": "", "C_star": "", "aspect_ratio": "", "status": ""}
    if cfg["solve"] and cls.ok:
        try:
            gs = solve_ground_state(_grid(cfg), c, cfg["omega"], cfg["axis"], _minimizer(cfg))
            row.update(j=repr(float(gs.j)), C_star=repr(float(gs.C_star)),
                       aspect_ratio=repr(float(aspect_ratio(gs.u, gs.axis))),
                       status="verified" if gs.report.passed else "verification failed")
        except MaxItersExceeded:
            row["status"] = "no convergence"
    return row


def cmd_sweep(cfg, out):
    if cfg["lambda1_range"] is None and cfg["lambda2_range"] is None:
        raise ConfigError("sweep needs --lambda1-range and/or --lambda2-range")
    r1 = cfg["lambda1_range"] or Range(cfg["lambda1"], cfg["lambda1"], 0.0)
    r2 = cfg["lambda2_range"] or Range(cfg["lambda2"], cfg["lambda2"], 0.0)
    pairs = sorted((round(a, 12), round(b, 12)) for a in r1.values() for b in r2.values())
    jobs = [(a, b, cfg) for a, b in pairs]
    if cfg["workers"] > 1 and cfg["solve"]:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    cols = ["lambda1", "lambda2", "admissible", "branch", "condition", "j", "C_star", "aspect_ratio", "status"]
    sink = open(cfg["out"], "w", newline="") if cfg["out"] else out
    try:
        w = csv.DictWriter(sink, fieldnames=cols)
        w.writeheader()
        for row in rows:
            w.writerow(row)
    finally:
        if sink is not out:
            sink.close()
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="dipolar-gpe", description="Standing waves and dynamics of the dipolar GP equation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    def shared(sp):
        sp.add_argument("--config", metavar="PATH", help="key = value settings file")
        sp.add_argument("--grid", metavar="N1,N2,N3")
        sp.add_argument("--box", metavar="L1,L2,L3")
        sp.add_argument("--lambda1", metavar="R")
        sp.add_argument("--lambda2", metavar="R")
        sp.add_argument("--axis", metavar="X,Y,Z")
        sp.add_argument("--omega", metavar="R")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--seed", metavar="U64")

    def minimizer(sp):
        sp.add_argument("--max-iters", dest="max_iters", metavar="N")
        sp.add_argument("--tol-grad", dest="tol_grad", metavar="R")
        sp.add_argument("--widths", metavar="S1,S2,S3", help="initial Gaussian widths (perp, perp, parallel)")
        sp.add_argument("--perturbation", metavar="R", help="relative noise on the initial guess (uses --seed)")

    sp = sub.add_parser("kernel-info", help="symbol extrema and path-equivalence check")
    shared(sp)
    sp = sub.add_parser("ground-state", help="compute and verify a standing wave")
    shared(sp)
    minimizer(sp)
    sp = sub.add_parser("verify", help="recompute the verification report of a field file")
    shared(sp)
    sp.add_argument("path")
    sp = sub.add_parser("propagate", help="split-step evolution of a field file")
    shared(sp)
    sp.add_argument("path")
    sp.add_argument("--velocity", metavar="VX,VY,VZ")
    sp.add_argument("--dt", metavar="R")
    sp.add_argument("--steps", metavar="N")
    sp.add_argument("--trap", action="store_const", const=True, default=None)
    sp.add_argument("--snapshot-stride", dest="snapshot_stride", metavar="N")
    sp.add_argument("--diag-stride", dest="diag_stride", metavar="N")
    sp.add_argument("--diag", metavar="PATH", help="diagnostics CSV (default <out>_diag.csv)")
    sp = sub.add_parser("sweep", help="admissibility map over coupling ranges")
    shared(sp)
    minimizer(sp)
    sp.add_argument("--lambda1-range", dest="lambda1_range", metavar="A:B:STEP")
    sp.add_argument("--lambda2-range", dest="lambda2_range", metavar="A:B:STEP")
    sp.add_argument("--solve", action="store_const", const=True, default=None)
    sp.add_argument("--workers", metavar="N")
    return p


def _join_values(argv, parser):
    """Attach values such as ``-2:6:1`` or ``-0.8,0,0`` to their flag.

    argparse would read them as option names.
    """
    flags = set()
    for action in parser._subparsers._group_actions[0].choices.values():
        for a in action._actions:
            if a.nargs is None and a.option_strings:
                flags.update(a.option_strings)
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in flags and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in flags:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_values(argv, parser))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve(args)
        cfg["_lambda1_set"] = args.lambda1 is not None
        cfg["_lambda2_set"] = args.lambda2 is not None
        if args.command == "kernel-info":
            return cmd_kernel_info(cfg, out)
        if args.command == "ground-state":
            return cmd_ground_state(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, args.path, out)
        if args.command == "propagate":
            return cmd_propagate(cfg, args.path, out)
        return cmd_sweep(cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NotAdmissible as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except CorruptFieldFile as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: no such file", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry():
    sys.exit(main())
