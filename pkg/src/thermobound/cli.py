"""Command-line front end.

Every subcommand writes a table (CSV by default, JSON with ``--format
json``) whose first line is a comment recording the full configuration.
Errors go to stderr as a single JSON line and map to exit codes

* 2: bad command-line usage
* 3: input outside an operation's domain
* 4: numerically untrustworthy result
* 1: ``sweep-check`` found a violated inequality
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import franck_condon as fc
from . import oscillator as osc
from . import qubit, sampling, thermal
from .errors import NumericalError, ValidationError
from .profiles import FrequencyProfile

log = logging.getLogger("thermobound")

EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def render(table: Table, config: dict, fmt: str) -> str:
    header = "# thermobound " + json.dumps(config, sort_keys=True, separators=(",", ":"))
    if fmt == "json":
        doc = {"config": config, "columns": table.columns,
               "rows": [[_jsonable(v) for v in r] for r in table.rows]}
        doc.update(table.meta)
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    lines = [header]
    for k in sorted(table.meta):
        if not isinstance(table.meta[k], (dict, list)):
            lines.append(f"# {k}: {table.meta[k]}")
    lines.append(",".join(table.columns))
    lines.extend(",".join(_fmt(v) for v in r) for r in table.rows)
    return "\n".join(lines) + "\n"


def gnuplot_script(table: Table, data_path: str, title: str) -> str:
    x = table.columns[0]
    plotted = [c for c in ("lower", "exact", "upper") if c in table.columns]
    parts = [f"'{data_path}' using 1:{table.columns.index(c) + 1} with lines title '{c}'" for c in plotted]
    return "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        f"set xlabel '{x}'",
        "plot " + ", \\\n     ".join(parts),
        "",
    ])


def _pmap(fn, items, workers: int):
    """Ordered map over ``items`` with at most ``workers`` threads."""
    items = list(items)
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _grid(spec: str) -> np.ndarray:
    """``"a:b:n"`` to ``n`` points from ``a`` to ``b``."""
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"grid must look like a:b:n, got {spec!r}") from None
    if n < 1:
        raise UsageError(f"grid needs at least one point, got {n}")
    return np.linspace(a, b, n)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e.msg} at line {e.lineno}") from None


def _spec_from(cls, obj):
    try:
        return cls.from_json(obj)
    except (KeyError, TypeError, IndexError) as e:
        raise ValidationError(f"malformed spec JSON: missing or bad field {e}") from None


def _read_matrix_csv(path: str) -> np.ndarray:
    try:
        a = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from None
    except ValueError as e:
        raise ValidationError(f"{path}: {e}") from None
    return a


def _read_levels(path: str) -> np.ndarray:
    return _read_matrix_csv(path).ravel()


def _profile_from(args) -> FrequencyProfile:
    if args.profile == "constant":
        return FrequencyProfile.constant(args.omega0)
    if args.profile == "sqrt_linear":
        return FrequencyProfile.sqrt_linear(args.omega0, args.eta, args.offset)
    if args.profile == "paul_trap":
        return FrequencyProfile.paul_trap(args.omega0, args.eta, args.Omega)
    raise UsageError(f"unsupported profile {args.profile!r}")


def _bounds_cols(b: thermal.BoundsResult) -> tuple:
    return (b.lower, b.exact, b.upper)


# subcommands ------------------------------------------------------------------


def cmd_generic(args) -> Table:
    d1, d2 = _read_json(args.s1), _read_json(args.s2)
    grand = "N" in d1 or "N" in d2
    if grand:
        if not ("N" in d1 and "N" in d2):
            raise ValidationError("both specs must be grand-canonical or neither")
        s1, s2 = _spec_from(thermal.GrandThermalSpec, d1), _spec_from(thermal.GrandThermalSpec, d2)
        ops = {"entropy": thermal.grand_delta_s_bounds, "logz": thermal.grand_log_z_ratio_bounds}
    else:
        s1, s2 = _spec_from(thermal.ThermalSpec, d1), _spec_from(thermal.ThermalSpec, d2)
        ops = {"entropy": thermal.delta_s_bounds, "logz": thermal.log_z_ratio_bounds,
               "helmholtz": thermal.helmholtz_bounds}
    if args.bound not in ops:
        raise ValidationError(f"bound {args.bound!r} is not available for {'grand' if grand else 'canonical'} specs")
    b = ops[args.bound](s1, s2)
    meta = {"mode": b.mode, "guaranteed": b.guaranteed}
    if args.format == "json":
        meta.update({"s1": s1.to_json(), "s2": s2.to_json()})
    return Table(list(thermal.CSV_COLUMNS), [b.as_row()], meta)


def cmd_qubit_sweep(args) -> Table:
    if args.hnorm is not None:
        b1 = qubit.BlochHamiltonian(args.h0, (0.0, 0.0, args.hnorm))
    else:
        b1 = qubit.BlochHamiltonian(args.h0, (args.hx, args.hy, args.hz))
    if args.gnorm is not None:
        b2 = qubit.BlochHamiltonian.from_polar(args.g0, args.gnorm, args.theta if args.theta is not None else 0.0)
    else:
        b2 = qubit.BlochHamiltonian(args.g0, (args.gx, args.gy, args.gz))
    n = args.n
    if args.sweep == "theta":
        xs, rows = qubit.theta_sweep(b1.norm, b2.norm, args.T1, args.T2, n=n, h0=args.h0, g0=args.g0)
        col = "theta"
    else:
        theta = args.theta if args.theta is not None else math.acos(qubit.cos_angle(b1, b2))
        T1s = _grid(args.T1grid) if args.T1grid else np.linspace(1.0, 30.0, n)
        xs, rows = qubit.temperature_sweep(b1.norm, b2.norm, theta, args.T2, T1s, h0=args.h0, g0=args.g0)
        col = "T1"
    return Table([col, "lower", "exact", "upper"],
                 [(float(x),) + _bounds_cols(r) for x, r in zip(xs, rows)])


def cmd_fc(args) -> Table:
    l1, l2 = _read_levels(args.levels1), _read_levels(args.levels2)
    s1, s2 = fc.SpectralSystem(l1), fc.SpectralSystem(l2)
    if args.overlap:
        k = fc.OverlapMatrix.from_array(_read_matrix_csv(args.overlap))
    else:
        if l1.size != l2.size:
            raise ValidationError("identity overlaps need equally many levels")
        k = fc.OverlapMatrix.from_array(np.eye(l1.size))
    rows = []
    for name, op in (("entropy", fc.delta_s_bounds_fc), ("helmholtz", fc.helmholtz_bounds_fc)):
        b = op(s1, s2, args.T1, args.T2, k)
        rows.append((name,) + b.as_row() + (b.guaranteed,))
    mode = "complete" if k.complete else "truncated-overlap"
    return Table(["quantity"] + list(thermal.CSV_COLUMNS) + ["guaranteed"], rows, {"mode": mode})


def _osc_rows(profile, pairs, T1, T2, workers):
    def one(pair):
        t, tp = pair
        b = osc.delta_s_bounds_physical(profile, t, tp, T1, T2)
        return _bounds_cols(b) + (float(profile.omega(t)), float(profile.omega(tp)))
    return _pmap(one, pairs, workers)


def cmd_osc_physical(args) -> Table:
    profile = _profile_from(args)
    if (args.t is None) == (args.tprime is None):
        raise UsageError("give exactly one of --t (sweep t') or --tprime (sweep t)")
    grid = np.linspace(args.tmin, args.tmax, args.n)
    if args.tprime is not None:
        pairs = [(t, args.tprime) for t in grid]
        col = "t"
    else:
        pairs = [(args.t, tp) for tp in grid]
        col = "tprime"
    vals = _osc_rows(profile, pairs, args.T1, args.T2, args.workers)
    return Table([col, "lower", "exact", "upper", "omega_t", "omega_tprime"],
                 [(float(x),) + v for x, v in zip(grid, vals)])


def cmd_paul_trap(args) -> Table:
    profile = FrequencyProfile.paul_trap(args.omega0, args.eta, args.Omega)
    grid = np.linspace(args.tpmin, args.tpmax, args.n)
    vals = _osc_rows(profile, [(args.t, tp) for tp in grid], args.T1, args.T2, args.workers)
    return Table(["tprime", "lower", "exact", "upper", "omega_t", "omega_tprime"],
                 [(float(x),) + v for x, v in zip(grid, vals)])


def cmd_osc_invariant(args) -> Table:
    profile = _profile_from(args)
    ts = _grid(args.tgrid) if args.tgrid else np.array([args.t])
    tps = _grid(args.tpgrid) if args.tpgrid else np.array([args.tprime])
    T1s = _grid(args.T1grid) if args.T1grid else np.array([args.T1])
    T2s = _grid(args.T2grid) if args.T2grid else np.array([args.T2])
    if np.any(np.isnan(np.concatenate([ts, tps, T1s, T2s]))):
        raise UsageError("each of t, tprime, T1, T2 needs a value or a grid")
    t_hi = float(max(ts.max(), tps.max()))
    if min(ts.min(), tps.min()) < 0:
        raise ValidationError("times must be nonnegative")
    sol = osc.solve_classical(profile, max(t_hi, 1e-9), tol=args.tol)
    points = [(t, tp, T1, T2) for t in ts for tp in tps for T1 in T1s for T2 in T2s]

    def one(p):
        t, tp, T1, T2 = p
        b = osc.delta_s_bounds_invariant(sol, profile, t, tp, T1, T2)
        return (float(t), float(tp), float(T1), float(T2)) + _bounds_cols(b) + (
            float(profile.omega(t)), float(profile.omega(tp)), osc.f_factor(sol, t, tp))

    rows = _pmap(one, points, args.workers)
    return Table(["t", "tprime", "T1", "T2", "lower", "exact", "upper", "omega_t", "omega_tprime", "f"],
                 rows, {"wronskian_drift": format(sol.wronskian_drift(), ".3e")})


def cmd_oracle(args) -> Table:
    closed = osc.cross_mean_frequencies(args.omega_t, args.omega_tp, args.T)
    z_closed = osc.partition_function_closed(args.omega_tp, args.T)
    z_fock, fock = osc.fock_oracle_frequencies(args.omega_t, args.omega_tp, args.T, args.N)
    return Table(["omega_t", "omega_tp", "T", "N", "closed", "fock", "abs_diff", "Z_closed", "Z_fock"],
                 [(args.omega_t, args.omega_tp, args.T, args.N, closed, fock, abs(closed - fock),
                   z_closed, z_fock)])


# sweep-check ------------------------------------------------------------------


def _check_generic(rng, n):
    for _ in range(n):
        s1, s2 = sampling.random_spec_pair(rng)
        for name, op in (("delta_s", thermal.delta_s_bounds), ("helmholtz", thermal.helmholtz_bounds),
                         ("log_z", thermal.log_z_ratio_bounds)):
            yield name, op(s1, s2), {"s1": s1.to_json(), "s2": s2.to_json()}


def _check_grand(rng, n):
    for _ in range(n):
        d = int(rng.integers(2, 7))
        g1 = sampling.random_grand_spec(rng, d)
        g2 = sampling.random_grand_spec(rng, d)
        params = {"g1": g1.to_json(), "g2": g2.to_json()}
        yield "grand_delta_s", thermal.grand_delta_s_bounds(g1, g2), params
        yield "grand_log_z", thermal.grand_log_z_ratio_bounds(g1, g2), params


def _check_qubit(rng, n):
    for _ in range(n):
        b1 = qubit.BlochHamiltonian(rng.normal(), rng.normal(size=3) * 5)
        b2 = qubit.BlochHamiltonian(rng.normal(), rng.normal(size=3) * 5)
        T1, T2 = sampling.log_uniform(rng, 0.1, 100), sampling.log_uniform(rng, 0.1, 100)
        yield "qubit", qubit.delta_s_bounds_qubit(b1, b2, T1, T2), {
            "h1": [b1.h0, *b1.h], "h2": [b2.h0, *b2.h], "T1": T1, "T2": T2}


def _check_fc(rng, n):
    for _ in range(n):
        d = int(rng.integers(2, 17))
        s1 = fc.SpectralSystem.from_operator(sampling.random_hermitian(rng, d))
        s2 = fc.SpectralSystem.from_operator(sampling.random_hermitian(rng, d))
        T1, T2 = sampling.log_uniform(rng, 0.1, 100), sampling.log_uniform(rng, 0.1, 100)
        params = {"levels1": s1.levels.tolist(), "levels2": s2.levels.tolist(), "T1": T1, "T2": T2}
        yield "fc_delta_s", fc.delta_s_bounds_fc(s1, s2, T1, T2), params
        yield "fc_helmholtz", fc.helmholtz_bounds_fc(s1, s2, T1, T2), params


def _check_oscillator(rng, n):
    for _ in range(n):
        w, wp = rng.uniform(0.2, 5.0, 2)
        T1, T2 = sampling.log_uniform(rng, 0.1, 100), sampling.log_uniform(rng, 0.1, 100)
        yield "physical", osc.delta_s_bounds_frequencies(w, wp, T1, T2), {
            "omega_t": w, "omega_tp": wp, "T1": T1, "T2": T2}
    for profile in (FrequencyProfile.sqrt_linear(1.0, 1.0, 0.0), FrequencyProfile.paul_trap(1.0, 0.5, 2.0)):
        sol = osc.solve_classical(profile, 4 * math.pi)
        for _ in range(n):
            t, tp = rng.uniform(0.1, 4 * math.pi, 2)
            T1, T2 = sampling.log_uniform(rng, 0.5, 50), sampling.log_uniform(rng, 0.5, 50)
            yield "invariant_" + profile.kind, osc.delta_s_bounds_invariant(sol, profile, t, tp, T1, T2), {
                "t": t, "tprime": tp, "T1": T1, "T2": T2}


SUITES = {"generic": _check_generic, "grand": _check_grand, "qubit": _check_qubit,
          "fc": _check_fc, "oscillator": _check_oscillator}


def cmd_sweep_check(args) -> Table:
    rng = np.random.default_rng(args.seed)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    stats: dict[str, list] = {}
    violations = []
    for suite in names:
        for name, b, params in SUITES[suite](rng, args.samples):
            excess = max(b.lower - b.exact, b.exact - b.upper)
            st = stats.setdefault(name, [0, 0, -math.inf])
            st[0] += 1
            st[2] = max(st[2], excess)
            if excess > args.tol:
                st[1] += 1
                violations.append({"check": name, "excess": excess, "params": params})
    for v in violations:
        print("violation " + json.dumps(v, sort_keys=True, default=_jsonable), file=sys.stderr)
    rows = [(k, v[0], v[1], v[2]) for k, v in stats.items()]
    return Table(["check", "samples", "violations", "max_excess"], rows,
                 {"violations_total": len(violations)})


# parser -----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script plotting the CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="thread pool size for sweeps")


def _add_profile(p: argparse.ArgumentParser, default: str):
    p.add_argument("--profile", choices=("constant", "sqrt_linear", "paul_trap"), default=default)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--Omega", type=float, default=2.0)
    p.add_argument("--offset", type=float, default=0.0,
                   help="sqrt_linear only: omega0*sqrt(offset + eta*t); 0 gives sqrt(t)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermobound", description="Entropy and free-energy bounds between thermal states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generic", help="bounds between two specs given as JSON files")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--bound", choices=("entropy", "helmholtz", "logz"), default="entropy")
    _add_common(p)
    p.set_defaults(func=cmd_generic)

    p = sub.add_parser("qubit-sweep", help="two-level bounds against angle or temperature")
    for name in ("h0", "hx", "hy", "hz", "g0", "gx", "gy", "gz"):
        p.add_argument(f"--{name}", type=float, default=0.0)
    p.add_argument("--hnorm", type=float)
    p.add_argument("--gnorm", type=float)
    p.add_argument("--theta", type=float, help="angle between Bloch vectors (T1 sweep)")
    p.add_argument("--T1", type=float, default=10.0)
    p.add_argument("--T2", type=float, default=15.0)
    p.add_argument("--sweep", choices=("theta", "T1"), default="theta")
    p.add_argument("--T1grid", help="a:b:n grid for the T1 sweep (default 1:30:n)")
    p.add_argument("--n", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_qubit_sweep)

    p = sub.add_parser("fc", help="bounds from level lists and an overlap matrix")
    p.add_argument("--levels1", required=True, help="one level per line")
    p.add_argument("--levels2", required=True)
    p.add_argument("--overlap", help="dense CSV matrix k[j,l]; identity if omitted")
    p.add_argument("--T1", type=float, required=True)
    p.add_argument("--T2", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_fc)

    p = sub.add_parser("osc-physical", help="oscillator entropy bounds along a time sweep")
    _add_profile(p, "sqrt_linear")
    p.add_argument("--T1", type=float, default=10.0)
    p.add_argument("--T2", type=float, default=10.0)
    p.add_argument("--t", type=float, help="fix t and sweep t'")
    p.add_argument("--tprime", type=float, help="fix t' and sweep t")
    p.add_argument("--tmin", type=float, default=0.1)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--n", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_osc_physical)

    p = sub.add_parser("paul-trap", help="physical bounds for omega0*sqrt(1 + eta cos(Omega t')) against t'")
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--Omega", type=float, default=2.0)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--T1", type=float, default=10.0)
    p.add_argument("--T2", type=float, default=10.0)
    p.add_argument("--tpmin", type=float, default=0.0)
    p.add_argument("--tpmax", type=float, default=4 * math.pi)
    p.add_argument("--n", type=int, default=400)
    _add_common(p)
    p.set_defaults(func=cmd_paul_trap)

    p = sub.add_parser("osc-invariant", help="invariant-Hamiltonian bounds on time and temperature grids")
    _add_profile(p, "sqrt_linear")
    p.add_argument("--t", type=float, default=float("nan"))
    p.add_argument("--tprime", type=float, default=float("nan"))
    p.add_argument("--T1", type=float, default=float("nan"))
    p.add_argument("--T2", type=float, default=float("nan"))
    for g in ("tgrid", "tpgrid", "T1grid", "T2grid"):
        p.add_argument(f"--{g}", help="a:b:n")
    p.add_argument("--tol", type=float, default=osc.solve_classical.__defaults__[0])
    _add_common(p)
    p.set_defaults(func=cmd_osc_invariant)

    p = sub.add_parser("oracle", help="closed-form cross mean against truncated Fock diagonalisation")
    p.add_argument("--omega-t", dest="omega_t", type=float, required=True)
    p.add_argument("--omega-tp", dest="omega_tp", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--N", type=int, default=400)
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep-check", help="randomised sandwich sweeps; exit 1 on any violation")
    p.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=thermal.SANDWICH_TOL)
    _add_common(p)
    p.set_defaults(func=cmd_sweep_check)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in cfg.items()}


def _setup_logging():
    level = os.environ.get("THERMOBOUND_LOG", "warn").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        if getattr(args, "n", 1) < 1:
            raise UsageError("--n must be at least 1")
        if args.gnuplot and (args.out == "-" or args.format != "csv"):
            raise UsageError("--gnuplot needs --out FILE with csv format")
        table = args.func(args)
        text = render(table, _config(args), args.format)
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w") as fh:
                fh.write(text)
        if args.gnuplot:
            with open(args.gnuplot, "w") as fh:
                fh.write(gnuplot_script(table, args.out, args.command))
    except UsageError as e:
        return _fail("usage", str(e), EXIT_USAGE)
    except ValidationError as e:
        return _fail("validation", str(e), EXIT_VALIDATION)
    except NumericalError as e:
        return _fail("numerical", str(e), EXIT_NUMERICAL)
    except OSError as e:
        return _fail("validation", f"{e.filename}: {e.strerror}", EXIT_VALIDATION)
    if args.command == "sweep-check" and table.meta.get("violations_total"):
        return EXIT_VIOLATION
    return 0
