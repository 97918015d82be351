"""Command-line front end.

Subcommands: ``validate``, ``evolve``, ``times``, ``sweep``, ``oracle-check``.
Exit codes: 0 success, 1 parse/usage error, 2 validation-negative result,
3 numerical abort. Reals are written with 17 significant digits in CSV;
JSON output is a single line.
"""

import argparse
import csv
import io
import itertools
import json
import math
import sys

import numpy as np

from . import criteria
from .channels import SQUEEZED, THERMAL, BathSpec, asymptotic_state, evolve
from .corpus import DEFAULT_SEED, random_nonclassical_states
from .errors import TruncationError
from .fock_oracle import BRIDGE_SCALE, DEFAULT_DIM, compare_with_channel
from .phase_space import CovarianceMatrix, is_classical, min_eigenvalue, validate_state

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2
EXIT_NUMERICAL = 3

ORACLE_TOL = 1e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return format(float(x), ".17g")


def _dumps(obj):
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _json_time(x):
    if x is None:
        return None
    return "inf" if math.isinf(x) else float(x)


def bose_einstein(temperature, omega0):
    """Mean occupancy ``1/(exp(omega0/T) - 1)`` (hbar = k_B = 1)."""
    if temperature < 0 or omega0 <= 0:
        raise UsageError("--temperature must be >= 0 and --omega0 > 0")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(omega0 / temperature)


def _add_bath_flags(p):
    g = p.add_argument_group("bath")
    g.add_argument("--bath", choices=["thermal", "squeezed"], default="thermal")
    g.add_argument("--gamma0", type=float, default=1.0)
    g.add_argument("--N", type=float, default=None, help="thermal occupancy (thermal bath)")
    g.add_argument("--N-th", dest="N_th", type=float, default=None, help="thermal occupancy (squeezed bath)")
    g.add_argument("--r", type=float, default=0.0)
    g.add_argument("--phi", type=float, default=0.0)
    g.add_argument("--temperature", type=float, default=None, help="sets N or N_th via Bose-Einstein")
    g.add_argument("--omega0", type=float, default=None)


def _add_state_flags(p, positional):
    g = p.add_argument_group("initial state")
    if positional:
        g.add_argument("state", nargs="?", default=None, help="covariance matrix JSON file")
    else:
        g.add_argument("--state", default=None, help="covariance matrix JSON file")
    g.add_argument("--n", type=float, default=None, help="symmetric family diagonal")
    g.add_argument("--kx", type=float, default=None)
    g.add_argument("--ky", type=float, default=None)
    g.add_argument("--random-modes", type=int, default=None, help="random non-classical state")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)


def bath_from_args(args):
    occupancy = None
    if args.temperature is not None:
        if args.omega0 is None:
            raise UsageError("--temperature needs --omega0")
        if args.N is not None or args.N_th is not None:
            raise UsageError("give either --temperature or an explicit occupancy")
        occupancy = bose_einstein(args.temperature, args.omega0)
    omega0 = args.omega0 or 0.0
    try:
        if args.bath == "thermal":
            if args.N_th is not None or args.r or args.phi:
                raise UsageError("--N-th/--r/--phi need --bath squeezed")
            N = occupancy if occupancy is not None else (args.N if args.N is not None else 0.0)
            return BathSpec.thermal(args.gamma0, N, omega0=omega0)
        if args.N is not None:
            raise UsageError("squeezed bath takes --N-th, not --N")
        N_th = occupancy if occupancy is not None else (args.N_th if args.N_th is not None else 0.0)
        return BathSpec.squeezed_thermal(args.gamma0, N_th, args.r, args.phi, omega0=omega0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def load_covariance(path):
    try:
        with open(path) as fh:
            return CovarianceMatrix.from_json(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read covariance matrix from {path}: {exc}") from exc


def state_from_args(args):
    """Return ``(V0, symmetric_state_or_None)``."""
    sources = [args.state is not None, args.n is not None, args.random_modes is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of a state file, --n/--kx/--ky, or --random-modes")
    if args.state is not None:
        return np.asarray(load_covariance(args.state)), None
    if args.n is not None:
        kx = args.kx if args.kx is not None else 0.0
        ky = args.ky if args.ky is not None else kx
        s = criteria.SymmetricTwoModeState(args.n, kx, ky)
        return s.covariance(), s
    if args.random_modes < 1:
        raise UsageError("--random-modes must be positive")
    return random_nonclassical_states(1, args.random_modes, seed=args.seed)[0], None


def cmd_validate(args, out):
    V = load_covariance(args.state)
    report = validate_state(V)
    result = report.to_dict()
    result["min_eigenvalue"] = min_eigenvalue(V)
    result["classical"] = is_classical(V)
    if V.n_modes == 2 and report.physical:
        result["separable"] = criteria.is_separable_two_mode(V)
    out.write(_dumps(result) + "\n")
    return EXIT_OK if report.physical else EXIT_NEGATIVE


def cmd_evolve(args, out):
    V0, _ = state_from_args(args)
    bath = bath_from_args(args)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.t < 0:
        raise UsageError("--t must be non-negative")
    d = V0.shape[0]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t"] + [f"V_{i}_{j}" for i in range(d) for j in range(d)] + ["min_eigenvalue"])
    times = np.linspace(0.0, args.t, args.samples) if args.samples > 1 else np.array([args.t])
    for t in times:
        V = evolve(V0, bath, float(t))
        w.writerow([_fmt(t)] + [_fmt(x) for x in V.ravel()] + [_fmt(min_eigenvalue(V))])
    return EXIT_OK


def transition_times(V0, bath, horizon=None, symmetric=None):
    """Everything ``times`` reports, as a JSON-ready dict."""
    tc = criteria.classicality_time(V0, bath, horizon=horizon)
    result = {"t_c": tc.to_dict(), "t_ESD": None}
    if V0.shape == (4, 4):
        if symmetric is not None:
            esd = criteria.esd_time_symmetric(symmetric, bath, horizon=horizon)
        else:
            esd = criteria.esd_time(V0, bath, horizon=horizon)
        result["t_ESD"] = esd.to_dict()
    result["t_max"] = _json_time(criteria.t_max(bath.gamma0, bath.N)) if bath.kind == THERMAL else None
    result["bound_time"] = tc.bound_time
    result["n_min0"] = min_eigenvalue(V0)
    result["asymptote_min_eigenvalue"] = min_eigenvalue(asymptotic_state(bath, 1))
    return result


def cmd_times(args, out):
    V0, sym = state_from_args(args)
    bath = bath_from_args(args)
    try:
        result = transition_times(V0, bath, horizon=args.horizon, symmetric=sym)
    except criteria.UnphysicalStateError as exc:
        print(f"gaussian-esd: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    out.write(_dumps(result) + "\n")
    return EXIT_OK


# ---- sweeps ---------------------------------------------------------------

BATH_PARAMS = {THERMAL: ("gamma0", "N"), SQUEEZED: ("gamma0", "N_th", "r", "phi")}
STATE_PARAMS = {"symmetric": ("n", "kx", "ky"), "squeezed": ("s",), "covariance": ()}
SWEEP_OUTPUTS = ("t_c", "t_ESD", "t_max", "min_eigenvalue")


def _axis(spec):
    try:
        name = spec["name"]
        start, stop, count = float(spec["start"]), float(spec["stop"]), int(spec["count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed grid axis {spec!r}") from exc
    scale = spec.get("scale", "linear")
    if count < 2:
        raise UsageError(f"grid axis {name!r} needs count >= 2")
    if scale == "linear":
        values = np.linspace(start, stop, count)
    elif scale == "log":
        if start <= 0 or stop <= 0:
            raise UsageError(f"log axis {name!r} needs positive bounds")
        values = np.geomspace(start, stop, count)
    else:
        raise UsageError(f"unknown axis scale {scale!r}")
    return name, [float(v) for v in values]


def _build_state(state_spec):
    kind = state_spec.get("kind")
    if kind == "symmetric":
        kx = float(state_spec.get("kx", 0.0))
        s = criteria.SymmetricTwoModeState(float(state_spec["n"]), kx, float(state_spec.get("ky", kx)))
        return s.covariance(), s
    if kind == "squeezed":
        s = float(state_spec["s"])
        if s <= 0:
            raise ValueError("squeezed state needs s > 0")
        n_modes = int(state_spec.get("n_modes", 1))
        return np.kron(np.eye(n_modes), np.diag([s, 1.0 / s])), None
    if kind == "covariance":
        return np.asarray(CovarianceMatrix.from_dict(state_spec)), None
    raise UsageError(f"unknown state kind {kind!r}")


def _cell(res):
    if res.kind in (criteria.FINITE, criteria.ALREADY):
        return _fmt(res.t)
    return res.kind


def run_sweep(spec):
    """Evaluate a sweep spec; returns ``(header, rows)`` with rows sorted by grid point."""
    try:
        bath_spec = dict(spec["bath"])
        state_spec = dict(spec["state"])
        grid = spec["grid"]
        outputs = list(spec.get("outputs", ["t_c", "t_ESD", "t_max"]))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed sweep spec: {exc}") from exc
    if not grid:
        raise UsageError("sweep needs at least one grid axis")
    bad = [o for o in outputs if o not in SWEEP_OUTPUTS]
    if bad:
        raise UsageError(f"unknown outputs {bad}")
    kind = bath_spec.get("kind")
    if kind not in BATH_PARAMS:
        raise UsageError(f"unknown bath kind {kind!r}")
    state_kind = state_spec.get("kind")
    if state_kind not in STATE_PARAMS:
        raise UsageError(f"unknown state kind {state_kind!r}")
    axes = [_axis(a) for a in grid]
    names = [n for n, _ in axes]
    if len(set(names)) != len(names):
        raise UsageError("duplicate grid axis")
    for name in names:
        if name not in BATH_PARAMS[kind] and name not in STATE_PARAMS[state_kind]:
            raise UsageError(f"unknown swept parameter {name!r} for {kind} bath and {state_kind} state")
    horizon = spec.get("horizon")
    times = [float(t) for t in spec.get("times", [0.0])]

    header = list(names)
    for o in outputs:
        if o == "min_eigenvalue":
            header += [f"min_eigenvalue@{_fmt(t)}" for t in times]
        else:
            header.append(o)

    rows = []
    for point in itertools.product(*[v for _, v in axes]):
        b = dict(bath_spec)
        st = dict(state_spec)
        for name, value in zip(names, point):
            if name in BATH_PARAMS[kind]:
                b[name] = value
            else:
                st[name] = value
        row = [_fmt(v) for v in point]
        try:
            bath = BathSpec.from_dict(b)
            V0, sym = _build_state(st)
            info = transition_times(V0, bath, horizon=horizon, symmetric=sym)
        except criteria.UnphysicalStateError:
            info = None
        except ValueError as exc:
            raise UsageError(f"invalid sweep point {dict(zip(names, point))}: {exc}") from exc
        for o in outputs:
            if info is None:
                row += ["unphysical"] * (len(times) if o == "min_eigenvalue" else 1)
            elif o == "t_c":
                row.append(_cell(criteria.TransitionResult(**info["t_c"])))
            elif o == "t_ESD":
                row.append("n/a" if info["t_ESD"] is None else _cell(criteria.TransitionResult(**info["t_ESD"])))
            elif o == "t_max":
                tm = info["t_max"]
                row.append("n/a" if tm is None else (tm if tm == "inf" else _fmt(tm)))
            else:
                row += [_fmt(min_eigenvalue(evolve(V0, bath, t))) for t in times]
        rows.append((point, row))
    rows.sort(key=lambda pr: pr[0])
    return header, [r for _, r in rows]


def cmd_sweep(args, out):
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read sweep spec {args.spec}: {exc}") from exc
    header, rows = run_sweep(spec)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def cmd_oracle_check(args, out):
    bath = bath_from_args(args)
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    try:
        cmp = compare_with_channel(
            bath, args.t_final, dim=args.dim, dt=args.dt, samples=args.samples, alpha0=args.alpha
        )
    except TruncationError as exc:
        out.write(_dumps({"error": "truncation", "message": str(exc), "time": exc.time}) + "\n")
        return EXIT_NUMERICAL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    passed = cmp.max_deviation <= ORACLE_TOL
    out.write(
        _dumps(
            {
                "bath": bath.to_dict(),
                "dim": args.dim,
                "t_final": args.t_final,
                "max_deviation": cmp.max_deviation,
                "trace_drift": cmp.trace_drift,
                "bridge_scale": BRIDGE_SCALE,
                "tolerance": ORACLE_TOL,
                "passed": passed,
            }
        )
        + "\n"
    )
    return EXIT_OK if passed else EXIT_NEGATIVE


def build_parser():
    p = _Parser(prog="gaussian-esd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="physicality, classicality and separability of a state file")
    v.add_argument("state")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("evolve", help="CSV trajectory of V(t) under identical local baths")
    _add_state_flags(e, positional=True)
    _add_bath_flags(e)
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--samples", type=int, default=11)
    e.set_defaults(func=cmd_evolve)

    t = sub.add_parser("times", help="classicality, ESD and bound times as JSON")
    _add_state_flags(t, positional=False)
    _add_bath_flags(t)
    t.add_argument("--horizon", type=float, default=None)
    t.set_defaults(func=cmd_times)

    s = sub.add_parser("sweep", help="parameter sweep from a JSON spec to CSV")
    s.add_argument("spec")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle-check", help="Fock-space oracle vs channel covariances")
    _add_bath_flags(o)
    o.add_argument("--dim", type=int, default=DEFAULT_DIM)
    o.add_argument("--t-final", dest="t_final", type=float, default=2.0)
    o.add_argument("--dt", type=float, default=None)
    o.add_argument("--samples", type=int, default=21)
    o.add_argument("--alpha", type=float, default=0.0, help="real coherent amplitude of the initial state")
    o.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"gaussian-esd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
