"""Command-line driver.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 degenerate input
or an orbit that left the domain of the map.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import samples
from .coords import ABCoords, XYCoords, ab_to_xy, orbit, pentagram_ab, pentagram_xy, xy_to_ab
from .errors import (
    DegeneracyError,
    IndivisibilityViolated,
    MapUndefinedAtStep,
    PentagramError,
    UnsupportedN,
)
from .io import PolygonFile, PolygonFileError, encode_complex
from .lax import gauge_relation_check, monodromy_asymptotics_check, zero_curvature_residual
from .polygon import VertexChain, ab_from_chain, chain_from_ab, pentagram_step_geometric, xy_from_chain
from .spectral import (
    branch_points,
    casimir_map,
    chain_invariants,
    closed_polygon_relations,
    conservation_drift,
    invariants,
    is_closed,
    marked_point_limits,
    singularity_expansions_check,
)
from .symplectic import (
    bracket_invariance_check,
    casimir_check,
    genus_for,
    involution_check,
    omega_invariance_check,
    onleaf_inverse_check,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3

TOLERANCES = {
    "validity": 0.0,
    "zero_curvature_xy": 1e-10,
    "zero_curvature_ab": 1e-10,
    "conservation": 1e-9,
    "route_invariants": 1e-9,
    "route_map": 1e-9,
    "closed_form": 1e-12,
    "gauge_relation": 1e-10,
    "monodromy_asymptotics": 1e-10,
    "marked_points": 1e-6,
    "singularities": 1e-6,
    "genus": 0.0,
    "closed_relations": 1e-8,
    "geometric_agreement": 1e-9,
    "involution": 1e-8,
    "casimirs": 1e-8,
    "bracket_invariance": 1e-8,
    "onleaf_inverse": 1e-7,
    "omega_invariance": 1e-7,
    "periodicity": 1e-8,
}


def parse_n(text: str) -> list[int]:
    """'7', '4..9' or '4,5,7'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n specification {text!r}") from None
    if not out or min(out) < 4:
        raise argparse.ArgumentTypeError("n must be at least 4")
    return out


def parse_single_n(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n {text!r}") from None
    if n < 4:
        raise argparse.ArgumentTypeError("n must be at least 4")
    return n


def parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or key not in TOLERANCES:
            raise argparse.ArgumentTypeError(f"bad tolerance override {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad tolerance value in {item!r}") from None
    return out


# ------------------------------------------------------------ subjects


class Subject:
    """One polygon seen through every available coordinate system."""

    def __init__(self, obj):
        self.chain = self.ab = None
        if isinstance(obj, VertexChain):
            self.chain = obj
            self.xy = xy_from_chain(obj)
            if obj.n % 3:
                self.ab = ab_from_chain(obj)
        elif isinstance(obj, ABCoords):
            self.ab = obj
            with np.errstate(divide="ignore", invalid="ignore"):
                self.xy = ab_to_xy(obj)
        else:
            self.xy = obj
            if obj.n % 3:
                try:
                    with np.errstate(divide="ignore", invalid="ignore"):
                        self.ab = xy_to_ab(obj)
                except PentagramError:
                    # invalid coordinates have no preimage; the validity check reports them
                    self.ab = None
        self.source = obj
        self.n = self.xy.n

    def invariants(self):
        return chain_invariants(self.chain) if self.chain is not None else invariants(self.xy)

    def closed(self):
        return self.chain is not None and is_closed(self.chain)


def generate(n, kind, seed, closed=False, index=0):
    if closed:
        chain = samples.random_closed_chain(n, seed, index)
        if kind == "vertices":
            return chain
        if kind == "ab":
            return ab_from_chain(chain)
        return xy_from_chain(chain)
    if kind == "ab":
        return samples.random_ab(n, seed, index)
    if kind == "xy":
        return samples.random_xy(n, seed, index)
    return samples.random_twisted_chain(n, seed, index)


# ------------------------------------------------------------ checks


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


def _shift_distance(state, ref):
    """Smallest relative distance between state and a cyclic shift of ref."""
    best = (np.inf, None)
    scale = max(1.0, np.abs(ref.x).max(), np.abs(ref.y).max())
    for s in range(ref.n):
        d = max(np.abs(np.roll(ref.x, -s) - state.x).max(), np.abs(np.roll(ref.y, -s) - state.y).max()) / scale
        best = min(best, (float(d), s))
    return best


def verification_checks(subject: Subject, steps: int, z_samples) -> dict:
    """name -> zero-argument callable returning a residual (float or int)."""
    xy, ab, n = subject.xy, subject.ab, subject.n
    checks = {
        "validity": lambda: len(subject.source.validity_issues()),
        "zero_curvature_xy": lambda: zero_curvature_residual(xy, "xy", z_samples),
        "conservation": lambda: conservation_drift(orbit(xy, steps)),
        "singularities": lambda: singularity_expansions_check(invariants(xy))["max_residual"],
        "genus": _genus_check(subject),
        "involution": lambda: involution_check(xy)["max_relative"],
        "casimirs": lambda: _casimir_residual(xy),
        "bracket_invariance": lambda: bracket_invariance_check(xy),
        "onleaf_inverse": lambda: _onleaf_residual(xy),
        "omega_invariance": lambda: omega_invariance_check(xy)["residual"],
    }
    if ab is not None:
        checks.update(
            {
                "zero_curvature_ab": lambda: zero_curvature_residual(ab, "ab", z_samples),
                "route_invariants": lambda: _rel(invariants(xy_to_ab(xy)).vector(), invariants(xy).vector()),
                "route_map": lambda: _rel(ab_to_xy(pentagram_ab(ab)).x, pentagram_xy(ab_to_xy(ab)).x)
                + _rel(ab_to_xy(pentagram_ab(ab)).y, pentagram_xy(ab_to_xy(ab)).y),
                "closed_form": lambda: _closed_form_residual(ab),
                "gauge_relation": lambda: gauge_relation_check(ab),
                "monodromy_asymptotics": lambda: monodromy_asymptotics_check(ab)["max_residual"],
                "marked_points": lambda: marked_point_limits(ab)["max_residual"],
            }
        )
    if subject.chain is not None:
        chain = subject.chain
        checks["geometric_agreement"] = lambda: max(
            _rel(xy_from_chain(pentagram_step_geometric(chain)).x, pentagram_xy(xy_from_chain(chain)).x),
            _rel(xy_from_chain(pentagram_step_geometric(chain)).y, pentagram_xy(xy_from_chain(chain)).y),
        )
        if subject.closed():
            checks["closed_relations"] = lambda: float(np.abs(closed_polygon_relations(subject.invariants())).max())
            if n == 5:
                checks["periodicity"] = lambda: _pentagon_period_residual(xy)
    return checks


def expected_genus(n, closed):
    if closed:
        return n - 5 if n % 2 == 0 else n - 4
    return genus_for(n)


def _genus_check(subject):
    def run():
        g = branch_points(subject.invariants()).genus
        return abs(g - expected_genus(subject.n, subject.closed()))

    return run


def _casimir_residual(xy):
    c = casimir_check(xy)
    if c["independent_casimirs"] != c["kernel_dimension"]:
        return float("inf")
    return c["residual"]


def _onleaf_residual(xy):
    c = onleaf_inverse_check(xy)
    if not c["rank_P"] == c["rank_A_on_leaf"] == c["two_g"]:
        return float("inf")
    return max(c["residual"], c["PAP_minus_P"])


def _closed_form_residual(ab):
    inv = invariants(ab)
    n = ab.n
    return max(_rel(inv.I[-1], np.prod(ab.a)), _rel(inv.J[-1], (-1) ** n * np.prod(ab.b)))


def _pentagon_period_residual(xy):
    orb = orbit(xy, 5)
    one, _ = _shift_distance(orb[1], xy)
    five = _rel(orb[5].x, xy.x) + _rel(orb[5].y, xy.y)
    return max(one, five)


def run_checks(checks: dict, tolerances: dict) -> dict:
    out = {}
    for name in sorted(checks):
        tol = tolerances[name]
        entry = {"tolerance": tol}
        try:
            with np.errstate(all="ignore"):
                value = float(checks[name]())
            entry["value"] = value
            entry["pass"] = bool(np.isfinite(value) and value <= tol)
        except (PentagramError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
            entry["value"] = None
            entry["pass"] = False
            entry["error"] = f"{type(exc).__name__}: {exc}"
        out[name] = entry
    return out


def default_z_samples(seed):
    rng = samples.rng_for(0 if seed is None else seed, index=1)
    return list(np.exp(rng.uniform(-1, 1, 5) + 2j * np.pi * rng.uniform(size=5)))


# ------------------------------------------------------------ svg


_FRAME = np.array([[-1.0, -1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, 1.0], [-1.0, 1.0, 1.0]])


def _frame_basis(p):
    """Matrix sending e1, e2, e3, e1+e2+e3 to the four points p[0..3]."""
    A = np.column_stack(p[:3])
    lam = np.linalg.solve(A, p[3])
    return A * lam


def frame_normalizer(chain):
    """Projective map taking vertices 0..3 to the corners of the square [-1, 1]^2."""
    src = _frame_basis([chain.vector(k) for k in range(4)])
    return _frame_basis(_FRAME) @ np.linalg.inv(src)


def drawing_orbit(chain, steps):
    """Chains along the orbit, each moved projectively into a standard frame.

    When n is not divisible by 3 the orbit is computed in (a, b) coordinates
    and each chain is rebuilt from them, which stays well conditioned even
    when vertices run off towards infinity. Otherwise the geometric map is
    iterated directly. The map commutes with projective transformations, so
    the renormalization does not change the orbit in moduli space.
    """
    stopped = None
    chains = []
    if chain.n % 3:
        try:
            states = orbit(ab_from_chain(chain), steps)
        except MapUndefinedAtStep as exc:
            states = exc.orbit
            stopped = {"step": exc.step, "reason": str(exc.cause)}
        raw = []
        for t, ab in enumerate(states):
            try:
                # drawing only needs the vertices, not a genericity guarantee
                raw.append(chain_from_ab(ab, check=False))
            except DegeneracyError as exc:
                stopped = {"step": t, "reason": f"{type(exc).__name__}: {exc}"}
                break
    else:
        raw = [chain]
        for t in range(steps):
            try:
                nxt = pentagram_step_geometric(raw[-1])
                raw.append(nxt.transformed(frame_normalizer(nxt)))
            except (DegeneracyError, np.linalg.LinAlgError) as exc:
                stopped = {"step": t, "reason": f"{type(exc).__name__}: {exc}"}
                break
    for c in raw:
        try:
            chains.append(c.transformed(frame_normalizer(c)))
        except (DegeneracyError, np.linalg.LinAlgError):
            chains.append(c)
    return chains, stopped


def render_svg(chains, stride=1, closed=False) -> str:
    size = 1000
    shown = chains[::stride]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for k, chain in enumerate(shown):
        opacity = 0.15 + 0.85 * (k + 1) / len(shown)
        count = chain.n + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            pts = np.array([chain.vector(j)[:2] / chain.vector(j)[2] for j in range(count)]).real
        pts = np.nan_to_num(pts, nan=0.0, posinf=2.4, neginf=-2.4)
        pts = np.clip(pts, -2.4, 2.4)
        xs = size / 2 + 0.2 * size * pts[:, 0]
        ys = size / 2 - 0.2 * size * pts[:, 1]
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        tag = "polygon" if closed else "polyline"
        if closed:
            path = " ".join(path.split(" ")[:-1])
        lines.append(f'<{tag} points="{path}" fill="none" stroke="#1f4e8c" stroke-opacity="{opacity:.3f}" stroke-width="1.5"/>')
        for x, y in zip(xs[: chain.n], ys[: chain.n]):
            lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#b03020" fill-opacity="{opacity:.3f}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ commands


def _load(path):
    return PolygonFile.read(path)


def _subject_of(pf: PolygonFile) -> Subject:
    return Subject(pf.to_object())


def cmd_random(args):
    obj = generate(args.n, args.kind, args.seed, closed=args.closed)
    pf = PolygonFile.from_object(obj, seed=args.seed)
    if args.closed:
        pf.extra["closed"] = True
    return pf.dumps(), EXIT_OK


def _invariant_record(inv):
    return {"I": encode_complex(inv.I), "J": encode_complex(inv.J), "C": encode_complex(inv.C)}


def cmd_iterate(args):
    pf = _load(args.file)
    obj = pf.to_object()
    if args.format == "svg":
        if isinstance(obj, VertexChain):
            chain = obj
        else:
            ab = obj if isinstance(obj, ABCoords) else xy_to_ab(obj)
            chain = chain_from_ab(ab)
        chains, stopped = drawing_orbit(chain, args.steps)
        complex_input = bool(np.abs(np.asarray(chain.vectors).imag).max() > 1e-12)
        svg = render_svg(chains, args.stride, closed=is_closed(chain))
        report = {"command": "iterate", "format": "svg", "steps_rendered": len(chains) - 1, "complex": complex_input}
        if stopped:
            report["stopped"] = stopped
        if complex_input:
            report["warning"] = "complex polygon: real parts rendered"
        if args.report:
            with open(args.report, "w") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
        return svg, EXIT_OK
    subject = Subject(obj)
    state = subject.xy if subject.chain is not None or isinstance(obj, XYCoords) else subject.ab
    try:
        states = orbit(state, args.steps)
        status = EXIT_OK
        failure = None
    except MapUndefinedAtStep as exc:
        states, status = exc.orbit, EXIT_DEGENERATE
        failure = {"step": exc.step, "reason": str(exc.cause)}
    ref = invariants(states[0]).vector()
    records = []
    for t, s in enumerate(states):
        inv = invariants(s)
        rec = {"t": t, "invariants": _invariant_record(inv), "drift": _rel(inv.vector(), ref)}
        if isinstance(s, XYCoords):
            d, shift = _shift_distance(s, states[0])
            if t > 0 and d <= TOLERANCES["periodicity"]:
                rec["cyclic_shift_of_initial"] = shift
        records.append(rec)
    report = {
        "command": "iterate",
        "inputs": {"file": args.file, "steps": args.steps, "kind": pf.kind, "n": pf.n, "seed": pf.seed},
        "coordinates": "xy" if isinstance(state, XYCoords) else "ab",
        "steps": records,
        "drift": conservation_drift(states) if len(states) > 1 else 0.0,
    }
    if failure:
        report["failure"] = failure
    return json.dumps(report, indent=2, sort_keys=True) + "\n", status


def cmd_invariants(args):
    subject = _subject_of(_load(args.file))
    inv = subject.invariants()
    report = {
        "command": "invariants",
        "n": subject.n,
        "invariants": _invariant_record(inv),
        "casimirs": {k: encode_complex(v) for k, v in casimir_map(inv).items()},
    }
    if subject.ab is not None:
        report["ab_invariants"] = _invariant_record(invariants(subject.ab))
    return json.dumps(report, indent=2, sort_keys=True) + "\n", EXIT_OK


def cmd_curve(args):
    subject = _subject_of(_load(args.file))
    closed = subject.closed()
    curve = branch_points(subject.invariants())
    report = {
        "command": "curve",
        "n": subject.n,
        "closed": closed,
        "genus": curve.genus,
        "expected_genus": expected_genus(subject.n, closed),
        "branch_points_finite": curve.nu_finite,
        "branching_total": curve.nu_total,
        "discriminant_zero_order": curve.discriminant_zero_order,
        "singular_points": [
            {"z": encode_complex(p["z"]), "k": encode_complex(p["k"]), "kind": p["kind"]} for p in curve.singular_points
        ],
        "branch_z": encode_complex(curve.branch_z),
    }
    status = EXIT_OK if curve.genus == report["expected_genus"] else EXIT_FAIL
    return json.dumps(report, indent=2, sort_keys=True) + "\n", status


def cmd_closed(args):
    results = []
    ok = True
    for n in args.n:
        chain = samples.random_closed_chain(n, args.seed)
        control = samples.random_twisted_chain(n, args.seed)
        inv = chain_invariants(chain)
        rel = float(np.abs(closed_polygon_relations(inv)).max())
        ctrl = float(np.abs(closed_polygon_relations(chain_invariants(control))).max())
        entry = {"n": n, "relations_residual": rel, "twisted_control_residual": ctrl}
        passed = rel < TOLERANCES["closed_relations"] and ctrl > 1e-2
        try:
            genus = branch_points(inv).genus
            entry["genus"] = genus
            entry["expected_genus"] = expected_genus(n, True)
            passed = passed and genus == entry["expected_genus"]
        except PentagramError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            passed = False
        if n == 5:
            entry["periodicity_residual"] = _pentagon_period_residual(xy_from_chain(chain))
            passed = passed and entry["periodicity_residual"] < TOLERANCES["periodicity"]
        entry["pass"] = bool(passed)
        ok = ok and passed
        results.append(entry)
    report = {"command": "closed", "seed": args.seed, "results": results, "pass": ok}
    return json.dumps(report, indent=2, sort_keys=True) + "\n", EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args):
    tolerances = {**TOLERANCES, **args.tol_override}
    start = time.perf_counter()
    if args.file:
        pf = _load(args.file)
        jobs = [(pf.n, pf.seed, pf.to_object())]
    else:
        seeds = [args.seed + k for k in range(args.seeds)]
        jobs = []
        for n in args.n:
            kind = args.kind if not (args.kind == "ab" and n % 3 == 0) else "xy"
            if args.closed and n < 5:
                continue
            for seed in seeds:
                # closedness is only visible through vertices
                jobs.append((n, seed, generate(n, "vertices" if args.closed else kind, seed, closed=args.closed)))
    results = []
    for n, seed, obj in jobs:
        checks = verification_checks(Subject(obj), args.steps, default_z_samples(seed))
        outcome = run_checks(checks, tolerances)
        results.append({"n": n, "seed": seed, "checks": outcome, "pass": all(c["pass"] for c in outcome.values())})
    results.sort(key=lambda r: (r["n"], -1 if r["seed"] is None else r["seed"]))
    report = {
        "command": "verify",
        "inputs": {"file": args.file, "steps": args.steps, "tolerances": tolerances},
        "results": results,
        "pass": all(r["pass"] for r in results),
        "timing": {"seconds": time.perf_counter() - start},
    }
    return json.dumps(report, indent=2, sort_keys=True) + "\n", EXIT_OK if report["pass"] else EXIT_FAIL


# ------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="pentagram", description="Pentagram map experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("random", parents=[common], help="generate a seeded polygon file")
    r.add_argument("--n", type=parse_single_n, required=True)
    r.add_argument("--kind", choices=["ab", "xy", "vertices"], default="xy")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--closed", action="store_true", help="plane polygon with identity monodromy")
    r.set_defaults(func=cmd_random)

    it = sub.add_parser("iterate", parents=[common], help="iterate the map from a polygon file")
    it.add_argument("file")
    it.add_argument("--steps", type=int, default=10)
    it.add_argument("--format", choices=["json", "svg"], default="json")
    it.add_argument("--stride", type=int, default=1)
    it.add_argument("--report", help="with --format svg, also write a JSON report here")
    it.set_defaults(func=cmd_iterate)

    inv = sub.add_parser("invariants", parents=[common], help="spectral invariants and Casimirs")
    inv.add_argument("file")
    inv.set_defaults(func=cmd_invariants)

    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("file", nargs="?")
    v.add_argument("--n", type=parse_n, default=[7], help="'7', '4..9' or '4,5,7'")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    v.add_argument("--kind", choices=["ab", "xy", "vertices"], default="xy")
    v.add_argument("--closed", action="store_true")
    v.add_argument("--steps", type=int, default=100)
    v.add_argument("--tol-override", dest="tol_override", action="append", default=[], metavar="KEY=VALUE")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curve", parents=[common], help="branch points and genus of the spectral curve")
    c.add_argument("file")
    c.set_defaults(func=cmd_curve)

    cl = sub.add_parser("closed", parents=[common], help="closed-polygon experiment")
    cl.add_argument("--n", type=parse_n, default=[5])
    cl.add_argument("--seed", type=int, default=0)
    cl.set_defaults(func=cmd_closed)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        try:
            args.tol_override = parse_overrides(args.tol_override)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    if getattr(args, "steps", 1) < 0 or getattr(args, "stride", 1) < 1:
        parser.error("--steps must be nonnegative and --stride positive")
    try:
        text, status = args.func(args)
    except PolygonFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnsupportedN, IndivisibilityViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PentagramError as exc:
        print(f"degenerate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
