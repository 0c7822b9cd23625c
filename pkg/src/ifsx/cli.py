"""Command-line interface.

Exit codes: 0 success, 1 bad input (malformed config or file, dimension
mismatch), 2 the computation ran but did not succeed (no convergence, failed
audit, builder error, target missed, separation violated).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .geometry import DimensionError, hausdorff_distance
from .hutchinson import attractor
from .polygonal import NotConvergedError, approximation_study
from .verify import inversion_distance, separation_search

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2

DEFAULTS = {"tol": 1e-6, "resolution": 1e-4, "max_iter": 1_000_000}

# keys each command accepts from a config file; flags use the same names
CONFIG_KEYS = {
    "attractor": {"maps", "tol", "resolution", "max_iter"},
    "approx": {"maps", "tol", "resolution", "max_iter", "k_schedule", "target"},
    "witness": {"kind", "n", "depth"},
    "search": {"trials", "seed", "tol", "resolution", "max_iter"},
}


class InputError(Exception):
    pass


def _k_schedule(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _settings(args, command: str) -> dict:
    """Config file values overridden by flags that were given."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        unknown = set(cfg) - CONFIG_KEYS[command]
        if unknown:
            raise InputError(f"unknown config keys for {command}: {sorted(unknown)}")
    out = {k: v for k, v in DEFAULTS.items() if k in CONFIG_KEYS[command]}
    out.update(cfg)
    for key in CONFIG_KEYS[command]:
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _system(settings: dict):
    from .formats import system_from_config

    try:
        return system_from_config(settings)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise InputError(f"malformed system: {exc}") from None


def _number(settings: dict, key: str, kind=float):
    try:
        v = kind(settings[key])
    except (TypeError, ValueError):
        raise InputError(f"{key} must be a number") from None
    if not v > 0:
        raise InputError(f"{key} must be positive")
    return v


def _write(path, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_attractor(args) -> int:
    from .formats import format_points

    s = _settings(args, "attractor")
    system = _system(s)
    tol, r = _number(s, "tol"), _number(s, "resolution")
    res = attractor(system, tol=tol, max_iter=_number(s, "max_iter", int), resolution=r)
    a = res.attractor
    _write(args.out, format_points(a, comment=f"dim={a.dim} resolution={a.resolution:.17g}"))
    summary = (
        f"points={len(a)} iterations={res.iterations} residual={res.residual:.6g} "
        f"final_step={res.final_step:.6g} converged={str(res.converged).lower()}\n"
    )
    (sys.stdout if args.out else sys.stderr).write(summary)
    if args.figure:
        from .plotting import render_points

        if a.dim <= 2:
            render_points(a, args.figure)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_hausdorff(args) -> int:
    from .formats import read_points

    try:
        a, b = read_points(args.a), read_points(args.b)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    try:
        rep = hausdorff_distance(a, b)
    except DimensionError as exc:
        raise InputError(str(exc)) from None

    def pt(p):
        return "(" + ", ".join(f"{v:.17g}" for v in p) + ")"

    print(f"distance={rep.distance:.17g}")
    print(f"directed_ab={rep.directed_ab:.17g} witness {pt(rep.witness_ab[0])} -> {pt(rep.witness_ab[1])}")
    print(f"directed_ba={rep.directed_ba:.17g} witness {pt(rep.witness_ba[0])} -> {pt(rep.witness_ba[1])}")
    return EXIT_OK


def cmd_approx(args) -> int:
    s = _settings(args, "approx")
    system = _system(s)
    ks = s.get("k_schedule")
    if not isinstance(ks, list) or not ks:
        raise InputError("approx needs a k_schedule")
    target = float(s.get("target", 0.02))
    try:
        study = approximation_study(
            system,
            [int(k) for k in ks],
            tol=_number(s, "tol"),
            resolution=_number(s, "resolution"),
            max_iter=_number(s, "max_iter", int),
        )
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write(args.out, study.to_csv())
    final = study.entries[-1].hausdorff
    if args.figure:
        from .plotting import render_study

        render_study([e.k for e in study.entries], study.distances(), args.figure)
    print(f"final_k={study.entries[-1].k} hausdorff={final:.6g} target={target:g}", file=sys.stderr)
    return EXIT_OK if final <= target else EXIT_FAIL


def cmd_witness(args) -> int:
    from .formats import dumps, witness_to_dict
    from .witnesses import WitnessError, build_interval_witness, build_ladder, build_prop_p

    s = _settings(args, "witness")
    kind = s.get("kind")
    try:
        if kind == "prop-p":
            w = build_prop_p(int(s.get("depth", 3)))
        elif kind == "ladder":
            w = build_ladder(int(s.get("n", 2)))
        elif kind == "intervals":
            w = build_interval_witness(int(s.get("depth", 4)))
        else:
            raise InputError(f"unknown witness kind {kind!r}; use prop-p, ladder or intervals")
    except WitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args.out, dumps(witness_to_dict(w)))
    failed = [i.condition for i in w.audit.failures()]
    msg = "all audits passed" if not failed else f"failed audits: {', '.join(failed)}"
    print(f"{kind}: {msg}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_search(args) -> int:
    from .formats import dumps, finite_or_none, ladder_from_dict, system_to_config

    s = _settings(args, "search")
    try:
        F, delta, n, own = ladder_from_dict(json.loads(Path(args.witness).read_text()))
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    trials = int(s.get("trials", 10_000))
    seed = int(s.get("seed", 42))
    if trials < 0:
        raise InputError("trials must be non-negative")
    tol, r = _number(s, "tol"), _number(s, "resolution")
    rep = separation_search(F, float(delta), n, trials, seed, tol=tol, resolution=r, max_iter=_number(s, "max_iter", int))
    inv = inversion_distance(F, own, tol=tol, resolution=r)
    report = {
        "seed": rep.seed,
        "trials": rep.trials,
        "maps_per_system": n,
        "best_distance": finite_or_none(rep.best_distance),
        "best_trial": rep.best_trial,
        "best_system": system_to_config(rep.best_system) if rep.best_system else None,
        "threshold": rep.threshold,
        "violated": rep.violated,
        "evaluated": rep.evaluated,
        "bounded": rep.bounded,
        "nonconverged": rep.nonconverged,
        "inversion_maps": len(own),
        "inversion_distance": inv,
    }
    _write(args.out, dumps(report))
    if args.trace:
        lines = ["trial,distance,status"]
        lines += [f"{t.trial},{t.distance:.17g},{t.status}" for t in rep.trace]
        Path(args.trace).write_text("\n".join(lines) + "\n")
    return EXIT_FAIL if rep.violated else EXIT_OK


def cmd_render(args) -> int:
    from .formats import read_points
    from .plotting import render_points

    try:
        a = read_points(args.csv)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if a.dim > 2:
        raise InputError(f"render draws d = 1 or d = 2 clouds, got d = {a.dim}")
    render_points(a, args.out, title=args.title)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ifsx", description="Attractors of (weak) iterated function systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def numeric(sp):
        sp.add_argument("--tol", type=float, help="convergence tolerance (default 1e-6)")
        sp.add_argument("--resolution", type=float, help="net radius (default 1e-4)")
        sp.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap (default 1e6)")

    sp = sub.add_parser("attractor", help="compute an attractor and write its points as CSV")
    sp.add_argument("--config", required=True, help="JSON system description")
    numeric(sp)
    sp.add_argument("--out", help="point CSV (default stdout)")
    sp.add_argument("--figure", help="also draw the attractor to this SVG file")
    sp.set_defaults(func=cmd_attractor)

    sp = sub.add_parser("hausdorff", help="Hausdorff distance between two point CSV files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_hausdorff)

    sp = sub.add_parser("approx", help="polygonal approximation study of a weak system")
    sp.add_argument("--config", required=True, help="JSON system description with k_schedule")
    numeric(sp)
    sp.add_argument("--k-schedule", dest="k_schedule", type=_k_schedule, help="comma-separated node counts")
    sp.add_argument("--out", help="study CSV (default stdout)")
    sp.add_argument("--figure", help="also plot distance against k to this SVG file")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("witness", help="build and audit an exact witness set")
    sp.add_argument("--config")
    sp.add_argument("--kind", choices=["prop-p", "ladder", "intervals"])
    sp.add_argument("--n", type=int, help="maps in the ladder comparison (ladder)")
    sp.add_argument("--depth", type=int, help="truncation depth (prop-p, intervals)")
    sp.add_argument("--out", help="witness JSON (default stdout)")
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("search", help="random separation search against a ladder witness")
    sp.add_argument("witness", help="ladder witness JSON")
    sp.add_argument("--config")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    numeric(sp)
    sp.add_argument("--out", help="report JSON (default stdout)")
    sp.add_argument("--trace", help="per-trial CSV trace")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("render", help="draw a d = 1 or d = 2 point CSV as SVG")
    sp.add_argument("csv")
    sp.add_argument("--out", required=True)
    sp.add_argument("--title")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
