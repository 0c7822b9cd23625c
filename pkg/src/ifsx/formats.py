"""Point CSV files and the structured-text (JSON) system and witness formats.

Point files hold one point per line, coordinates separated by commas, no
header; lines starting with ``#`` are comments. Numbers are written with 17
significant digits so a round trip is lossless. Exact rationals travel as
``"p/q"`` strings.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .geometry import CompactSet
from .hutchinson import FunctionSystem
from .maps import map_from_config, map_to_config
from .witnesses import AuditReport, IntervalWitness, LadderWitness, PropPWitness


def q(v) -> str | float:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return f"{v}/1"
    return float(v)


def parse_points(text: str) -> CompactSet:
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = [float(c) for c in line.split(",")]
        except ValueError:
            raise ValueError(f"line {lineno}: not a comma-separated list of numbers") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"line {lineno}: expected {width} coordinates, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ValueError("no points in input")
    return CompactSet.from_points(np.array(rows), dim=width)


def read_points(path) -> CompactSet:
    return parse_points(Path(path).read_text())


def format_points(a: CompactSet, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    for row in a.points:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_points(path, a: CompactSet, comment: str | None = None) -> None:
    Path(path).write_text(format_points(a, comment))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def finite_or_none(x: float):
    return x if math.isfinite(x) else None


def system_from_config(cfg: dict) -> FunctionSystem:
    maps = cfg.get("maps")
    if not isinstance(maps, list) or not maps:
        raise ValueError("config needs a nonempty 'maps' list")
    return FunctionSystem.of([map_from_config(m) for m in maps])


def system_to_config(sys: FunctionSystem) -> list[dict]:
    return [map_to_config(m) for m in sys.maps]


def _audit(report: AuditReport) -> list[dict]:
    out = []
    for item in report:
        out.append(
            {
                "condition": item.condition,
                "pass": bool(item.passed),
                "margin": None if item.margin is None else q(item.margin),
                "note": item.note,
            }
        )
    return out


def witness_to_dict(w) -> dict:
    if isinstance(w, PropPWitness):
        return {
            "kind": "prop_p",
            "depth": w.depth,
            "counts": list(w.counts),
            "interval_tops": [q(t) for t in w.interval_tops],
            "points": [q(x) for x in w.points],
            "sentinel": q(w.sentinel),
            "maps": system_to_config(w.system),
            "audit": _audit(w.audit),
            "metadata": {
                "truncation": "X is closed under g except its last point, which g sends to the sentinel; "
                "invariance is checked as g[X minus sentinel] u h[X] = X",
            },
        }
    if isinstance(w, LadderWitness):
        return {
            "kind": "ladder",
            "n": w.n,
            "k": w.k,
            "a": [q(v) for v in w.a],
            "b": [q(v) for v in w.b],
            "delta": q(w.delta),
            "blocks": [[q(x) for x in blk] for blk in w.x],
            "maps": system_to_config(w.system),
            "audit": _audit(w.audit),
        }
    if isinstance(w, IntervalWitness):
        return {
            "kind": "intervals",
            "depth": w.depth,
            "k_seq": list(w.k_seq),
            "lengths": [q(v) for v in w.lengths],
            "anchor": q(w.anchor),
            "tail_bound": q(w.tail_bound),
            "intervals": [[[q(lo), q(hi)] for lo, hi in grp] for grp in w.intervals],
            "maps": [],
            "audit": _audit(w.audit),
        }
    raise TypeError(f"not a witness: {type(w).__name__}")


def ladder_from_dict(d: dict) -> tuple[CompactSet, Fraction, int, FunctionSystem]:
    """Target set, delta, n and generating system of an exported ladder."""
    if d.get("kind") != "ladder":
        raise ValueError(f"expected a ladder witness, got kind {d.get('kind')!r}")
    try:
        pts = [Fraction(x) for blk in d["blocks"] for x in blk]
        delta = Fraction(d["delta"])
        n = int(d["n"])
        sys = system_from_config(d)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed ladder witness: {exc}") from None
    F = CompactSet.from_points(np.array([float(x) for x in pts]).reshape(-1, 1))
    return F, delta, n, sys
