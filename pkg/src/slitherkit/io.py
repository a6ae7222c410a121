"""JSON map literals and representation files.

Map literal::

    {"type": "rotation", "theta": t}
    {"type": "pl", "breaks": [[x0, y0], ...]}
    {"type": "moebius", "m": [a, b, c, d], "winding": k}

Numbers may be JSON numbers or strings such as "1/3"; strings and integers
are read exactly.  A representation file is
``{"generators": {"a": <map>, ...}, "relators": ["a b A B", ...]}``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .circle_homeo import GroupRepresentation, InvalidMapError, LiftedCircleMap, format_word, parse_word
from .hyperbolic import FuchsianGroup, Moebius, MoebiusLift, lift_action, moebius_of, winding_of


def _number(v):
    if isinstance(v, bool):
        raise InvalidMapError(f"not a number: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError:
            raise InvalidMapError(f"not a number: {v!r}") from None
    if isinstance(v, float):
        return v
    raise InvalidMapError(f"not a number: {v!r}")


def _plain(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def map_from_literal(obj) -> LiftedCircleMap:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidMapError("map literal must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "rotation":
        return LiftedCircleMap.rotation(_number(obj["theta"]))
    if kind == "pl":
        return LiftedCircleMap.pl([(_number(x), _number(y)) for x, y in obj["breaks"]])
    if kind == "moebius":
        m = np.array([float(v) for v in obj["m"]], dtype=float).reshape(2, 2)
        return lift_action(MoebiusLift(Moebius(m), int(obj.get("winding", 0))))
    raise InvalidMapError(f"unknown map type {kind!r}")


def map_to_literal(f: LiftedCircleMap) -> dict:
    g = moebius_of(f)
    if g is not None:
        return {"type": "moebius", "m": [float(v) for v in g.m.ravel()], "winding": winding_of(f)}
    if f.kind == "rotation":
        return {"type": "rotation", "theta": _plain(f.theta)}
    if f.kind == "pl":
        return {"type": "pl", "breaks": [[_plain(x), _plain(y)] for x, y in f.breaks]}
    raise InvalidMapError("sampled maps without a Möbius rule have no literal form")


def _read_json(source):
    if isinstance(source, (dict, list)):
        return source
    text = str(source)
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def load_map(source) -> LiftedCircleMap:
    return map_from_literal(_read_json(source))


def representation_from_dict(obj: dict) -> GroupRepresentation:
    gens = {name: map_from_literal(lit) for name, lit in obj["generators"].items()}
    for name in gens:
        if name != name.lower():
            raise InvalidMapError(f"generator names must be lowercase: {name!r}")
    relators = tuple(parse_word(r, gens) for r in obj.get("relators", []))
    return GroupRepresentation(gens, relators)


def load_representation(source) -> GroupRepresentation:
    return representation_from_dict(_read_json(source))


def representation_to_dict(rep: GroupRepresentation) -> dict:
    return {"generators": {n: map_to_literal(f) for n, f in rep.generators.items()},
            "relators": [format_word(w) for w in rep.relators]}


def dump_representation(rep: GroupRepresentation, path) -> None:
    Path(path).write_text(json.dumps(representation_to_dict(rep), indent=2) + "\n")


def fuchsian_from_representation(rep: GroupRepresentation) -> FuchsianGroup:
    """Recover the Möbius group behind a Möbius-backed representation."""
    gens = {}
    for n, f in rep.generators.items():
        g = moebius_of(f)
        if g is None:
            raise InvalidMapError(f"generator {n!r} is not a Möbius map")
        gens[n] = g
    relator = rep.relators[0] if rep.relators else ()
    return FuchsianGroup(gens, relator, len(gens) // 2)
