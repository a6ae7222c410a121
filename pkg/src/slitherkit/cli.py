"""Command-line front end.  Every command prints a JSON report.

Exit codes: 0 clean pass, 1 violation, 2 inconclusive only, 64 usage error.
"""
from __future__ import annotations

import argparse
import contextlib
import functools
import io as _io
import json
import math
import re
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

EXIT_PASS, EXIT_VIOLATION, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-4,4" and "-1/3" through as values
        self._negative_number_matcher = re.compile(r"^-[\d.]+([,/][-\d.]+)*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _floats(text: str, n: int | None = None) -> list:
    vals = [float(Fraction(v)) for v in text.split(",")]
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
    return vals


def _exact_list(text: str) -> list:
    return [Fraction(v) for v in text.split(",")]


def _code(status: str) -> int:
    return {"pass": EXIT_PASS, "violation": EXIT_VIOLATION, "fail": EXIT_VIOLATION}.get(status, EXIT_INCONCLUSIVE)


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, default=_json_default))


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "item"):
        return v.item()
    if hasattr(v, "tolist"):
        return v.tolist()
    return str(v)


# -- handlers -------------------------------------------------------------------------------

def cmd_rot(args):
    from .io import load_map
    from .rotation import rotation_number

    enc = rotation_number(load_map(args.map), n_iter=args.iters)
    _emit({"status": "pass", "enclosure": enc.to_dict()})
    return EXIT_PASS


def cmd_classify(args):
    from .io import load_map
    from .rotation import UNRESOLVED, classify, rotation_number

    f = load_map(args.map)
    kind = classify(f)
    _emit({"status": "inconclusive" if kind == UNRESOLVED else "pass", "class": kind,
           "enclosure": rotation_number(f, 2000).to_dict()})
    return EXIT_INCONCLUSIVE if kind == UNRESOLVED else EXIT_PASS


def cmd_verify_commutator(args):
    from .errors import PreconditionError
    from .io import load_map
    from .rotation import verify_commutator_bound

    a, b, c = (load_map(s) for s in (args.a, args.b, args.c))
    try:
        report = verify_commutator_bound(a, b, c, samples=args.samples).to_dict()
    except PreconditionError as e:
        _emit({"status": "precondition-failed", "error": str(e), "witness": e.witness})
        return EXIT_USAGE
    _emit(report)
    return _code(report["status"])


def _status_of_report(d: dict) -> str:
    """Re-derive the status of a stored report from its counters, never trusting its label."""
    parts = [v for v in d.values() if isinstance(v, dict) and "violations" in v] or [d]
    if any(p.get("violations") for p in parts):
        return "violation"
    for p in parts:
        counted = p.get("passes", 0) + p.get("inconclusive", 0) + len(p.get("violations", []))
        if "checked" in p and p["checked"] != counted:
            return "violation"  # counters do not balance: the report cannot be trusted
    if any(p.get("inconclusive") for p in parts):
        return "inconclusive"
    return "pass"


def cmd_verify_milnor_wood(args):
    if args.report:
        d = json.loads(Path(args.report).read_text())
        status = _status_of_report(d)
        _emit({"status": status, "source": args.report})
        return _code(status)
    if not args.rep:
        raise ValueError("verify milnor-wood needs a rep-file or --report")
    from .io import load_representation
    from .rotation import verify_milnor_wood

    rep = load_representation(args.rep)
    names = list(rep.generators)
    if args.pairs:
        pairs = [tuple(p.split(":")) for p in args.pairs.split(",")]
    else:
        pairs = list(zip(names[0::2], names[1::2]))
    maps = [(rep.generators[a], rep.generators[b]) for a, b in pairs]
    report = verify_milnor_wood(maps, n_iter=args.iters).to_dict()
    report["pairs"] = [f"{a}:{b}" for a, b in pairs]
    _emit(report)
    return _code(report["status"])


def cmd_probe_spacelike(args):
    from .io import load_representation
    from .rotation import spacelike_probe

    out = spacelike_probe(load_representation(args.rep), args.max_len)
    status = "violation" if out.get("common_fixed_point") else (
        "pass" if not out.get("unresolved") else "inconclusive")
    out["status"] = status
    _emit(out)
    return _code(status)


def cmd_probe_uniformity(args):
    from .slither import uniformity_probe

    out = uniformity_probe(args.model, args.arc, args.budget)
    out["status"] = "pass"
    _emit(out)
    return EXIT_PASS


def cmd_probe_convergence(args):
    from .io import load_representation
    from .triples import Triple, TripleBox, proper_discontinuity_probe

    u, s, p, r = _floats(args.box, 4)
    out = proper_discontinuity_probe(load_representation(args.rep), TripleBox(Triple(u, s, p), r),
                                     args.max_len)
    out["status"] = "pass" if out["stabilized"] else "inconclusive"
    _emit(out)
    return _code(out["status"])


def cmd_fuchsian(args):
    from .hyperbolic import genus2_fuchsian, relator_winding
    from .io import dump_representation, representation_to_dict

    group = genus2_fuchsian()
    rep = group.representation()
    if args.emit:
        dump_representation(rep, args.emit)
    winding = relator_winding(group)
    _emit({"status": "pass", "genus": group.genus, "relator_error": group.relator_error(),
           "relator_winding": winding, "emitted": args.emit,
           "representation": None if args.emit else representation_to_dict(rep)})
    return EXIT_PASS


def cmd_model(args):
    from .hyperbolic import genus2_fuchsian
    from .slither import tangent_bundle_slithering, torus_slithering, verify_bundle_automorphism

    if args.kind == "torus":
        model = torus_slithering()
    else:
        if args.group != "genus2":
            raise ValueError(f"unknown group {args.group!r}")
        model = tangent_bundle_slithering(genus2_fuchsian())
    out = {"model": model.name, "status": "pass"}
    if args.verify:
        out.update(verify_bundle_automorphism(model))
    _emit(out)
    return _code(out["status"])


def cmd_z(args):
    from .slither import z_value

    r, t = Fraction(args.r), Fraction(args.t)
    _emit({"status": "pass", "r": str(r), "t": str(t), "z": z_value(r, t)})
    return EXIT_PASS


def cmd_triple_act(args):
    from .circle_homeo import word_evaluate
    from .io import load_representation
    from .triples import Triple, act_on_triple

    rep = load_representation(args.rep)
    t = Triple(*_floats(args.triple, 3))
    img = act_on_triple(word_evaluate(rep, args.word), t)
    _emit({"status": "pass", "lifted": img.to_list(), "canonical": img.canonical().to_list()})
    return EXIT_PASS


def cmd_triple_flow(args):
    from .triples import geodesic_flow_triple

    x, y = _floats(args.point, 2)
    direction = args.dir * (2 * math.pi if args.unit == "turns" else 1.0)
    t = geodesic_flow_triple(complex(x, y), direction)
    scale = 2 * math.pi if args.unit == "radians" else 1.0
    _emit({"status": "pass", "triple": t.to_list(scale), "unit": args.unit})
    return EXIT_PASS


def _matrix(text):
    from .currents import MonodromyAction

    a, b, c, d = (int(v) for v in text.split(","))
    return MonodromyAction(((a, b), (c, d)))


def cmd_current(args):
    from . import currents as cur

    if args.action == "intersect":
        from .io import fuchsian_from_representation, load_representation

        group = fuchsian_from_representation(load_representation(args.rep))
        mu = cur.GeodesicCurrent.surface(group, {args.mu: 1})
        nu = cur.GeodesicCurrent.surface(group, {args.nu: 1})
        res = cur.intersection_number(mu, nu, group, depth=args.depth).to_dict()
        res["status"] = "pass" if res["converged"] else "inconclusive"
        _emit(res)
        return _code(res["status"])
    Z = _matrix(args.matrix)
    if args.action == "growth":
        rep = cur.growth_factor(Z, cur.GeodesicCurrent.torus(_exact_list(args.seed)), args.k_max)
        out = rep.to_dict()
        out["status"] = "pass" if rep.converged else "inconclusive"
    elif args.action == "eigen":
        mu = cur.eigenmeasure(Z, cur.GeodesicCurrent.torus(_exact_list(args.seed)), args.N, eps=args.eps)
        out = {"status": "pass", "vector": list(mu.vector), "residual": cur.eigen_residual(Z, mu)}
    else:
        lo, hi = (int(v) for v in args.window.split(","))
        mu = cur.GeodesicCurrent.torus(_exact_list(args.mu))
        nu = cur.GeodesicCurrent.torus(_exact_list(args.nu))
        out = {"status": "pass", **cur.linking_series(mu, nu, Z, (lo, hi)).to_dict()}
    _emit(out)
    return _code(out["status"])


def cmd_render(args):
    from .render import SceneConfig, render

    cfg = SceneConfig(args.figure, args.leaves, args.seed, args.size, args.output)
    data = render(cfg)
    _emit({"status": "pass", "figure": cfg.figure, "bytes": len(data), "output": args.output})
    return EXIT_PASS


def cmd_verify_all(args):
    """Run each manifest entry through this CLI; the worst outcome decides the exit code."""
    path = Path(args.manifest)
    manifest = json.loads(path.read_text())
    entries = manifest["checks"] if isinstance(manifest, dict) else manifest
    rank = {EXIT_PASS: 0, EXIT_INCONCLUSIVE: 1, EXIT_VIOLATION: 2}
    results, worst = [], EXIT_PASS
    with tempfile.TemporaryDirectory() as tmp:
        places = {"{manifest_dir}": str(path.resolve().parent), "{tmp}": tmp}
        for entry in entries:
            argv = [functools.reduce(lambda a, kv: a.replace(*kv), places.items(), str(x)) for x in entry["argv"]]
            buf = _io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = main(argv)
            expected = entry.get("expect", EXIT_PASS)
            ok = code == expected
            effective = EXIT_PASS if ok else (code if code in rank else EXIT_VIOLATION)
            if rank[effective] > rank[worst]:
                worst = effective
            results.append({"name": entry.get("name", " ".join(argv)), "exit": code,
                            "expected": expected, "ok": ok})
    status = {EXIT_PASS: "pass", EXIT_VIOLATION: "violation"}.get(worst, "inconclusive")
    _emit({"status": status, "checks": results})
    return worst


# -- parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slitherkit", description="Circle actions, slitherings and geodesic currents.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("rot", help="rotation number enclosure of a map")
    s.add_argument("map", help="map literal file or inline JSON")
    s.add_argument("--iters", type=int, default=10_000)
    s.set_defaults(func=cmd_rot)

    s = sub.add_parser("classify", help="space-like / time-like class of a map")
    s.add_argument("map")
    s.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="inequality checks (commutator-bound, milnor-wood)")
    vs = v.add_subparsers(dest="check", metavar="CHECK", parser_class=_Parser)
    vs.required = True
    s = vs.add_parser("commutator-bound", help="c^-2 < [a,b] < c^2 for a, b commuting with c")
    for name in ("a", "b", "c"):
        s.add_argument(name)
    s.add_argument("--samples", type=int, default=256)
    s.set_defaults(func=cmd_verify_commutator)
    s = vs.add_parser("milnor-wood", help="|r(product of commutators)| < n + 1")
    s.add_argument("rep", nargs="?")
    s.add_argument("--pairs", help="a1:b1,a2:b2 (default: consecutive generators)")
    s.add_argument("--iters", type=int, default=10_000)
    s.add_argument("--report", help="re-check a stored JSON report instead")
    s.set_defaults(func=cmd_verify_milnor_wood)

    pr = sub.add_parser("probe", help="finite-depth probes (spacelike, uniformity, convergence)")
    ps = pr.add_subparsers(dest="probe", metavar="PROBE", parser_class=_Parser)
    ps.required = True
    s = ps.add_parser("spacelike", help="fixed points and time-like decompositions by word")
    s.add_argument("rep")
    s.add_argument("--max-len", type=int, default=3)
    s.set_defaults(func=cmd_probe_spacelike)
    s = ps.add_parser("uniformity", help="holonomy image lengths under growing path budgets")
    s.add_argument("--model", choices=("torus", "anosov"), default="torus")
    s.add_argument("--budget", type=float, default=50)
    s.add_argument("--arc", type=float, default=0.1)
    s.set_defaults(func=cmd_probe_uniformity)
    s = ps.add_parser("convergence", help="elements moving a triple box onto itself")
    s.add_argument("rep")
    s.add_argument("--box", default="0,0.03,0.06,0.0145", help="u,s,p,r")
    s.add_argument("--max-len", type=int, default=8)
    s.set_defaults(func=cmd_probe_convergence)

    f = sub.add_parser("fuchsian", help="surface groups")
    fs = f.add_subparsers(dest="group", metavar="GROUP", parser_class=_Parser)
    fs.required = True
    s = fs.add_parser("genus2", help="regular-octagon genus-2 group")
    s.add_argument("--emit", help="write the lifted generators as a representation file")
    s.set_defaults(func=cmd_fuchsian)

    s = sub.add_parser("model", help="slithering models")
    s.add_argument("kind", choices=("torus", "tangent-bundle"))
    s.add_argument("--group", default="genus2")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("z", help="z-function value z(r, t)")
    s.add_argument("r")
    s.add_argument("t")
    s.set_defaults(func=cmd_z)

    t = sub.add_parser("triple", help="ordered triples (act, flow)")
    ts = t.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
    ts.required = True
    s = ts.add_parser("act", help="apply a word to a triple")
    s.add_argument("rep")
    s.add_argument("word")
    s.add_argument("--triple", required=True, help="u,s,p")
    s.set_defaults(func=cmd_triple_act)
    s = ts.add_parser("flow", help="triple of a unit tangent vector")
    s.add_argument("--point", default="0,0", help="x,y in the disk")
    s.add_argument("--dir", type=float, default=0.0)
    s.add_argument("--unit", choices=("turns", "radians"), default="turns",
                   help="angle unit for --dir and the output triple (turns: period 1)")
    s.set_defaults(func=cmd_triple_flow)

    c = sub.add_parser("current", help="geodesic currents (intersect, growth, eigen, linking)")
    cs = c.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
    cs.required = True
    s = cs.add_parser("intersect", help="intersection number of two classes")
    s.add_argument("rep")
    s.add_argument("--mu", required=True)
    s.add_argument("--nu", required=True)
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(func=cmd_current)
    s = cs.add_parser("growth", help="mass growth factor under a monodromy matrix")
    s.add_argument("--matrix", required=True, help="a,b,c,d")
    s.add_argument("--seed", default="1,1")
    s.add_argument("--k-max", type=int, default=20)
    s.set_defaults(func=cmd_current)
    s = cs.add_parser("eigen", help="weighted-average eigenmeasure")
    s.add_argument("--matrix", required=True)
    s.add_argument("--seed", default="1,0")
    s.add_argument("--N", type=int, default=40)
    s.add_argument("--eps", type=float, default=None)
    s.set_defaults(func=cmd_current)
    s = cs.add_parser("linking", help="linking series coefficients")
    s.add_argument("--matrix", required=True)
    s.add_argument("--mu", required=True)
    s.add_argument("--nu", required=True)
    s.add_argument("--window", default="-4,4", help="lo,hi")
    s.set_defaults(func=cmd_current)

    s = sub.add_parser("render", help="SVG figures")
    s.add_argument("figure", choices=("torus-foliation", "helicoid-foliation", "helicoid-condensed",
                                      "commutator-staircase"))
    s.add_argument("--leaves", type=int, default=12)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=480)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("verify-all", help="run every check listed in a manifest")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return int(args.func(args))
    except (ValueError, KeyError, OSError) as e:
        print(json.dumps({"status": "error", "error": f"{type(e).__name__}: {e}"}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
