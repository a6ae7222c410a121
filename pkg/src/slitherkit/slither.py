"""Concrete slitherings: the Reeb-like torus and the unit tangent bundle of a hyperbolic surface.

The torus model lives on the plane with deck group generated by
``phi(x, y) = (x + 1, y + 0.5 sin y)`` and ``psi(x, y) = (x, y + 2 pi)``.  Its
fibres are the horizontal lines; fibre coordinates are rescaled to period 1
(``t = y / 2 pi``).

Distances use flattening coordinates ``(x, Y)`` in which both deck maps act by
translations, so the Euclidean metric there descends to a flat metric on the
torus.  Leaves are then graphs ``Y = leaf_height(x, y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .circle_homeo import LiftedCircleMap, compose, inverse
from .errors import ResolutionError
from .hyperbolic import FuchsianGroup, Moebius, boundary_action, geodesic_endpoints, lift_action, MoebiusLift

TWO_PI = 2 * math.pi
TORUS_AMPLITUDE = 0.5


# -- z function ----------------------------------------------------------------------

def z_value(r, t) -> int:
    """Rough height difference between the leaves over fibre values r and t."""
    d = t - r
    if isinstance(d, float) and d.is_integer() or not isinstance(d, float) and d == int(d):
        return 2 * int(d)
    return 2 * math.floor(d) + 1


@dataclass(frozen=True)
class ZFunctionTable:
    """z as a callable; antisymmetric, even exactly on integer gaps."""

    rule: Callable = z_value

    def __call__(self, r, t) -> int:
        return self.rule(r, t)


# -- models ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SlitheringModel:
    name: str
    fiber_period: float
    fibration: Callable
    deck_generators: dict
    induced_fiber_maps: dict
    fiber_sampler: Callable
    metric: str = ""
    fiber_mod_one: bool = False


def _torus_fiber_map(t):
    t = np.asarray(t, dtype=float)
    return t + TORUS_AMPLITUDE / TWO_PI * np.sin(TWO_PI * t)


def torus_slithering() -> SlitheringModel:
    def fibration(p):
        p = np.asarray(p, dtype=float)
        return p[..., 1] / TWO_PI

    def phi(p):
        p = np.asarray(p, dtype=float)
        return np.stack([p[..., 0] + 1, p[..., 1] + TORUS_AMPLITUDE * np.sin(p[..., 1])], axis=-1)

    def psi(p):
        p = np.asarray(p, dtype=float)
        return np.stack([p[..., 0], p[..., 1] + TWO_PI], axis=-1)

    def sampler(t, n):
        xs = np.linspace(-3, 3, n)
        return np.stack([xs, np.full(n, TWO_PI * t)], axis=-1)

    maps = {"phi": LiftedCircleMap.sampled(_torus_fiber_map), "psi": LiftedCircleMap.translation(1)}
    return SlitheringModel("torus", TWO_PI, fibration, {"phi": phi, "psi": psi}, maps, sampler,
                           metric="flat metric in flattening coordinates")


def tangent_bundle_slithering(group: FuchsianGroup) -> SlitheringModel:
    """Unit tangent bundle of the disk, fibred by forward endpoint of the geodesic."""

    def fibration(p):
        p = np.asarray(p, dtype=float)
        z = p[..., 0] + 1j * p[..., 1]
        e = np.exp(1j * p[..., 2])
        w = (e + z) / (1 + np.conj(z) * e)
        return np.mod(np.angle(w) / TWO_PI, 1.0)

    def derivative_action(g: Moebius):
        def act(p):
            p = np.asarray(p, dtype=float)
            z = p[..., 0] + 1j * p[..., 1]
            gz = g.act_disk(z)
            th = p[..., 2] + np.angle(g.derivative_disk(z))
            return np.stack([gz.real, gz.imag, th], axis=-1)
        return act

    def sampler(t, n):
        rng = np.random.default_rng(12345)
        rad = 0.9 * np.sqrt(rng.random(n))
        z = rad * np.exp(1j * TWO_PI * rng.random(n))
        xi = np.exp(1j * TWO_PI * t)
        th = np.angle((xi - z) / (1 - np.conj(z) * xi))
        return np.stack([z.real, z.imag, th], axis=-1)

    gens = {n: derivative_action(g) for n, g in group.generators.items()}
    maps = {n: lift_action(MoebiusLift(g, 0)) for n, g in group.generators.items()}
    return SlitheringModel("tangent-bundle", 1.0, fibration, gens, maps, sampler,
                           metric="not modelled", fiber_mod_one=True)


def verify_bundle_automorphism(model: SlitheringModel, samples: int = 64, fibers=None,
                               tol: float = 1e-9) -> dict:
    """Each deck generator must carry every sampled fibre into a single fibre."""
    fibers = np.linspace(0, 1, 17)[:-1] + 0.013 if fibers is None else np.asarray(fibers)
    checked = 0
    worst = 0.0
    for name, gen in model.deck_generators.items():
        for t in fibers:
            pts = model.fiber_sampler(float(t), samples)
            vals = model.fibration(gen(pts))
            spread = vals - vals[0]
            if model.fiber_mod_one:
                spread = (spread + 0.5) % 1.0 - 0.5
            checked += 1
            j = int(np.argmax(np.abs(spread)))
            worst = max(worst, float(abs(spread[j])))
            if abs(spread[j]) > tol:
                return {"status": "fail", "checked": checked, "worst": worst,
                        "witness": {"generator": name, "fiber": float(t),
                                    "points": [pts[0].tolist(), pts[j].tolist()],
                                    "images": [float(vals[0]), float(vals[j])]}}
    return {"status": "pass", "checked": checked, "worst": worst}


# -- torus leaves in flattening coordinates ------------------------------------------------

def _g_inverse(y: np.ndarray) -> np.ndarray:
    """Inverse of y -> y + 0.5 sin y by Newton's method (derivative >= 0.5)."""
    x = np.array(y, dtype=float)
    for _ in range(60):
        step = (x + TORUS_AMPLITUDE * np.sin(x) - y) / (1 + TORUS_AMPLITUDE * np.cos(x))
        x -= step
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


def _g(y):
    return y + TORUS_AMPLITUDE * np.sin(y)


def _g_power(y: np.ndarray, n: np.ndarray) -> np.ndarray:
    """g^n(y) elementwise for integer arrays n."""
    y = np.array(y, dtype=float)
    n = np.asarray(n)
    out = np.broadcast_to(y, np.broadcast(y, n).shape).copy()
    n = np.broadcast_to(n, out.shape)
    for k in range(int(np.max(np.abs(n))) if n.size else 0):
        fwd = n > k
        bwd = -n > k
        if fwd.any():
            out[fwd] = _g(out[fwd])
        if bwd.any():
            out[bwd] = _g_inverse(out[bwd])
    return out


def leaf_height(x, y):
    """Flattened height of the leaf through original coordinates (0, y), above position x."""
    x = np.asarray(x, dtype=float)
    n = np.floor(x).astype(int)
    frac = x - n
    a = _g_power(np.broadcast_to(y, x.shape), -n)
    b = _g_inverse(a)
    return (1 - frac) * a + frac * b


def _point_to_polyline(pts: np.ndarray, line: np.ndarray) -> np.ndarray:
    """Distance from each point to a polyline (both (N, 2) arrays)."""
    a, b = line[:-1], line[1:]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    best = np.full(len(pts), np.inf)
    for start in range(0, len(pts), 256):
        p = pts[start:start + 256, None, :]
        t = np.clip(np.einsum("pij,ij->pi", p - a, ab) / L2, 0, 1)
        proj = a + t[..., None] * ab
        d = np.sqrt(np.sum((p - proj) ** 2, axis=-1)).min(axis=1)
        best[start:start + 256] = d
    return best


def leaf_separation(r: float, t: float, samples: int = 16, reach: float = 10.0,
                    pad: float = 30.0) -> float:
    """Symmetric sup distance between leaves over fibre values r and t (flat metric).

    Sup points range over |x| <= reach; the other leaf is drawn over
    |x| <= reach + pad so nearest points are not cut off.
    """
    if r == t:
        return 0.0
    inner = np.linspace(-reach, reach, int(2 * reach * samples) + 1)
    outer = np.linspace(-reach - pad, reach + pad, int(2 * (reach + pad) * samples) + 1)

    def curve(c, xs):
        return np.stack([xs, leaf_height(xs, TWO_PI * c)], axis=-1)

    d1 = _point_to_polyline(curve(r, inner), curve(t, outer)).max()
    d2 = _point_to_polyline(curve(t, inner), curve(r, outer)).max()
    return float(max(d1, d2))


@dataclass
class SeparationReport:
    pairs: list
    z: list
    separation: list
    slope: float
    intercept: float
    residual: float
    C1: float
    C2: float
    refinement_change: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def leaf_separation_bound(model: SlitheringModel, leaf_pairs, samples: int = 16,
                          check_refinement: bool = True, tol: float = 0.05) -> SeparationReport:
    """Fit C2(|z| - 1) <= separation <= C1 |z| across leaf pairs of the torus model.

    ``residual`` is the worst deviation from the least-squares line
    sep ~ slope |z| + intercept, relative to the largest separation.
    """
    if model.name != "torus":
        raise ValueError("leaf separation is modelled for the torus slithering only")
    zs = [abs(z_value(r, t)) for r, t in leaf_pairs]  # exact inputs keep integer gaps exact
    pairs = [(float(r), float(t)) for r, t in leaf_pairs]
    seps = [leaf_separation(r, t, samples) for r, t in pairs]
    change = 0.0
    if check_refinement:
        fine = [leaf_separation(r, t, 2 * samples) for r, t in pairs]
        change = max((abs(a - b) / max(b, 1e-12) for a, b in zip(seps, fine) if b > 0), default=0.0)
        if change > tol:
            raise ResolutionError(f"separations moved {change:.1%} under refinement; increase samples")
    z = np.array(zs, dtype=float)
    s = np.array(seps)
    nz = z > 0
    if nz.sum() >= 2:
        slope, intercept = np.polyfit(z[nz], s[nz], 1)
        resid = float(np.max(np.abs(s[nz] - (slope * z[nz] + intercept))) / np.max(s[nz]))
    else:
        slope, intercept, resid = float("nan"), float("nan"), 0.0
    C1 = float(np.max(s[nz] / z[nz])) if nz.any() else 0.0
    big = z > 1
    C2 = float(np.min(s[big] / (z[big] - 1))) if big.any() else float("inf")
    return SeparationReport(pairs, zs, seps, float(slope), float(intercept), resid, C1, C2, change)


def z_diameter(model: SlitheringModel, fibers=None, depth: int = 3) -> int:
    """Largest, over fibre pairs, of the least positive z reachable through deck orbits."""
    fibers = [0.0, 0.25, 0.5, 0.75, 0.1] if fibers is None else list(fibers)
    maps = []
    for f in model.induced_fiber_maps.values():
        maps += [f, inverse(f)]
    worst = 0
    for t0 in fibers:
        for t1 in fibers:
            orbit = {round(t1, 12)}
            frontier = [t1]
            for _ in range(depth):
                nxt = []
                for v in frontier:
                    for f in maps:
                        w = float(f.evaluate_array(np.array([v]))[0])
                        if round(w, 12) not in orbit:
                            orbit.add(round(w, 12))
                            nxt.append(w)
                frontier = nxt
            zs = [z_value(t0, v) for v in orbit]
            pos = [z for z in zs if z > 0]
            worst = max(worst, min(pos) if pos else 0)
    return worst


# -- uniformity -------------------------------------------------------------------------

ANOSOV = np.array([[2, 1], [1, 1]])


def uniformity_probe(model_kind: str, arc_len: float, path_budget: float, resolution: int = 8,
                     arc_start: float = 0.0) -> dict:
    """Holonomy image lengths of a transverse arc along leaf paths of bounded length.

    torus: arc [arc_start, arc_start + arc_len] in fibre units, pushed along
    leaves to every x in [-budget, budget]; lengths in flat units.
    anosov: vector of length arc_len stretched by the matrix once per unit of path.
    """
    if arc_len < 0:
        raise ValueError("arc_len must be non-negative")
    if model_kind in ("torus", "torus-slither"):
        xs = np.linspace(-path_budget, path_budget, int(2 * path_budget * resolution) + 1)
        lo = leaf_height(xs, TWO_PI * arc_start)
        hi = leaf_height(xs, TWO_PI * (arc_start + arc_len))
        lengths = np.abs(hi - lo)
        half = np.abs(xs) <= path_budget / 2
        return {"model": "torus", "max_length": float(lengths.max()),
                "max_length_half_budget": float(lengths[half].max()),
                "bounded": bool(lengths.max() < TWO_PI),
                "lengths": lengths.tolist()}
    if model_kind in ("anosov", "linear-anosov-stable"):
        steps = int(path_budget)
        v = np.array([1.0, 0.0]) * arc_len
        lengths = [float(np.linalg.norm(v))]
        for _ in range(steps):
            v = ANOSOV @ v
            lengths.append(float(np.linalg.norm(v)))
        rate = lengths[-1] / lengths[-2] if steps and lengths[-2] > 0 else float("nan")
        return {"model": "anosov", "growth_rate": rate, "lengths": lengths,
                "bounded": bool(arc_len == 0)}
    raise ValueError(f"unknown model kind {model_kind!r}")
