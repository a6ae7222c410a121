"""Ordered triples of circle points, the cyclic cube root of Z, and proper-discontinuity probes.

A triple ``(u, s, p)`` with ``u < s < p < u + 1`` is a point of the lifted
triple space; reducing ``u`` into [0, 1) gives the canonical representative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circle_homeo import (
    GroupRepresentation,
    LiftedCircleMap,
    compose,
    evaluate,
    fixed_points,
    format_word,
    reduced_words,
)
from .hyperbolic import geodesic_endpoints, moebius_of, reduced_word_products

OUTWARD = 1e-12


@dataclass(frozen=True)
class Triple:
    u: float
    s: float
    p: float

    def __post_init__(self):
        if not (self.u < self.s < self.p < self.u + 1):
            raise ValueError(f"not an ordered triple: {self.as_tuple()}")

    def as_tuple(self) -> tuple:
        return (self.u, self.s, self.p)

    def shift(self, k) -> "Triple":
        return Triple(self.u + k, self.s + k, self.p + k)

    def canonical(self) -> "Triple":
        return self.shift(-math.floor(self.u))

    def to_list(self, scale: float = 1.0) -> list:
        return [float(v) * scale for v in self.as_tuple()]


@dataclass(frozen=True)
class TripleBox:
    center: Triple
    radius: float

    def __post_init__(self):
        u, s, p = self.center.as_tuple()
        gap = min(s - u, p - s, u + 1 - p)
        if not 0 < self.radius < gap / 2:
            raise ValueError("box radius must be positive and below half the smallest gap")

    def bounds(self) -> np.ndarray:
        """(3, 2) array of [lo, hi] per coordinate."""
        c = np.array([float(v) for v in self.center.as_tuple()])
        return np.stack([c - self.radius, c + self.radius], axis=-1)


def act_on_triple(f: LiftedCircleMap, t: Triple) -> Triple:
    """Coordinatewise image; the result stays in the lifted space (call .canonical() to reduce)."""
    return Triple(evaluate(f, t.u), evaluate(f, t.s), evaluate(f, t.p))


def z_third(t: Triple) -> Triple:
    """(u, s, p) -> (s, p, u + 1); its cube is the deck shift."""
    return Triple(t.s, t.p, t.u + 1)


# -- space-like types ----------------------------------------------------------------

@dataclass(frozen=True)
class SpacelikeType:
    kind: str  # hyperbolic-type | parabolic-type | not-space-like | violation
    fixed: tuple = ()
    witness: object = None


def _displacement_sign(f: LiftedCircleMap, x) -> int:
    d = evaluate(f, x) - x
    return (d > 0) - (d < 0)


def spacelike_type(f: LiftedCircleMap) -> SpacelikeType:
    """Shape of the fixed set of the induced circle map."""
    fx = fixed_points(f)
    if not fx:
        return SpacelikeType("not-space-like")
    if any(lo != hi for lo, hi in fx) or len(fx) >= 3:
        return SpacelikeType("violation", tuple(fx), {"fixed": [(float(a), float(b)) for a, b in fx]})
    if len(fx) == 1:
        return SpacelikeType("parabolic-type", tuple(fx))
    x1, x2 = fx[0][0], fx[1][0]
    s1 = _displacement_sign(f, (x1 + x2) / 2)
    s2 = _displacement_sign(f, (x2 + x1 + 1) / 2)
    if s1 * s2 < 0:
        return SpacelikeType("hyperbolic-type", tuple(fx))
    return SpacelikeType("violation", tuple(fx), {"reason": "both fixed points one-sided",
                                                  "signs": (s1, s2)})


# -- geodesic flow coordinates -------------------------------------------------------------

def geodesic_flow_triple(point: complex, direction: float) -> Triple:
    """(backward end, forward end, left end of the perpendicular), lifted in order."""
    u = geodesic_endpoints(point, direction + math.pi)
    s = geodesic_endpoints(point, direction)
    p = geodesic_endpoints(point, direction + math.pi / 2)
    s = s if s > u else s + 1
    p = p if p > s else p + 1
    if p > u + 1:
        raise ValueError("endpoints not in cyclic order")
    return Triple(u, s, p)


# -- proper discontinuity probe --------------------------------------------------------------

def _overlaps(img: np.ndarray, box: np.ndarray, modulo_z: bool) -> np.ndarray:
    """img: (N, 3, 2) coordinate intervals; box: (3, 2).  Overlap after some diagonal shift."""
    lo = box[None, :, 0] - img[..., 1]
    hi = box[None, :, 1] - img[..., 0]
    m_lo, m_hi = lo.max(axis=-1), hi.min(axis=-1)
    if modulo_z:
        return np.floor(m_hi) >= m_lo
    return (m_lo <= 0) & (0 <= m_hi)


def _disk_form(ms: np.ndarray):
    a, b, c, d = ms[..., 0, 0], ms[..., 0, 1], ms[..., 1, 0], ms[..., 1, 1]
    alpha = (a + d) / 2 + 1j * (b - c) / 2
    beta = (a - d) / 2 - 1j * (b + c) / 2
    return alpha, beta


def _raw_lift(ms: np.ndarray, x: np.ndarray) -> np.ndarray:
    """A continuous lift of the boundary action for each matrix; x has shape (K,)."""
    alpha, beta = _disk_form(ms)
    q = (beta / alpha)[..., None]
    return x + (np.angle(alpha)[..., None] + np.angle(1 + q * np.exp(-2j * np.pi * x))) / np.pi


def _element_key(m: np.ndarray) -> tuple:
    return tuple(np.round(m.ravel(), 6) + 0.0)


def proper_discontinuity_probe(rep: GroupRepresentation, box: TripleBox, max_len: int,
                               modulo_z: bool = True) -> dict:
    """Count group elements moving ``box`` onto itself, by word length.

    With ``modulo_z`` the count is for the group extended by the deck shift Z
    (overlap after any diagonal integer shift).  A finite-depth check, not a proof.
    """
    bounds = box.bounds()
    corners = bounds.reshape(-1)  # u-, u+, s-, s+, p-, p+
    names = list(rep.generators)
    moebius = [moebius_of(f) for f in rep.generators.values()]
    per_len_words = np.zeros(max_len + 1, dtype=int)
    elements: dict = {}  # key -> shortest length
    witnesses: dict = {}

    if modulo_z and names and all(m is not None for m in moebius):
        mats = []
        for g in moebius:
            mats += [g.m, np.linalg.inv(g.m)]
        for lens, prods, wordinfo in reduced_word_products(mats, max_len):
            if len(lens) == 0:
                continue
            for start in range(0, len(lens), 200_000):
                ms = prods[start:start + 200_000]
                img = _raw_lift(ms, corners).reshape(-1, 3, 2)
                img[..., 0] -= OUTWARD
                img[..., 1] += OUTWARD
                hit = np.flatnonzero(_overlaps(img, bounds, True))
                for k in hit:
                    n = int(lens[start + k])
                    per_len_words[n] += 1
                    key = _element_key(_sign_normal(ms[k]))
                    if key not in elements or elements[key] > n:
                        elements[key] = n
                        witnesses[key] = _word_text(wordinfo, start + k, names)
    else:
        letters = rep.alphabet()
        probe = np.linspace(0.05, 0.95, 7)
        maps = {(): LiftedCircleMap.identity()}
        for w in reduced_words(letters, max_len):
            f = maps[w] if not w else compose(maps[w[:-1]], rep.letter(*w[-1]))
            maps[w] = f
            img = f.evaluate_array(corners).reshape(1, 3, 2)
            img[..., 0] -= OUTWARD
            img[..., 1] += OUTWARD
            if _overlaps(img, bounds, modulo_z)[0]:
                per_len_words[len(w)] += 1
                vals = f.evaluate_array(probe)
                key = tuple(np.round(np.mod(vals, 1.0) if modulo_z else vals, 9) + 0.0)
                if key not in elements:
                    elements[key] = len(w)
                    witnesses[key] = format_word(w)
    per_len_elements = np.zeros(max_len + 1, dtype=int)
    for n in elements.values():
        per_len_elements[n] += 1
    cum_words = np.cumsum(per_len_words).tolist()
    cum_elements = np.cumsum(per_len_elements).tolist()
    stabilized = max_len >= 2 and cum_elements[-1] == cum_elements[-2] == cum_elements[-3]
    return {
        "probe": "finite-depth",
        "modulo_z": modulo_z,
        "max_len": max_len,
        "word_counts": cum_words,
        "element_counts": cum_elements,
        "count": cum_elements[-1],
        "stabilized": bool(stabilized),
        "elements": sorted(witnesses.values(), key=lambda w: (len(w.split()), w)),
    }


def _sign_normal(m: np.ndarray) -> np.ndarray:
    m = m / math.sqrt(max(np.linalg.det(m), 1e-300))
    tr = m[0, 0] + m[1, 1]
    if tr < 0 or (abs(tr) < 1e-9 and m.flat[np.flatnonzero(np.abs(m) > 1e-9)[0]] < 0):
        m = -m
    return m


def _word_text(wordinfo, k: int, names: list) -> str:
    if isinstance(wordinfo, tuple):
        pw, sw, pairs = wordinfo
        i, j = pairs[k]
        w = pw[i] + sw[j]
    else:
        w = wordinfo[k]
    return " ".join(names[a // 2] if a % 2 == 0 else names[a // 2].upper() for a in w)


def moebius_word_traces(rep: GroupRepresentation, max_len: int):
    """Absolute traces of every reduced word up to max_len, and which words are +-identity."""
    mats = []
    for f in rep.generators.values():
        g = moebius_of(f)
        if g is None:
            raise ValueError("representation is not Möbius-backed")
        mats += [g.m, np.linalg.inv(g.m)]
    out = []
    for lens, prods, _ in reduced_word_products(mats, max_len):
        tr = np.abs(prods[:, 0, 0] + prods[:, 1, 1])
        off = np.abs(prods[:, 0, 1]) + np.abs(prods[:, 1, 0])
        out.append((lens, tr, off < 1e-9))
    lens = np.concatenate([a for a, _, _ in out])
    traces = np.concatenate([b for _, b, _ in out])
    ident = np.concatenate([c for _, _, c in out]) & (np.abs(traces - 2) < 1e-9)
    return lens, traces, ident


def parabolic_scan(rep: GroupRepresentation, max_len: int, tol: float = 1e-10,
                   sample: int = 200, seed: int = 0) -> dict:
    """Look for parabolic words: trace test on every word plus the dynamical test on a sample."""
    lens, traces, ident = moebius_word_traces(rep, max_len)
    near = np.abs(traces - 2) <= tol
    nontrivial = (lens > 0) & ~ident
    suspects = int(np.count_nonzero(near & nontrivial))
    rng = np.random.default_rng(seed)
    letters = rep.alphabet()
    kinds: dict = {}
    for _ in range(sample):
        n = int(rng.integers(1, max_len + 1))
        w = []
        while len(w) < n:
            a = letters[int(rng.integers(len(letters)))]
            if w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                continue
            w.append(a)
        f = LiftedCircleMap.identity()
        for a in reversed(w):
            f = compose(rep.letter(*a), f)
        kind = spacelike_type(f).kind
        kinds[kind] = kinds.get(kind, 0) + 1
    return {"words": int(len(lens)), "trace_near_2": suspects,
            "identity_words": int(np.count_nonzero(ident & (lens > 0))),
            "min_nontrivial_trace": float(traces[nontrivial].min()) if np.any(nontrivial) else None,
            "sampled_types": kinds}
