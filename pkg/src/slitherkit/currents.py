"""Geodesic currents: crossings, mass, intersection numbers, growth and the linking series.

Two carriers are supported.  On a Fuchsian group a current is a weighted sum
of closed-geodesic classes (words).  On the torus toy model it is a
slope vector (meaningful up to sign) acted on by an integer matrix; the crossing
count of two slope classes is ``|det[u v]|`` and everything is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy as sp

from .circle_homeo import format_word, parse_word
from .hyperbolic import (
    FuchsianGroup,
    GeodesicH2,
    Moebius,
    classify_moebius,
    reduced_word_products,
    translation_length,
)

TWO_PI = 2 * math.pi


class InvalidClassError(ValueError):
    """A word has no axis (it is not hyperbolic)."""


def cross(g1: GeodesicH2, g2: GeodesicH2) -> bool:
    """Endpoint pairs link on the circle; a shared endpoint is not a crossing."""
    # exact rationals: float modulo can round a tiny gap onto the arc boundary
    a, b = Fraction(g1.u) % 1, Fraction(g1.s) % 1
    ends = (Fraction(g2.u) % 1, Fraction(g2.s) % 1)
    if any(e in (a, b) for e in ends):
        return False

    def inside(x):  # open counterclockwise arc from a to b
        return 0 < (x - a) % 1 < (b - a) % 1

    return inside(ends[0]) != inside(ends[1])


# -- currents --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeodesicCurrent:
    """Either ``classes`` (word, weight) on ``group``, or a torus slope ``vector``."""

    carrier: str
    classes: tuple = ()
    group: FuchsianGroup | None = None
    vector: tuple | None = None

    @classmethod
    def surface(cls, group: FuchsianGroup, classes) -> "GeodesicCurrent":
        if isinstance(classes, dict):
            classes = classes.items()
        out = []
        for w, weight in classes:
            word = parse_word(w, group.generators) if isinstance(w, str) else tuple(w)
            if not word:
                raise InvalidClassError("empty word has no axis")
            if any(word[i][0] == word[i + 1][0] and word[i][1] == -word[i + 1][1]
                   for i in range(len(word) - 1)) or (
                    len(word) > 1 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]):
                raise InvalidClassError(f"word {format_word(word)!r} is not cyclically reduced")
            if not weight > 0:
                raise ValueError("weights must be positive")
            out.append((word, weight))
        return cls("surface", tuple(out), group)

    @classmethod
    def torus(cls, vector) -> "GeodesicCurrent":
        v = tuple(vector)
        if len(v) != 2:
            raise ValueError("torus current is a 2-vector")
        return cls("torus", vector=v)

    def scaled(self, c) -> "GeodesicCurrent":
        if self.carrier == "torus":
            return GeodesicCurrent.torus(tuple(c * x for x in self.vector))
        return GeodesicCurrent("surface", tuple((w, c * x) for w, x in self.classes), self.group)


def word_matrix(group: FuchsianGroup, word) -> Moebius:
    out = Moebius.identity()
    for name, e in word:
        g = group.generators[name]
        out = out @ (g if e > 0 else g.inverse())
    return out


def mass(mu: GeodesicCurrent):
    if mu.carrier == "torus":
        x, y = (float(v) for v in mu.vector)
        return math.hypot(x, y)
    return sum(w * translation_length(word_matrix(mu.group, word)) for word, w in mu.classes)


# -- intersection number ------------------------------------------------------------------

@dataclass
class IntersectionResult:
    value: object
    converged: bool
    depth: int
    pair_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": float(self.value), "converged": self.converged, "depth": self.depth,
                "pairs": {f"{a} | {b}": c for (a, b), c in self.pair_counts.items()},
                "status": "converged" if self.converged else "lower-bound"}


def _axis(g: Moebius):
    t = classify_moebius(g)
    if t.kind != "hyperbolic":
        raise InvalidClassError(f"{t.kind} element has no axis")
    return t.repelling, t.attracting


def _axis_coordinates(rep: float, att: float):
    """Map z on the circle to a real coordinate where the axis rep->att is 0 -> infinity."""
    p, q = np.exp(1j * TWO_PI * rep), np.exp(1j * TWO_PI * att)
    mid = np.exp(1j * TWO_PI * (rep + ((att - rep) % 1.0) / 2))
    direction = (mid - p) / (mid - q)
    direction /= abs(direction)

    def coord(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.real((z - p) / (z - q) / direction)

    return coord


def _disk_images(prods: np.ndarray, angles: Sequence[float]) -> np.ndarray:
    a, b, c, d = prods[:, 0, 0], prods[:, 0, 1], prods[:, 1, 0], prods[:, 1, 1]
    alpha = (a + d) / 2 + 1j * (b - c) / 2
    beta = (a - d) / 2 - 1j * (b + c) / 2
    w = np.exp(1j * TWO_PI * np.asarray(angles))[None, :]
    return (alpha[:, None] * w + beta[:, None]) / (np.conj(beta)[:, None] * w + np.conj(alpha)[:, None])


def _letter_mats(group: FuchsianGroup) -> list:
    mats = []
    for g in group.generators.values():
        mats += [g.m, g.inverse().m]
    return mats


def _crossing_keys(group: FuchsianGroup, alpha_word, beta_word, depth: int) -> tuple:
    """Distinct lifts of beta crossing one lift of alpha, found among words up to depth and depth-1."""
    A = word_matrix(group, alpha_word)
    B = word_matrix(group, beta_word)
    rep, att = _axis(A)
    ell = translation_length(A)
    coord = _axis_coordinates(rep, att)
    b_ends = _axis(B)
    rows = []
    for lens, prods, _ in reduced_word_products(_letter_mats(group), depth):
        z = _disk_images(prods, b_ends)
        x = coord(z)
        ok = (np.abs(x) > 1e-9).all(axis=1) & (np.abs(x) < 1e9).all(axis=1)
        with np.errstate(invalid="ignore"):
            hit = ok & (x[:, 0] * x[:, 1] < 0)
        if not hit.any():
            continue
        xh = x[hit]
        # alpha multiplies both coordinates by e^ell: the log-ratio is invariant and
        # the log-product position is taken modulo ell
        spread = 0.5 * np.log(np.abs(xh[:, 0] / xh[:, 1]))
        position = np.mod(0.5 * np.log(-xh[:, 0] * xh[:, 1]), ell)
        side = np.sign(xh[:, 0])
        rows.append(np.stack([side, spread, position, lens[hit]], axis=1))
    if not rows:
        return set(), set()
    return _cluster_lifts(np.concatenate(rows), ell, depth)


def _cluster_lifts(rows: np.ndarray, ell: float, depth: int, tol: float = 1e-6) -> tuple:
    """Merge rows naming the same lift up to round-off; return (all keys, keys seen before depth)."""
    order = np.lexsort((rows[:, 2], rows[:, 1], rows[:, 0]))
    reps: list = []
    early: list = []
    for side, spread, position, n in rows[order]:
        for i, (s0, d0, p0) in enumerate(reps):
            gap = abs(position - p0)
            if s0 == side and abs(spread - d0) <= tol and min(gap, ell - gap) <= tol:
                early[i] |= n < depth
                break
        else:
            reps.append((side, spread, position))
            early.append(bool(n < depth))
    keys = [(float(s), float(d), float(p)) for s, d, p in reps]
    return set(keys), {k for k, e in zip(keys, early) if e}


def intersection_number(mu: GeodesicCurrent, nu: GeodesicCurrent, group: FuchsianGroup | None = None,
                        depth: int = 6) -> IntersectionResult:
    """Weighted count of crossings between lifts; exact bilinear in the weights."""
    group = group or mu.group
    if mu.carrier != "surface" or nu.carrier != "surface":
        raise ValueError("intersection numbers need surface carriers")
    total = 0
    converged = True
    counts = {}
    for wa, xa in mu.classes:
        for wb, xb in nu.classes:
            now, prev = _crossing_keys(group, wa, wb, depth)
            counts[(format_word(wa), format_word(wb))] = len(now)
            converged &= len(now) == len(prev)
            total += xa * xb * len(now)
    return IntersectionResult(total, converged, depth, counts)


def injectivity_radius_bound(group: FuchsianGroup, max_len: int = 4) -> float:
    """Half the shortest translation length among non-identity words up to max_len."""
    best = math.inf
    for lens, prods, _ in reduced_word_products(_letter_mats(group), max_len):
        tr = np.abs(prods[:, 0, 0] + prods[:, 1, 1])
        off = np.abs(prods[:, 0, 1]) + np.abs(prods[:, 1, 0])
        keep = (lens > 0) & ~((off < 1e-9) & (np.abs(tr - 2) < 1e-9))
        if keep.any():
            t = tr[keep].min()
            if t > 2:
                best = min(best, 2 * math.acosh(t / 2))
    return best / 2


# -- torus toy model ----------------------------------------------------------------------

@dataclass(frozen=True)
class MonodromyAction:
    matrix: tuple = ((1, 0), (0, 1))

    def __post_init__(self):
        m = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) != 1:
            raise ValueError("monodromy must have determinant +-1")

    @property
    def kind(self) -> str:
        return "identity" if self.matrix == ((1, 0), (0, 1)) else "linear-matrix"

    @property
    def det(self) -> int:
        m = self.matrix
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]

    def power_matrix(self, k: int) -> tuple:
        m = self.matrix
        if k < 0:
            d = self.det
            m = ((d * m[1][1], -d * m[0][1]), (-d * m[1][0], d * m[0][0]))
            k = -k
        out = ((1, 0), (0, 1))
        for _ in range(k):
            out = tuple(tuple(sum(out[i][t] * m[t][j] for t in range(2)) for j in range(2)) for i in range(2))
        return out

    def apply(self, v, k: int = 1):
        m = self.power_matrix(k)
        return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])

    def eigen(self):
        """Exact eigenpairs (value, vector) with nonnegative vectors where possible, largest first."""
        M = sp.Matrix(self.matrix)
        out = []
        for val, _, vecs in M.eigenvects():
            v = vecs[0]
            if all(sp.simplify(x) <= 0 for x in v):
                v = -v
            out.append((sp.nsimplify(val), tuple(sp.simplify(x) for x in v)))
        out.sort(key=lambda p: -abs(float(p[0])))
        return out


def perron_vector(Z: MonodromyAction):
    """Exact expanding eigenvector, sign chosen nonnegative."""
    return Z.eigen()[0]


@dataclass
class GrowthReport:
    factor: float
    ratios: list
    root_estimate: float
    converged: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def growth_factor(Z: MonodromyAction, mu: GeodesicCurrent, k_max: int = 20) -> GrowthReport:
    """Mass growth rate of Z^k mu, from the ratio of successive normalised masses.

    The k-th root of |Z^k mu| / |mu| is also reported; it converges only like
    1/k, so the ratio is the returned factor.
    """
    if k_max < 8:
        raise ValueError("k_max must be at least 8")
    v = np.array([float(x) for x in mu.vector])
    if not np.any(v):
        raise ValueError("seed current is zero")
    m = np.array(Z.matrix, dtype=float)
    base = np.linalg.norm(v)
    v = v / base
    log_mass = 0.0
    ratios = []
    for _ in range(k_max):
        w = m @ v
        r = float(np.linalg.norm(w))
        ratios.append(r)
        log_mass += math.log(r)
        v = w / r
    tail = np.abs(np.diff(ratios[-4:]))
    converged = bool(np.all(tail[1:] <= tail[:-1] + 1e-15))
    return GrowthReport(ratios[-1], ratios, math.exp(log_mass / k_max), converged)


EIGEN_EPS = 0.5


def eigenmeasure(Z: MonodromyAction, mu0: GeodesicCurrent, N: int = 40, eps: float | None = None,
                 g: float | None = None) -> GeodesicCurrent:
    """Weighted average of Z^l mu0 over 2N iterates, normalised to unit mass.

    Weights rise by (1 + eps)/g for the first N steps and by (1 - eps)/g for the
    next N, so the middle iterates dominate.  ``eps`` defaults to EIGEN_EPS.
    """
    eps = EIGEN_EPS if eps is None else eps
    if g is None:
        g = growth_factor(Z, mu0, max(8, N)).factor
    m = np.array(Z.matrix, dtype=float)
    v = np.array([float(x) for x in mu0.vector])
    v = v / np.linalg.norm(v)
    # carry w_l Z^l v in a log-scaled form to avoid overflow
    total = v.copy()
    term = v.copy()
    scale = 0.0  # log of the common factor of ``total``
    for l in range(1, 2 * N + 1):
        ratio = (1 + eps) / g if l <= N else (1 - eps) / g
        term = ratio * (m @ term)
        n = np.linalg.norm(term)
        if n > 1e100:
            term, total = term / n, total / n
        total = total + term
    total = total / np.linalg.norm(total)
    return GeodesicCurrent.torus(tuple(float(x) for x in total))


def angular_distance(u, v) -> float:
    u = np.array([float(x) for x in u])
    v = np.array([float(x) for x in v])
    return float(math.atan2(abs(u[0] * v[1] - u[1] * v[0]), abs(u @ v)))


def eigen_residual(Z: MonodromyAction, mu: GeodesicCurrent) -> float:
    """Angle between mu and Z mu."""
    return angular_distance(mu.vector, Z.apply(mu.vector))


@dataclass(frozen=True)
class LinkingSeries:
    coefficients: dict
    window: tuple

    def coefficient(self, exponent: int):
        lo, hi = self.window
        if not 2 * lo <= exponent <= 2 * hi:
            raise KeyError(f"exponent {exponent} outside the computed window")
        return self.coefficients.get(exponent, 0)

    def reciprocal(self) -> "LinkingSeries":
        """t -> 1/t."""
        lo, hi = self.window
        return LinkingSeries({-e: c for e, c in self.coefficients.items()}, (-hi, -lo))

    def to_dict(self) -> dict:
        return {"window": list(self.window),
                "coefficients": {str(e): _plain(c) for e, c in sorted(self.coefficients.items())}}


def _plain(c):
    c = sp.nsimplify(c)
    if c.is_Integer:
        return int(c)
    return float(c) if c.is_Float else str(c)


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def linking_series(mu: GeodesicCurrent, nu: GeodesicCurrent, Z: MonodromyAction,
                   k_window=(-6, 6)) -> LinkingSeries:
    """Coefficient of t^(2k) is |det[Z^k mu, nu]| for k in the window."""
    lo, hi = k_window
    coeffs = {}
    for k in range(lo, hi + 1):
        d = _det(Z.apply(mu.vector, k), nu.vector)
        if isinstance(d, sp.Basic):
            d = sp.Abs(sp.expand(d))
            d = sp.nsimplify(sp.simplify(d))
        else:
            d = abs(d)
        coeffs[2 * k] = d
    return LinkingSeries(coeffs, (lo, hi))
