"""Lifted circle homeomorphisms: strictly increasing maps of the line with f(x + 1) = f(x) + 1.

Three kinds of map are supported:

* ``pl``: piecewise linear, given by breakpoints ``(x_i, y_i)`` on one period.
  Coordinates that are all ``Fraction``/``int`` make the map *exact*; every
  operation on exact maps (composition, inverse, fixed points, equality) is
  done in rational arithmetic.  Float coordinates fall back to floating point
  and results carry ``exact = False``.
* ``rotation``: the translation ``x -> x + theta``.
* ``sampled``: an arbitrary vectorised rule on ``[0, 1)``, extended by
  periodicity and certified monotone on a grid at construction time.

All maps are immutable.  The period is 1 everywhere.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

DEFAULT_GRID = 4096
TANGENT_TOL = 1e-12


class InvalidMapError(ValueError):
    """Raised when data does not describe a lifted circle homeomorphism."""


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) or isinstance(v, Rational)


def _as_number(v):
    """Keep ints/Fractions exact, turn everything else into float."""
    if isinstance(v, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


def _floor(v) -> int:
    return math.floor(v)


@dataclass(frozen=True, eq=False)
class LiftedCircleMap:
    """An element of the universal cover of Homeo+(S^1)."""

    kind: str
    breaks: tuple = ()
    theta: object = 0
    rule: Callable | None = None
    grid_size: int = DEFAULT_GRID
    _xs: tuple = field(default=(), repr=False)
    _ys: tuple = field(default=(), repr=False)

    # -- constructors -------------------------------------------------------
    @classmethod
    def pl(cls, breaks: Iterable[Sequence]) -> "LiftedCircleMap":
        pts = [(_as_number(x), _as_number(y)) for x, y in breaks]
        if len(pts) < 1:
            raise InvalidMapError("a PL map needs at least one breakpoint")
        exact = all(_is_exact(x) and _is_exact(y) for x, y in pts)
        if not exact:
            pts = [(float(x), float(y)) for x, y in pts]
        for i, (x, y) in enumerate(pts):
            if not 0 <= x < 1:
                raise InvalidMapError(f"breakpoint x={x} outside [0, 1)")
            if i and not (pts[i - 1][0] < x):
                raise InvalidMapError("breakpoint x values must strictly increase")
            if i and not (pts[i - 1][1] < y):
                raise InvalidMapError("breakpoint y values must strictly increase")
        if not pts[-1][1] < pts[0][1] + 1:
            raise InvalidMapError("map is not monotone across the period boundary")
        pts = _canonical_breaks(pts, exact)
        xs = tuple(p[0] for p in pts) + (pts[0][0] + 1,)
        ys = tuple(p[1] for p in pts) + (pts[0][1] + 1,)
        return cls(kind="pl", breaks=tuple(pts), _xs=xs, _ys=ys)

    @classmethod
    def rotation(cls, theta) -> "LiftedCircleMap":
        return cls(kind="rotation", theta=_as_number(theta))

    @classmethod
    def identity(cls) -> "LiftedCircleMap":
        return cls.rotation(0)

    @classmethod
    def translation(cls, k: int) -> "LiftedCircleMap":
        """Z^k, the deck translation by k periods."""
        return cls.rotation(k)

    @classmethod
    def sampled(cls, rule: Callable, grid_size: int = DEFAULT_GRID) -> "LiftedCircleMap":
        """Wrap a vectorised rule on [0, 1); monotonicity is checked on a grid."""
        f = cls(kind="sampled", rule=rule, grid_size=grid_size)
        vals = f._grid_values
        if not np.all(np.isfinite(vals)):
            raise InvalidMapError("rule produced non-finite values")
        d = np.diff(vals)
        if np.any(d <= 0):
            j = int(np.argmax(d <= 0))
            raise InvalidMapError(
                f"rule not strictly increasing near x={j / grid_size:.6g} on its certificate grid"
            )
        return f

    # -- basic properties ---------------------------------------------------
    @property
    def exact(self) -> bool:
        if self.kind == "pl":
            return _is_exact(self.breaks[0][0])
        if self.kind == "rotation":
            return _is_exact(self.theta)
        return False

    @property
    def is_pl_like(self) -> bool:
        return self.kind in ("pl", "rotation")

    def as_pl(self) -> "LiftedCircleMap":
        if self.kind == "pl":
            return self
        if self.kind == "rotation":
            return LiftedCircleMap.pl([(0 if self.exact else 0.0, self.theta)])
        raise TypeError("sampled maps have no PL form")

    @cached_property
    def _float_table(self):
        xs = np.array([float(v) for v in self._xs])
        ys = np.array([float(v) for v in self._ys])
        return xs, ys

    @cached_property
    def _grid_values(self) -> np.ndarray:
        """Rule values on the certificate grid j/m, j = 0..m (the last is f(1) = f(0) + 1)."""
        u = np.arange(self.grid_size) / self.grid_size
        vals = np.asarray(self.rule(u), dtype=float)
        return np.append(vals, vals[0] + 1.0)

    def breakpoints(self) -> list:
        """x-coordinates in [0, 1) where the map may fail to be linear."""
        if self.kind == "pl":
            return [p[0] for p in self.breaks]
        return []

    # -- evaluation ----------------------------------------------------------
    def __call__(self, x):
        return evaluate(self, x)

    def evaluate_array(self, x) -> np.ndarray:
        """Float evaluation on an array of points."""
        x = np.asarray(x, dtype=float)
        if self.kind == "rotation":
            return x + float(self.theta)
        if self.kind == "pl":
            xs, ys = self._float_table
            k = np.floor(x - xs[0])
            u = x - k
            i = np.clip(np.searchsorted(xs, u, side="right") - 1, 0, len(xs) - 2)
            x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
            return y0 + (u - x0) * ((y1 - y0) / (x1 - x0)) + k
        k = np.floor(x)
        return np.asarray(self.rule(x - k), dtype=float) + k

    def __repr__(self) -> str:
        if self.kind == "rotation":
            return f"LiftedCircleMap.rotation({self.theta})"
        if self.kind == "pl":
            return f"LiftedCircleMap.pl({[(str(x), str(y)) for x, y in self.breaks]})"
        return f"LiftedCircleMap.sampled({self.rule!r})"


def _canonical_breaks(pts: list, exact: bool) -> list:
    """Drop breakpoints that are collinear with their cyclic neighbours."""

    def collinear(p, q, r):
        cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if exact:
            return cross == 0
        return abs(cross) <= 1e-15

    changed = True
    while changed and len(pts) > 1:
        changed = False
        n = len(pts)
        for i in range(n):
            prev = pts[i - 1] if i > 0 else (pts[-1][0] - 1, pts[-1][1] - 1)
            nxt = pts[i + 1] if i < n - 1 else (pts[0][0] + 1, pts[0][1] + 1)
            if collinear(prev, pts[i], nxt):
                del pts[i]
                changed = True
                break
    if len(pts) == 1:
        x, y = pts[0]
        zero = Fraction(0) if exact else 0.0
        pts = [(zero, y - x)]
    return pts


def evaluate(f: LiftedCircleMap, x):
    """f(x); exact when f is exact and x is rational."""
    if f.kind == "rotation":
        return x + f.theta if (_is_exact(x) or not f.exact) else x + float(f.theta)
    if f.kind == "pl":
        xs, ys = f._xs, f._ys
        if f.exact and _is_exact(x):
            x = Fraction(x)
            k = _floor(x - xs[0])
            u = x - k
            i = min(max(bisect_right(xs, u) - 1, 0), len(xs) - 2)
            return ys[i] + (u - xs[i]) * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) + k
        return float(f.evaluate_array(np.array([float(x)]))[0])
    return float(f.evaluate_array(np.array([float(x)]))[0])


# -- composition and inverse ---------------------------------------------------

class _Composed:
    """Rule x -> outer(inner(x)) for sampled maps without a closed form."""

    def __init__(self, outer: LiftedCircleMap, inner: LiftedCircleMap):
        self.outer, self.inner = outer, inner

    def __call__(self, u):
        return self.outer.evaluate_array(self.inner.evaluate_array(u))


class _NumericInverse:
    """Inverse of a sampled map by vectorised bisection on a bracketing table."""

    def __init__(self, f: LiftedCircleMap):
        self.f = f
        m = max(f.grid_size, 1024)
        self._u = np.arange(m + 1) / m
        self._v = f.evaluate_array(self._u)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        # reduce y into [f(0), f(0) + 1)
        k = np.floor(y - self._v[0])
        t = y - k
        j = np.clip(np.searchsorted(self._v, t, side="right") - 1, 0, len(self._u) - 2)
        lo, hi = self._u[j].copy(), self._u[j + 1].copy()
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = self.f.evaluate_array(mid) <= t
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi) + k


def _pl_compose(f: LiftedCircleMap, g: LiftedCircleMap) -> LiftedCircleMap:
    f, g = f.as_pl(), g.as_pl()
    exact = f.exact and g.exact
    g_inv = inverse(g)
    g0 = evaluate(g, Fraction(0) if exact else 0.0)
    cand = set(g.breakpoints())
    for xf in f.breakpoints():
        k = math.ceil(g0 - xf)
        v = xf + k
        if v >= g0 + 1:
            v -= 1
        cand.add(evaluate(g_inv, v))
    xs = sorted(cand)
    if exact:
        xs = [x - _floor(x) for x in xs]
        xs = sorted(set(xs))
    else:
        xs = sorted({float(x) - math.floor(float(x)) for x in xs})
        dedup = []
        for x in xs:
            if x >= 1.0 or (dedup and x - dedup[-1] < 1e-14):
                continue
            dedup.append(x)
        if len(dedup) > 1 and dedup[0] + 1 - dedup[-1] < 1e-14:
            dedup.pop()
        xs = dedup
    pts = [(x, evaluate(f, evaluate(g, x))) for x in xs]
    return LiftedCircleMap.pl(pts)


def compose(f: LiftedCircleMap, g: LiftedCircleMap) -> LiftedCircleMap:
    """The map f o g (g is applied first)."""
    if f.kind == "rotation" and g.kind == "rotation":
        return LiftedCircleMap.rotation(f.theta + g.theta)
    if f.kind == "sampled" or g.kind == "sampled":
        for rot, other in ((f, g), (g, f)):
            if rot.kind == "rotation" and rot.theta == 0:
                return other
            if rot.kind == "rotation" and rot.theta == int(rot.theta) and hasattr(other.rule, "shifted"):
                return LiftedCircleMap.sampled(other.rule.shifted(int(rot.theta)), other.grid_size)
        fr, gr = f.rule, g.rule
        if fr is not None and gr is not None and type(fr) is type(gr) and hasattr(fr, "compose"):
            rule = fr.compose(gr)
            if rule is not NotImplemented:
                return LiftedCircleMap.sampled(rule, f.grid_size)
        return LiftedCircleMap.sampled(_Composed(f, g), max(f.grid_size, g.grid_size))
    return _pl_compose(f, g)


def inverse(f: LiftedCircleMap) -> LiftedCircleMap:
    if f.kind == "rotation":
        return LiftedCircleMap.rotation(-f.theta)
    if f.kind == "pl":
        pts = []
        for x, y in f.breaks:
            k = _floor(y)
            pts.append((y - k, x - k))
        pts.sort()
        return LiftedCircleMap.pl(pts)
    if hasattr(f.rule, "inverse"):
        return LiftedCircleMap.sampled(f.rule.inverse(), f.grid_size)
    return LiftedCircleMap.sampled(_NumericInverse(f), f.grid_size)


def power(f: LiftedCircleMap, n: int) -> LiftedCircleMap:
    if n < 0:
        return power(inverse(f), -n)
    out = LiftedCircleMap.identity()
    base = f
    while n:
        if n & 1:
            out = compose(base, out)
        n >>= 1
        if n:
            base = compose(base, base)
    return out


def commutator(a: LiftedCircleMap, b: LiftedCircleMap) -> LiftedCircleMap:
    """[a, b] = a b a^-1 b^-1."""
    return compose(compose(a, b), compose(inverse(a), inverse(b)))


# -- fixed points and displacement ---------------------------------------------

def _merge_fixed(items: list, exact: bool) -> list:
    """Reduce mod 1 and merge touching pieces; ``lo == hi`` marks a point.

    An interval that wraps through 0 is reported as ``(lo, hi)`` with ``hi > 1``.
    """
    one = Fraction(1) if exact else 1.0
    zero = one - one
    red = []
    for lo, hi in items:
        k = _floor(lo)
        lo, hi = lo - k, hi - k
        if hi > one:
            red += [(lo, one), (zero, hi - one)]
        else:
            red.append((lo, hi))
    red.sort()
    merged: list = []
    for lo, hi in red:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    if any(lo == zero and hi >= one for lo, hi in merged):
        return [(zero, one)]
    if len(merged) > 1 and merged[-1][1] >= one and merged[0][0] == zero:
        last, first = merged.pop(), merged.pop(0)
        merged.append((last[0], first[1] + one))
    return merged


def fixed_points(f: LiftedCircleMap) -> list:
    """Fixed points of f in [0, 1) as ``(lo, hi)`` pairs; ``lo == hi`` marks an isolated point."""
    if f.kind == "rotation":
        if f.theta == 0:
            return [(0 * f.theta, 0 * f.theta + 1)]
        return []
    if f.kind == "pl":
        xs, ys = f._xs, f._ys
        out = []
        for i in range(len(xs) - 1):
            g0, g1 = ys[i] - xs[i], ys[i + 1] - xs[i + 1]
            if g0 == 0 and g1 == 0:
                out.append((xs[i], xs[i + 1]))
            elif g0 == 0:
                out.append((xs[i], xs[i]))
            elif g0 * g1 < 0:
                r = xs[i] - g0 * (xs[i + 1] - xs[i]) / (g1 - g0)
                out.append((r, r))
        return _merge_fixed(out, f.exact)
    m = f.grid_size
    u = np.arange(m + 1) / m
    g = f._grid_values - u
    if np.all(np.abs(g) <= 1e-14):
        return [(0.0, 1.0)]
    g[-1] = g[0]  # periodic; keeps the wrap-around cell consistent
    h = lambda x: float(f.evaluate_array(np.array([x]))[0]) - x
    # grid points where the displacement is zero to rounding count as roots
    zero = np.abs(g) <= 4 * np.finfo(float).eps
    roots = [float(u[j]) for j in np.flatnonzero(zero[:-1])]
    g = np.where(zero, 0.0, g)
    for j in np.flatnonzero(g[:-1] * g[1:] < 0):
        roots.append(brentq(h, u[j], u[j + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    # tangential zeros: |g| has a grid minimum without a sign change nearby
    a = np.abs(g[:-1])
    prev, nxt = np.roll(g[:-1], 1), np.roll(g[:-1], -1)
    cand = (a <= np.abs(prev)) & (a <= np.abs(nxt)) & (g[:-1] * prev > 0) & (g[:-1] * nxt > 0)
    cand &= a <= 2 * np.maximum(np.abs(nxt - g[:-1]), np.abs(g[:-1] - prev))
    for j in np.flatnonzero(cand):
        sgn = 1.0 if g[j] > 0 else -1.0
        res = minimize_scalar(lambda x: sgn * h(x), bounds=((j - 1) / m, (j + 1) / m),
                              method="bounded", options={"xatol": 1e-13})
        if abs(h(res.x)) <= TANGENT_TOL:
            roots.append(float(res.x))
    roots = sorted(r - math.floor(r) for r in roots)
    dedup: list = []
    for r in roots:
        if dedup and r - dedup[-1] < 1e-10:
            continue
        dedup.append(r)
    if len(dedup) > 1 and dedup[0] + 1 - dedup[-1] < 1e-10:
        dedup.pop()
    return [(r, r) for r in dedup]


def displacement_bounds(f: LiftedCircleMap):
    """Certified bounds (lo, hi) with lo <= f(x) - x <= hi for all x.

    Exact for PL and rotation maps (extremes sit on breakpoints).  For sampled
    maps the bound comes from monotonicity between grid points, so it is an
    outer bound that tightens with grid density.
    """
    if f.kind == "rotation":
        return f.theta, f.theta
    if f.kind == "pl":
        d = [y - x for x, y in f.breaks]
        return min(d), max(d)
    m = f.grid_size
    u = np.arange(m + 1) / m
    v = f._grid_values
    return float(np.min(v[:-1] - u[1:])), float(np.max(v[1:] - u[:-1]))


def canonical_equal(f: LiftedCircleMap, g: LiftedCircleMap, tol: float = 0.0) -> bool:
    """Sup-distance comparison on breakpoints plus a uniform grid."""
    if f.is_pl_like and g.is_pl_like:
        exact = f.exact and g.exact
        pts = set(f.breakpoints()) | set(g.breakpoints()) | {Fraction(0) if exact else 0.0}
        if exact:
            return all(abs(evaluate(f, x) - evaluate(g, x)) <= tol for x in pts)
        pts = sorted(float(p) for p in pts)
    else:
        pts = sorted(set(float(p) for p in f.breakpoints() + g.breakpoints()))
    grid = np.concatenate([np.asarray(pts, dtype=float), np.arange(DEFAULT_GRID) / DEFAULT_GRID])
    return bool(np.max(np.abs(f.evaluate_array(grid) - g.evaluate_array(grid))) <= tol)


# -- words and representations ---------------------------------------------------

Word = tuple  # tuple of (generator name, +1 | -1)


def parse_word(text: str, names: Iterable[str]) -> Word:
    """Space separated letters; an upper-cased generator name is its inverse."""
    names = set(names)
    letters = []
    for tok in text.split():
        if tok in names:
            letters.append((tok, 1))
        elif tok.lower() in names and tok != tok.lower():
            letters.append((tok.lower(), -1))
        else:
            raise KeyError(f"unknown generator {tok!r}")
    return tuple(letters)


def format_word(word: Word) -> str:
    return " ".join(n if e > 0 else n.upper() for n, e in word)


def word_inverse(word: Word) -> Word:
    return tuple((n, -e) for n, e in reversed(word))


@dataclass(frozen=True, eq=False)
class GroupRepresentation:
    """Generators mapped to lifted circle maps, with optional relators."""

    generators: dict
    relators: tuple = ()

    def __post_init__(self):
        for w in self.relators:
            for name, _ in w:
                if name not in self.generators:
                    raise KeyError(f"relator uses unknown generator {name!r}")

    @cached_property
    def _inverses(self) -> dict:
        return {n: inverse(f) for n, f in self.generators.items()}

    def letter(self, name: str, exp: int) -> LiftedCircleMap:
        if name not in self.generators:
            raise KeyError(f"unknown generator {name!r}")
        return self.generators[name] if exp > 0 else self._inverses[name]

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def alphabet(self) -> list:
        """Letters in a fixed order: each generator then its inverse."""
        out = []
        for n in self.generators:
            out += [(n, 1), (n, -1)]
        return out


def word_evaluate(rep: GroupRepresentation, w) -> LiftedCircleMap:
    """Composite map of a word; letters act right to left like composition."""
    if isinstance(w, str):
        w = rep.word(w)
    out = LiftedCircleMap.identity()
    for name, e in reversed(w):
        out = compose(rep.letter(name, e), out)
    return out


def reduced_words(letters: list, max_len: int):
    """Freely reduced words of length 0..max_len in lexicographic order per length."""
    level = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for a in letters:
                if w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                    continue
                nxt.append(w + (a,))
        for w in nxt:
            yield w
        level = nxt


# -- random maps for harnesses ---------------------------------------------------

def random_pl_map(rng: np.random.Generator, k_range=(2, 12), denominator: int = 2**20,
                  shift_range=(-1, 1)) -> LiftedCircleMap:
    """Exact PL map: k uniform breakpoints, sorted uniform y values, random shift."""
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    xs = sorted(set(int(v) for v in rng.integers(0, denominator, size=k)))
    ys = sorted(set(int(v) for v in rng.integers(0, denominator, size=len(xs))))
    while len(ys) < len(xs):
        ys = sorted(set(ys) | {int(rng.integers(0, denominator))})
    lo, hi = shift_range
    span = int((hi - lo) * denominator)
    shift = Fraction(int(lo * denominator) + (int(rng.integers(0, span)) if span else 0), denominator)
    pts = [(Fraction(x, denominator), Fraction(y, denominator) + shift) for x, y in zip(xs, ys)]
    return LiftedCircleMap.pl(pts)
