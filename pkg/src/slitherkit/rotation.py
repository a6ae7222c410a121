"""Rotation numbers with validated enclosures, and inequality harnesses built on them."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .circle_homeo import (
    GroupRepresentation,
    LiftedCircleMap,
    canonical_equal,
    commutator,
    compose,
    displacement_bounds,
    evaluate,
    fixed_points,
    format_word,
    inverse,
    power,
    reduced_words,
    word_evaluate,
)
from .errors import PreconditionError, UnsupportedInputError

EPS = np.finfo(float).eps
BASE_POINTS = 8

SPACE_LIKE = "space-like"
POSITIVE = "positive time-like"
NEGATIVE = "negative time-like"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class RotationEnclosure:
    lo: float | Fraction
    hi: float | Fraction
    iterations: int
    exact: bool = False
    float_fallback: bool = False

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float(self.lo + self.hi) / 2

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def excludes_integers(self) -> bool:
        """True when no integer lies in [lo, hi]."""
        return math.floor(self.lo) == math.floor(self.hi) and math.floor(self.lo) != self.lo

    def to_dict(self) -> dict:
        d = {"lo": _jsonable(self.lo), "hi": _jsonable(self.hi),
             "iterations": self.iterations, "exact": self.exact}
        if self.float_fallback:
            d["float_fallback"] = True
        return d


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return float(v)


@dataclass
class InequalityReport:
    checked: int = 0
    passes: int = 0
    inconclusive: int = 0
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf

    def record(self, margin_lo, margin_hi, witness=None):
        """Record one check of a quantity enclosed in [v_lo, v_hi] against a bound.

        ``margin_lo``/``margin_hi`` bound (bound - value): positive means satisfied.
        """
        self.checked += 1
        self.worst_margin = min(self.worst_margin, float(margin_lo))
        if margin_lo > 0:
            self.passes += 1
        elif margin_hi <= 0:
            self.violations.append(witness)
        else:
            self.inconclusive += 1

    def merge(self, other: "InequalityReport") -> "InequalityReport":
        return InequalityReport(
            self.checked + other.checked,
            self.passes + other.passes,
            self.inconclusive + other.inconclusive,
            self.violations + other.violations,
            min(self.worst_margin, other.worst_margin),
        )

    @property
    def status(self) -> str:
        if self.violations:
            return "violation"
        if self.inconclusive:
            return "inconclusive"
        return "pass"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        d["worst_margin"] = float(self.worst_margin) if math.isfinite(self.worst_margin) else None
        return d


# -- orbit enclosures -------------------------------------------------------------

def _step_margin(f: LiftedCircleMap) -> float:
    """Absolute slack per evaluation so that float orbits stay outward-rounded."""
    if f.kind == "pl":
        xs, ys = f._float_table
        smax = float(np.max(np.diff(ys) / np.diff(xs)))
        return 8 * EPS * (4 + 4 * smax)
    if f.kind == "rotation":
        return 4 * EPS
    return float(getattr(f.rule, "eval_error", 1e-13))


def _enclosure_from_orbits(lo, hi, n, m):
    """Bounds on n*r from orbits of base points j/m (last axis) after n steps."""
    x = np.arange(m + 1) / m
    lo_ext = np.concatenate([lo, lo[..., :1] + 1], axis=-1)
    hi_ext = np.concatenate([hi, hi[..., :1] + 1], axis=-1)
    lower = np.min(lo_ext[..., :-1] - x[1:], axis=-1)
    upper = np.max(hi_ext[..., 1:] - x[:-1], axis=-1)
    # the classical base-point bound |f^n(0) - n r| < 1
    lower = np.maximum(lower, lo[..., 0] - 1)
    upper = np.minimum(upper, hi[..., 0] + 1)
    lo_r, hi_r = lower / n, upper / n
    pad = 4 * EPS * (1 + np.maximum(np.abs(lo_r), np.abs(hi_r)))
    return lo_r - pad, hi_r + pad


def _iterate_enclosures(step, margin, shape, n_iter: int, m: int = BASE_POINTS):
    """Run outward-rounded orbits; intersect enclosures at doubling checkpoints."""
    base = np.broadcast_to(np.arange(m) / m, shape + (m,)).astype(float)
    lo, hi = base.copy(), base.copy()
    best_lo = np.full(shape, -np.inf)
    best_hi = np.full(shape, np.inf)
    checkpoint = 1
    for n in range(1, n_iter + 1):
        both = step(np.concatenate([lo, hi], axis=-1))
        lo, hi = both[..., :m], both[..., m:]
        lo = lo - (margin + 8 * EPS * np.abs(lo))
        hi = hi + (margin + 8 * EPS * np.abs(hi))
        if n == checkpoint or n == n_iter:
            a, b = _enclosure_from_orbits(lo, hi, n, m)
            best_lo = np.maximum(best_lo, a)
            best_hi = np.minimum(best_hi, b)
            checkpoint *= 2
    return best_lo, best_hi


class PLBatch:
    """Vectorised evaluation of many PL maps at once (one searchsorted call)."""

    def __init__(self, maps: Sequence[LiftedCircleMap]):
        tables = [f.as_pl()._float_table for f in maps]
        self.count = len(maps)
        self.x0 = np.array([t[0][0] for t in tables])
        offs = 4.0 * np.arange(self.count)
        self.keys = np.concatenate([t[0] + o for t, o in zip(tables, offs)])
        self.xs = np.concatenate([t[0] for t in tables])
        self.ys = np.concatenate([t[1] for t in tables])
        ends = np.cumsum([len(t[0]) for t in tables])
        self.starts = ends - np.array([len(t[0]) for t in tables])
        self.ends = ends
        self.offs = offs
        self.margin = np.array([_step_margin(f.as_pl()) for f in maps])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """x has shape (count, P); row i is evaluated by map i."""
        k = np.floor(x - self.x0[:, None])
        u = x - k
        idx = np.searchsorted(self.keys, u + self.offs[:, None], side="right") - 1
        idx = np.clip(idx, self.starts[:, None], self.ends[:, None] - 2)
        x0, x1 = self.xs[idx], self.xs[idx + 1]
        y0, y1 = self.ys[idx], self.ys[idx + 1]
        return y0 + (u - x0) * ((y1 - y0) / (x1 - x0)) + k


def rotation_enclosures(maps: Sequence[LiftedCircleMap], n_iter: int = 2000) -> list:
    """Float enclosures for many PL/rotation maps in one vectorised sweep (no certification)."""
    if not maps:
        return []
    batch = PLBatch(maps)
    lo, hi = _iterate_enclosures(batch, batch.margin[:, None], (batch.count,), n_iter)
    out = []
    for f, a, b in zip(maps, lo, hi):
        if f.kind == "rotation":
            out.append(RotationEnclosure(f.theta, f.theta, n_iter, True))
        else:
            out.append(RotationEnclosure(float(a), float(b), n_iter))
    return out


def _certify_rational(f: LiftedCircleMap, lo, hi, qmax: int):
    """Find p/q in [lo, hi] with Z^-p f^q having a fixed point, smallest q first."""
    candidates = {q: [p for p in range(math.ceil(lo * q), math.floor(hi * q) + 1) if math.gcd(p, q) == 1]
                  for q in range(1, qmax + 1)}
    top = max((q for q, ps in candidates.items() if ps), default=0)
    fq = LiftedCircleMap.identity()
    for q in range(1, top + 1):
        fq = compose(f, fq)
        for p in candidates[q]:
            g = compose(LiftedCircleMap.translation(-p), fq)
            if fixed_points(g):
                return Fraction(p, q)
    return None


def rotation_number(f: LiftedCircleMap, n_iter: int = 10_000, certify: bool = True,
                    qmax: int = 24) -> RotationEnclosure:
    """Enclosure of the rotation number of f; exact when a periodic orbit certifies p/q."""
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    if f.kind == "rotation":
        return RotationEnclosure(f.theta, f.theta, n_iter, True, not f.exact)
    # strip the integer part of f(0) so Z^k f gives the same enclosure shifted by k
    k = math.floor(evaluate(f, 0))
    if k:
        rule = f.rule
        if f.kind == "pl" or hasattr(rule, "shifted"):
            e = rotation_number(compose(LiftedCircleMap.translation(-k), f), n_iter, certify, qmax)
            return RotationEnclosure(e.lo + k, e.hi + k, e.iterations, e.exact, e.float_fallback)
    if f.kind == "pl":
        batch = PLBatch([f])
        if certify and n_iter > 256:
            # a certificate is a proof at any orbit length: try a short pass first
            lo, hi = _iterate_enclosures(batch, batch.margin[:, None], (1,), 256)
            r = _certify_rational(f, float(lo[0]), float(hi[0]), qmax)
            if r is not None:
                return RotationEnclosure(r, r, 256, True, not f.exact)
        lo, hi = _iterate_enclosures(batch, batch.margin[:, None], (1,), n_iter)
        lo, hi = float(lo[0]), float(hi[0])
    else:
        lo, hi = _iterate_enclosures(f.evaluate_array, _step_margin(f), (), n_iter)
        lo, hi = float(lo), float(hi)
    if certify:
        if f.kind == "pl":
            r = _certify_rational(f, lo, hi, qmax)
            if r is not None:
                return RotationEnclosure(r, r, n_iter, True, not f.exact)
        else:
            cert = getattr(f.rule, "certified_rotation", None)
            r = cert() if cert else None
            if r is not None and lo <= r <= hi:
                return RotationEnclosure(r, r, n_iter, True)
            if fixed_points(f):
                return RotationEnclosure(Fraction(0), Fraction(0), n_iter, True, True)
    return RotationEnclosure(lo, hi, n_iter)


def classify(f: LiftedCircleMap) -> str:
    if fixed_points(f):
        return SPACE_LIKE
    lo, hi = displacement_bounds(f)
    if lo > 0:
        return POSITIVE
    if hi < 0:
        return NEGATIVE
    return UNRESOLVED


def _add(*encs: RotationEnclosure, signs: Sequence[int]) -> RotationEnclosure:
    lo = hi = 0
    for e, s in zip(encs, signs):
        if s > 0:
            lo, hi = lo + e.lo, hi + e.hi
        else:
            lo, hi = lo - e.hi, hi - e.lo
    return RotationEnclosure(lo, hi, min(e.iterations for e in encs),
                             all(e.exact for e in encs),
                             any(e.float_fallback for e in encs))


def delta_r(a: LiftedCircleMap, b: LiftedCircleMap, n_iter: int = 10_000) -> RotationEnclosure:
    """Enclosure of r(a) - r(ab) + r(b)."""
    ra = rotation_number(a, n_iter)
    rb = rotation_number(b, n_iter)
    rab = rotation_number(compose(a, b), n_iter)
    return _add(ra, rab, rb, signs=(1, -1, 1))


# -- inequality harnesses -----------------------------------------------------------

def _check_grid(f: LiftedCircleMap, samples: int):
    exact = f.exact
    if exact:
        pts = {Fraction(j, samples) for j in range(samples)}
    else:
        pts = {j / samples for j in range(samples)}
    return sorted(pts | set(f.breakpoints()))


def _first_deviation(f: LiftedCircleMap, g: LiftedCircleMap):
    grid = np.concatenate([np.asarray([float(p) for p in f.breakpoints() + g.breakpoints()]),
                           np.arange(4096) / 4096])
    d = np.abs(f.evaluate_array(grid) - g.evaluate_array(grid))
    j = int(np.argmax(d))
    return float(grid[j]), float(d[j])


def verify_commutator_bound(a: LiftedCircleMap, b: LiftedCircleMap, c: LiftedCircleMap,
                            samples: int = 256) -> InequalityReport:
    """Check c^-2(x) < [a, b](x) < c^2(x) over one period."""
    if classify(c) != POSITIVE:
        raise PreconditionError("c is not positive time-like")
    ident = LiftedCircleMap.identity()
    for name, g in (("a", a), ("b", b)):
        comm = commutator(g, c)
        if not canonical_equal(comm, ident, 1e-9):
            x, dev = _first_deviation(comm, ident)
            raise PreconditionError(f"[{name}, c] is not the identity: deviation {dev:.3g} at x={x:.6g}",
                                    witness={"pair": f"{name},c", "x": x, "deviation": dev})
    ab = commutator(a, b)
    lower, upper = power(c, -2), power(c, 2)
    report = InequalityReport()
    exact = ab.exact and lower.exact and upper.exact
    tol = 0 if exact else 1e-12
    for x in _check_grid(ab, samples):
        v, lo, hi = evaluate(ab, x), evaluate(lower, x), evaluate(upper, x)
        m = min(v - lo, hi - v)
        report.record(m - tol, m + tol, {"x": _jsonable(x), "value": _jsonable(v),
                                         "lower": _jsonable(lo), "upper": _jsonable(hi)})
    return report


def product_of_commutators(pairs: Sequence) -> LiftedCircleMap:
    out = LiftedCircleMap.identity()
    for a, b in pairs:
        out = compose(out, commutator(a, b))
    return out


def _record_abs_bound(report, enc: RotationEnclosure, bound, strict: bool, witness):
    """|r| < bound (strict) or |r| <= bound, judged from an enclosure."""
    worst = max(abs(enc.lo), abs(enc.hi))
    best = 0 if enc.lo <= 0 <= enc.hi else min(abs(enc.lo), abs(enc.hi))
    m_lo, m_hi = bound - worst, bound - best
    if not strict and enc.exact and m_lo == 0:
        m_lo = Fraction(1, 10**30)  # attained bound is allowed when non-strict
    if not strict and m_lo == 0 and enc.lo == enc.hi:
        m_lo = Fraction(1, 10**30)
    if strict and m_hi == 0:
        m_hi = 0
    report.record(m_lo, m_hi, witness)


def milnor_wood_report(pairs: Sequence, encs: dict, a_encs: Sequence[RotationEnclosure] | None = None):
    """Shared logic once the enclosures are known; see verify_milnor_wood."""
    n = len(pairs)
    report = InequalityReport()
    total = encs["product"]
    _record_abs_bound(report, total, n + 1, True, {"check": "product", "enclosure": total.to_dict()})
    if n == 1:
        com = encs["commutator"]
        _record_abs_bound(report, com, 1, False, {"check": "single", "enclosure": com.to_dict()})
        ra = a_encs[0] if a_encs else None
        if ra is not None and ra.excludes_integers():
            _record_abs_bound(report, com, Fraction(1, 2), False,
                              {"check": "half", "enclosure": com.to_dict(), "r_a": ra.to_dict()})
    return report


def verify_milnor_wood(pairs: Sequence, n_iter: int = 10_000, certify: bool = True) -> InequalityReport:
    """|r([a1,b1]...[an,bn])| < n + 1, plus the n = 1 refinements.

    For n = 1 this also checks |r([a,b])| <= 1 and, when r(a) is certified to
    avoid the integers, |r([a,b])| <= 1/2.
    """
    prod = product_of_commutators(pairs)
    encs = {"product": rotation_number(prod, n_iter, certify)}
    a_encs = None
    if len(pairs) == 1:
        encs["commutator"] = encs["product"]
        a_encs = [rotation_number(pairs[0][0], n_iter, certify)]
    return milnor_wood_report(pairs, encs, a_encs)


@dataclass
class MilnorWoodSuite:
    delta: InequalityReport
    single: InequalityReport
    half: InequalityReport
    half_pairs: int
    max_half_excess: float

    def to_dict(self) -> dict:
        return {"delta_r": self.delta.to_dict(), "single_commutator": self.single.to_dict(),
                "half_bound": self.half.to_dict(), "half_pairs": self.half_pairs,
                "max_half_excess": self.max_half_excess}


def milnor_wood_suite(pairs: Sequence, n_iter: int = 2000) -> MilnorWoodSuite:
    """Batch harness over many (a, b) pairs: delta_r, |r([a,b])| <= 1 and the 1/2 refinement.

    Enclosures come from one vectorised sweep; commutators whose enclosure
    reaches past 1/2 are recomputed with rational certification, so an
    attained bound can still pass.
    """
    maps = []
    for a, b in pairs:
        maps += [a, b, compose(a, b), commutator(a, b)]
    encs = rotation_enclosures(maps, n_iter)
    delta, single, half = InequalityReport(), InequalityReport(), InequalityReport()
    half_pairs, excess = 0, -math.inf
    for i in range(len(pairs)):
        ra, rb, rab, rc = encs[4 * i: 4 * i + 4]
        if max(abs(rc.lo), abs(rc.hi)) > Fraction(1, 2):
            # borderline: certify this commutator exactly before judging it
            rc = rotation_number(maps[4 * i + 3], max(n_iter, 10_000))
        d = _add(ra, rab, rb, signs=(1, -1, 1))
        _record_abs_bound(delta, d, 1, False, {"pair": i, "enclosure": d.to_dict()})
        _record_abs_bound(single, rc, 1, False, {"pair": i, "enclosure": rc.to_dict()})
        if ra.excludes_integers():
            half_pairs += 1
            _record_abs_bound(half, rc, Fraction(1, 2), False, {"pair": i, "enclosure": rc.to_dict()})
            excess = max(excess, float(max(abs(rc.lo), abs(rc.hi))) - 0.5 - float(rc.width))
    return MilnorWoodSuite(delta, single, half, half_pairs, excess)


# -- group-level probes --------------------------------------------------------------

def _nonidentity(f: LiftedCircleMap) -> bool:
    return not canonical_equal(f, LiftedCircleMap.identity(), 1e-9)


def _fixed_representatives(f: LiftedCircleMap) -> list:
    out = []
    for lo, hi in fixed_points(f):
        out += [float(lo), float(hi), float(lo + hi) / 2]
    return [x - math.floor(x) for x in out]


def spacelike_probe(rep: GroupRepresentation, max_len: int, tol: float = 1e-9,
                    details: bool = False) -> dict:
    """Finite-depth look at the space-like / time-like dichotomy for a finitely generated group."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    letters = rep.alphabet()
    kinds: dict = {}
    maps: dict = {}
    for w in reduced_words(letters, max_len):
        if not w:
            continue
        prefix = maps.get(w[:-1]) if len(w) > 1 else LiftedCircleMap.identity()
        f = compose(prefix, rep.letter(*w[-1]))
        maps[w] = f
        kinds[w] = classify(f) if _nonidentity(f) else "identity"
    spacelike = [w for w, k in kinds.items() if k == SPACE_LIKE]
    timelike = [w for w, k in kinds.items() if k in (POSITIVE, NEGATIVE)]

    common = None
    if spacelike:
        cands = sorted({x for w in spacelike for x in _fixed_representatives(maps[w])})
        for x in cands:
            xs = np.array([x])
            if all(abs(float(maps[w].evaluate_array(xs)[0]) - x) <= tol for w in spacelike):
                common = x
                break

    def splits(w) -> bool:
        # can w be cut into consecutive space-like subwords?
        ok = [True] + [False] * len(w)
        for j in range(1, len(w) + 1):
            ok[j] = any(ok[i] and kinds.get(w[i:j]) == SPACE_LIKE for i in range(j))
        return ok[-1]

    decomposable = [w for w in timelike if splits(w)]
    gens = [(n, 1) for n in rep.generators]
    defect = 0.0
    for x in gens:
        for y in gens:
            d = delta_r(rep.letter(*x), rep.letter(*y), 2000)
            defect = max(defect, float(max(abs(d.lo), abs(d.hi))))
    out = {
        "probe": "finite-depth",
        "max_len": max_len,
        "words": len(kinds),
        "identity_words": sum(1 for k in kinds.values() if k == "identity"),
        "spacelike": [format_word(w) for w in spacelike],
        "timelike": len(timelike),
        "unresolved": sum(1 for k in kinds.values() if k == UNRESOLVED),
        "common_fixed_point": common,
        "timelike_decomposable": len(decomposable),
        "all_timelike_decomposable": len(decomposable) == len(timelike),
        "generator_delta_r_max": defect,
    }
    if details:
        out["kinds"] = {format_word(w): k for w, k in kinds.items()}
        out["maps"] = {format_word(w): f for w, f in maps.items()}
    return out


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple  # (position in [0, 1), weight)

    def __post_init__(self):
        pos = [p for p, _ in self.atoms]
        if len(set(pos)) != len(pos):
            raise ValueError("atom positions must be distinct")
        if any(w <= 0 for _, w in self.atoms) or sum(w for _, w in self.atoms) != 1:
            raise ValueError("weights must be positive and sum to 1")

    def mass(self, lo, hi):
        """Mass of [lo, hi) for the periodic lift to the line (signed if hi < lo)."""
        if hi < lo:
            return -self.mass(hi, lo)
        total = 0
        for p, w in self.atoms:
            first = math.ceil(lo - p)
            last = math.ceil(hi - p) - 1
            total += w * max(0, last - first + 1)
        return total


def invariant_measure_rational(f: LiftedCircleMap, qmax: int = 24) -> AtomicMeasure:
    """Uniform atoms on a periodic orbit; requires a certified rational rotation number."""
    if f.kind == "sampled":
        raise UnsupportedInputError("needs a PL or rotation map")
    enc = rotation_number(f, 2000, True, qmax)
    if not enc.exact or enc.float_fallback or Fraction(enc.lo).denominator > qmax:
        raise UnsupportedInputError("rotation number is not certified rational")
    r = Fraction(enc.lo)
    p, q = r.numerator, r.denominator
    g = compose(LiftedCircleMap.translation(-p), power(f, q))
    x0 = fixed_points(g)[0][0]
    orbit, x = [], x0
    for _ in range(q):
        orbit.append(x - math.floor(x))
        x = evaluate(f, x)
    mu = AtomicMeasure(tuple((pt, Fraction(1, q)) for pt in sorted(orbit)))
    zero = Fraction(0) if f.exact else 0.0
    if mu.mass(zero, evaluate(f, zero)) != r:
        raise UnsupportedInputError("orbit measure does not reproduce the rotation number")
    return mu


def rescale_map(f: LiftedCircleMap, n: int) -> LiftedCircleMap:
    """x -> f(n x)/n, the n-fold cover action; rotation numbers divide by n."""
    if f.kind == "rotation":
        return LiftedCircleMap.rotation(f.theta / n)
    if f.kind == "pl":
        pts = []
        for k in range(n):
            for x, y in f.breaks:
                pts.append(((x + k) / n, (y + k) / n))
        return LiftedCircleMap.pl(sorted(pts))
    rule = f.rule
    if hasattr(rule, "compose") and hasattr(rule, "shifted"):
        return LiftedCircleMap.sampled(_Rescaled(rule, n), f.grid_size)
    return LiftedCircleMap.sampled(lambda u, f=f: f.evaluate_array(n * u) / n, f.grid_size)


class _Rescaled:
    """x -> rule(n x) / n, closed under compose / inverse / integer shifts when the rule is."""

    def __init__(self, rule, n: int):
        self.rule, self.n = rule, n
        self.eval_error = getattr(rule, "eval_error", 0.0) / n

    def __call__(self, x):
        return self.rule(self.n * np.asarray(x, dtype=float)) / self.n

    def compose(self, other):
        if not isinstance(other, _Rescaled) or other.n != self.n:
            return NotImplemented
        return _Rescaled(self.rule.compose(other.rule), self.n)

    def inverse(self):
        return _Rescaled(self.rule.inverse(), self.n)

    def shifted(self, k: int):
        return _Rescaled(self.rule.shifted(k * self.n), self.n)

    def certified_rotation(self):
        cert = getattr(self.rule, "certified_rotation", None)
        r = cert() if cert else None
        return None if r is None else Fraction(r) / self.n


def rescale_representation(rep: GroupRepresentation, n: int) -> GroupRepresentation:
    return GroupRepresentation({k: rescale_map(f, n) for k, f in rep.generators.items()}, rep.relators)


def compare_rotation_functions(rep1: GroupRepresentation, rep2: GroupRepresentation,
                               words: Iterable, n_iter: int = 10_000) -> dict:
    """Fit r1(w) ~ C r2(w) across words and compare residuals with enclosure widths."""
    if set(rep1.generators) != set(rep2.generators):
        raise ValueError("representations use different generators")
    words = [rep1.word(w) if isinstance(w, str) else tuple(w) for w in words]
    e1 = [rotation_number(word_evaluate(rep1, w), n_iter) for w in words]
    e2 = [rotation_number(word_evaluate(rep2, w), n_iter) for w in words]
    m1 = np.array([e.mid for e in e1])
    m2 = np.array([e.mid for e in e2])
    denom = float(m2 @ m2)
    C = float(m1 @ m2) / denom if denom else 1.0
    # constants compatible with every pair of enclosures (interval quotient)
    lo, hi = -math.inf, math.inf
    for a, b in zip(e1, e2):
        if b.lo <= 0 <= b.hi:
            continue
        q = [float(x) / float(y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
        lo, hi = max(lo, min(q)), min(hi, max(q))
    if lo <= hi:
        C = min(max(C, lo), hi)
    resid = np.abs(m1 - C * m2)
    allowed = np.array([float(a.width) / 2 + abs(C) * float(b.width) / 2 for a, b in zip(e1, e2)])
    allowed += 1e-12 * (1 + np.abs(m1))
    return {
        "C": C,
        "residual": float(resid.max()) if len(resid) else 0.0,
        "allowed": allowed.tolist(),
        "status": "pass" if np.all(resid <= allowed) else "fail",
        "words": [format_word(w) for w in words],
    }


def free_action_commutativity_check(rep: GroupRepresentation, max_len: int, tol: float = 1e-9) -> dict:
    """For a free action, words up to max_len/2 must commute pairwise."""
    letters = rep.alphabet()
    maps = {}
    for w in reduced_words(letters, max_len):
        if not w:
            continue
        prefix = maps[w[:-1]] if len(w) > 1 else LiftedCircleMap.identity()
        f = compose(prefix, rep.letter(*w[-1]))
        maps[w] = f
        if _nonidentity(f) and fixed_points(f):
            raise PreconditionError(f"word {format_word(w)!r} has a fixed point",
                                    witness=format_word(w))
    short = [w for w in maps if len(w) <= max_len // 2]
    ident = LiftedCircleMap.identity()
    worst = 0.0
    failures = []
    for i, u in enumerate(short):
        for v in short[i + 1:]:
            c = commutator(maps[u], maps[v])
            if not canonical_equal(c, ident, tol):
                dev = _first_deviation(c, ident)[1]
                worst = max(worst, dev)
                failures.append((format_word(u), format_word(v)))
    return {"words": len(maps), "pairs": len(short) * (len(short) - 1) // 2,
            "failures": failures[:20], "max_deviation": worst,
            "status": "pass" if not failures else "fail"}


def staircase_pair() -> tuple:
    """Exact PL pair whose commutator moves a point by almost -2.

    a pins [0, 0.98] near 0 and jumps up just before 1; b is a near-translation
    by 0.97 with its own jump, so [a, b] stacks two almost-unit drops.
    """
    F = Fraction
    a = LiftedCircleMap.pl([(F(0), F(0)), (F(98, 100), F(1, 100)), (F(99, 100), F(99, 100)),
                            (F(9901, 10000), F(9999, 10000))])
    b = LiftedCircleMap.pl([(F(0), F(97, 100)), (F(99, 100), F(98, 100)),
                            (F(9901, 10000), F(9801, 10000))])
    return a, b
