"""Hyperbolic plane in the Poincaré disk: Möbius maps, their boundary actions and lifts.

Boundary points are angles in turns (period 1), so the point ``x`` is
``exp(2 pi i x)`` on the unit circle.  A Möbius map is stored as a real SL(2)
matrix acting on the upper half plane; the disk form ``z -> (alpha z + beta) /
(conj(beta) z + conj(alpha))`` is derived through the Cayley transform
``z -> (z - i) / (z + i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.linalg import expm, logm

from .circle_homeo import GroupRepresentation, LiftedCircleMap, Word, parse_word
from .errors import ResolutionError

TWO_PI = 2 * math.pi
_CAYLEY = np.array([[1, -1j], [1, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def _normalize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float).reshape(2, 2)
    det = np.linalg.det(m)
    if not det > 0:
        raise ValueError("matrix must have positive determinant")
    m = m / math.sqrt(det)
    tr = m[0, 0] + m[1, 1]
    if tr < 0 or (tr == 0 and m.flat[np.flatnonzero(m)[0]] < 0):
        m = -m
    return m


@dataclass(frozen=True, eq=False)
class Moebius:
    """Orientation-preserving isometry of H^2, as a normalised real SL(2) matrix."""

    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", _normalize(self.m))

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(np.eye(2))

    @classmethod
    def from_disk(cls, alpha: complex, beta: complex) -> "Moebius":
        d = np.array([[alpha, beta], [np.conj(beta), np.conj(alpha)]])
        return cls((_CAYLEY_INV @ d @ _CAYLEY).real)

    @classmethod
    def rotation(cls, turns: float) -> "Moebius":
        """Elliptic rotation about the disk centre by ``turns`` of a full turn."""
        return cls.from_disk(np.exp(1j * math.pi * turns), 0)

    @classmethod
    def translation(cls, length: float, axis_angle: float = 0.0) -> "Moebius":
        """Hyperbolic translation by ``length`` along the diameter towards boundary angle ``axis_angle``."""
        ch, sh = math.cosh(length / 2), math.sinh(length / 2)
        r = np.exp(1j * math.pi * axis_angle)
        # conjugate the real-axis translation by a rotation
        alpha, beta = ch, sh * r * r
        return cls.from_disk(alpha, beta)

    @cached_property
    def disk(self) -> tuple[complex, complex]:
        """(alpha, beta) of the SU(1,1) form; determined up to a common sign."""
        d = _CAYLEY @ self.m @ _CAYLEY_INV
        return complex(d[0, 0]), complex(d[0, 1])

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return Moebius(self.m @ other.m)

    def inverse(self) -> "Moebius":
        a, b, c, d = self.m.ravel()
        return Moebius(np.array([[d, -b], [-c, a]]))

    def act_disk(self, z):
        alpha, beta = self.disk
        z = np.asarray(z, dtype=complex)
        return (alpha * z + beta) / (np.conj(beta) * z + np.conj(alpha))

    def derivative_disk(self, z):
        alpha, beta = self.disk
        return 1.0 / (np.conj(beta) * np.asarray(z, dtype=complex) + np.conj(alpha)) ** 2

    def distance_to_identity(self) -> float:
        return float(np.max(np.abs(self.m - np.eye(2))))

    def __repr__(self) -> str:
        return f"Moebius({self.m.tolist()})"


@dataclass(frozen=True)
class BoundaryPoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % 1.0)


@dataclass(frozen=True)
class GeodesicH2:
    """Oriented geodesic from ``u`` (backward end) to ``s`` (forward end)."""

    u: float
    s: float

    def __post_init__(self):
        u, s = float(self.u) % 1.0, float(self.s) % 1.0
        if u == s:
            raise ValueError("geodesic endpoints must differ")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "s", s)


def boundary_action(g: Moebius, p):
    """Image of boundary angle(s) p under g, reduced to [0, 1)."""
    w = np.exp(1j * TWO_PI * np.asarray(p, dtype=float))
    out = np.mod(np.angle(g.act_disk(w)) / TWO_PI, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def disk_to_half_plane(z):
    z = np.asarray(z, dtype=complex)
    return 1j * (1 + z) / (1 - z)


def half_plane_to_disk(w):
    w = np.asarray(w, dtype=complex)
    return (w - 1j) / (w + 1j)


# -- classification -------------------------------------------------------------------

@dataclass(frozen=True)
class MoebiusType:
    kind: str
    attracting: float | None = None
    repelling: float | None = None
    fixed: tuple = ()


def boundary_fixed_points(g: Moebius) -> list:
    """Fixed angles on the circle: roots of conj(beta) w^2 + (conj(alpha) - alpha) w - beta."""
    alpha, beta = g.disk
    if abs(beta) < 1e-15:
        return []
    roots = np.roots([np.conj(beta), np.conj(alpha) - alpha, -beta])
    out = [float(np.angle(w) / TWO_PI % 1.0) for w in roots if abs(abs(w) - 1) < 1e-6]
    out.sort()
    if len(out) == 2 and (abs(out[0] - out[1]) < 1e-9 or abs(out[0] + 1 - out[1]) < 1e-9):
        out = out[:1]
    return out


def classify_moebius(g: Moebius, tol: float = 1e-10) -> MoebiusType:
    t = abs(g.trace)
    if abs(t - 2) <= tol:
        if g.distance_to_identity() <= tol:
            return MoebiusType("identity")
        fx = boundary_fixed_points(g)
        if len(fx) == 2:  # a double root splits numerically
            w = np.exp(1j * TWO_PI * np.array(fx)).sum()
            fx = [float(np.angle(w) / TWO_PI % 1.0)]
        return MoebiusType("parabolic", fixed=tuple(fx))
    if t < 2:
        return MoebiusType("elliptic")
    fx = boundary_fixed_points(g)
    w = np.exp(1j * TWO_PI * np.array(fx))
    deriv = np.abs(g.derivative_disk(w))
    att, rep = (fx[0], fx[1]) if deriv[0] < deriv[1] else (fx[1], fx[0])
    return MoebiusType("hyperbolic", att, rep, tuple(fx))


def translation_length(g: Moebius) -> float:
    t = abs(g.trace)
    return 2 * math.acosh(t / 2) if t > 2 else 0.0


# -- lifts to the line -------------------------------------------------------------------

class MoebiusRule:
    """Vectorised lift x -> x + d(x) of the boundary action of a Möbius map.

    ``winding`` 0 is the lift with a fixed point for parabolic and hyperbolic
    elements (and the identity), and the lift with rotation number in [0, 1)
    for elliptic ones; winding k adds Z^k.
    """

    eval_error = 1e-13

    def __init__(self, g: Moebius, winding: int = 0):
        self.moebius = g
        self.winding = int(winding)
        alpha, beta = g.disk
        self._arg = math.atan2(alpha.imag, alpha.real)
        self._q = beta / alpha
        self._offset = self._canonical_offset()

    def _raw(self, x):
        x = np.asarray(x, dtype=float)
        return x + (self._arg + np.angle(1 + self._q * np.exp(-1j * TWO_PI * x))) / math.pi

    def _canonical_offset(self) -> int:
        kind = classify_moebius(self.moebius).kind
        if kind == "elliptic":
            return math.floor(float(self._raw(0.0)))
        if kind == "identity":
            return round(float(self._raw(0.0)))
        x = boundary_fixed_points(self.moebius)[0]
        return round(float(self._raw(x)) - x)

    def __call__(self, x):
        return self._raw(x) - self._offset + self.winding

    def compose(self, other: "MoebiusRule") -> "MoebiusRule":
        prod = MoebiusRule(self.moebius @ other.moebius, 0)
        n = round(float(self(other(0.0))) - float(prod(0.0)))
        prod.winding = n
        return prod

    def inverse(self) -> "MoebiusRule":
        inv = MoebiusRule(self.moebius.inverse(), 0)
        inv.winding = -round(float(self(inv(0.0))))
        return inv

    def shifted(self, k: int) -> "MoebiusRule":
        return MoebiusRule(self.moebius, self.winding + k)

    def certified_rotation(self):
        """Exact rotation number when the base has a boundary fixed point."""
        if classify_moebius(self.moebius).kind in ("identity", "parabolic", "hyperbolic"):
            return Fraction(self.winding)
        return None

    def __repr__(self) -> str:
        return f"MoebiusRule({self.moebius.m.tolist()}, winding={self.winding})"


@dataclass(frozen=True, eq=False)
class MoebiusLift:
    base: Moebius
    winding: int = 0

    @cached_property
    def rule(self) -> MoebiusRule:
        return MoebiusRule(self.base, self.winding)


def lift_action(g: MoebiusLift | Moebius, grid_size: int = 4096) -> LiftedCircleMap:
    if isinstance(g, Moebius):
        g = MoebiusLift(g, 0)
    return LiftedCircleMap.sampled(g.rule, grid_size)


def moebius_of(f: LiftedCircleMap) -> Moebius | None:
    """Underlying Möbius map of a lifted map built from one, else None."""
    rule = f.rule if f.kind == "sampled" else None
    return rule.moebius if isinstance(rule, MoebiusRule) else None


def winding_of(f: LiftedCircleMap) -> int | None:
    rule = f.rule if f.kind == "sampled" else None
    return rule.winding if isinstance(rule, MoebiusRule) else None


# -- geodesics -------------------------------------------------------------------------

def geodesic_endpoints(point: complex, direction: float) -> float:
    """Forward ideal endpoint (in turns) of the ray from ``point`` with angle ``direction`` (radians)."""
    z = complex(point)
    if abs(z) >= 1:
        raise ValueError("point must lie in the open unit disk")
    e = np.exp(1j * np.asarray(direction, dtype=float))
    w = (e + z) / (1 + np.conj(z) * e)
    out = np.mod(np.angle(w) / TWO_PI, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def geodesic_through(u: float, s: float, samples: int = 64) -> np.ndarray:
    """Points along the geodesic from boundary angle u to s (disk coordinates)."""
    g = GeodesicH2(u, s)
    a, b = np.exp(1j * TWO_PI * g.u), np.exp(1j * TWO_PI * g.s)
    # Möbius map sending -1 -> a, 1 -> b, 0 -> the midpoint of the geodesic
    t = np.tanh(np.linspace(-4, 4, samples) / 2)
    mid_dir = (a + b)
    if abs(mid_dir) < 1e-14:
        return np.outer(t, [1])[:, 0] * b
    # geodesic between a and b is a circle orthogonal to the unit circle
    c = 2 * a * b / (a + b)  # centre of the orthogonal circle
    r = abs(c - a)
    th_a, th_b = np.angle(a - c), np.angle(b - c)
    d = (th_b - th_a + math.pi) % TWO_PI - math.pi
    th = th_a + d * (t + 1) / 2
    return c + r * np.exp(1j * th)


def reduced_word_products(mats: list, max_len: int):
    """Yield (lengths, matrices, words) for all reduced words up to max_len, in chunks.

    Letters are indices into ``mats``; letter i and i ^ 1 are mutually inverse.
    Words split as prefix (length <= h) times suffix, with products batched.
    """
    L = len(mats)
    mats = np.asarray(mats)

    def enumerate_upto(n):
        words, prods = [()], [np.eye(2)]
        level = [((), np.eye(2))]
        for _ in range(n):
            nxt = []
            for w, m in level:
                for a in range(L):
                    if w and (w[-1] ^ 1) == a:
                        continue
                    nxt.append((w + (a,), m @ mats[a]))
            words += [w for w, _ in nxt]
            prods += [m for _, m in nxt]
            level = nxt
        return words, np.array(prods)

    h = (max_len + 1) // 2
    pw, pm = enumerate_upto(h)
    sw, sm = enumerate_upto(max_len - h)
    plen = np.array([len(w) for w in pw])
    slen = np.array([len(w) for w in sw])
    short = plen < h
    yield plen[short], pm[short], [pw[i] for i in np.flatnonzero(short)]
    sfirst = np.array([w[0] if w else -1 for w in sw])
    full = np.flatnonzero(~short)
    for last in range(L):
        pref = [i for i in full if pw[i][-1] == last]
        if not pref:
            continue
        suf = np.flatnonzero(sfirst != (last ^ 1))
        P, S = pm[pref], sm[suf]
        prods = np.einsum("pij,sjk->psik", P, S).reshape(-1, 2, 2)
        lens = (plen[pref][:, None] + slen[suf][None, :]).reshape(-1)
        words = [(i, j) for i in pref for j in suf]
        yield lens, prods, (pw, sw, words)


# -- Fuchsian groups ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FuchsianGroup:
    generators: dict  # name -> Moebius
    relator: Word
    genus: int

    def relator_matrix(self) -> Moebius:
        out = Moebius.identity()
        for name, e in self.relator:
            g = self.generators[name]
            out = out @ (g if e > 0 else g.inverse())
        return out

    def relator_error(self) -> float:
        m = self.relator_matrix().m
        return float(min(np.max(np.abs(m - np.eye(2))), np.max(np.abs(m + np.eye(2)))))

    def representation(self) -> GroupRepresentation:
        """Winding-0 lifts of the generators, with the relator attached."""
        gens = {n: lift_action(MoebiusLift(g, 0)) for n, g in self.generators.items()}
        return GroupRepresentation(gens, (self.relator,))


def _disk_moebius(d: np.ndarray) -> Moebius:
    return Moebius((_CAYLEY_INV @ d @ _CAYLEY).real)


def genus2_fuchsian() -> FuchsianGroup:
    """Side pairings of the regular octagon with interior angles pi/4.

    Side j faces direction j*pi/4.  Side 2 is glued to 0, 1 to 3, 6 to 4 and
    5 to 7, which gives the relator a1 b1 A1 B1 a2 b2 A2 B2.
    """
    d = 2 * math.acosh(1 / math.tan(math.pi / 8))
    ch, sh = math.cosh(d / 2), math.sinh(d / 2)
    T = np.array([[ch, sh], [sh, ch]], dtype=complex)

    def R(phi):
        return np.diag([np.exp(1j * phi / 2), np.exp(-1j * phi / 2)])

    def pair(src, tgt):
        return _disk_moebius(R(tgt * math.pi / 4) @ T @ R(math.pi - src * math.pi / 4))

    gens = {"a1": pair(2, 0), "b1": pair(1, 3), "a2": pair(6, 4), "b2": pair(5, 7)}
    rel = parse_word("a1 b1 A1 B1 a2 b2 A2 B2", gens)
    return FuchsianGroup(gens, rel, 2)


def _one_parameter(g: Moebius) -> np.ndarray:
    X = logm(g.m)
    if np.max(np.abs(np.imag(X))) > 1e-9:
        raise ResolutionError("generator has no real logarithm; cannot build a path from the identity")
    return np.real(X)


def _tracked_path(start: Moebius, start_value: float, X: np.ndarray, steps: int) -> tuple:
    """Follow the lift of start * exp(tX) at x = 0 continuously in t."""
    value = start_value
    for k in range(1, steps + 1):
        m = Moebius(start.m @ expm(X * k / steps))
        raw = float(MoebiusRule(m, 0)._raw(0.0))
        n = round(value - raw)
        nxt = raw + n
        if abs(nxt - value) > 0.25:
            raise ResolutionError(f"lift jumped by {abs(nxt - value):.3f}; use more steps")
        value = nxt
    return Moebius(start.m @ expm(X)), value


def relator_winding(group, steps: int = 256) -> int:
    """Euler number: integer translation of the relator's lift, tracked letter by letter.

    Accepts a FuchsianGroup or any mapping of generator names to Moebius plus
    a relator word, via ``(generators, relator)``.
    """
    if isinstance(group, FuchsianGroup):
        gens, relator = group.generators, group.relator
    else:
        gens, relator = group
    cur = Moebius.identity()
    value = 0.0
    for name, e in relator:
        g = gens[name]
        X = _one_parameter(g if e > 0 else g.inverse())
        cur, value = _tracked_path(cur, value, X, steps)
    final = MoebiusRule(cur, 0)
    residue = float(final._raw(0.0)) - final._offset
    total = value - residue
    k = round(total)
    if abs(total - k) > 1e-6 or classify_moebius(cur, 1e-8).kind != "identity":
        raise ResolutionError("relator does not evaluate to a central element")
    return k
