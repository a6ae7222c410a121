import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitherkit import GroupRepresentation, LiftedCircleMap, compose
from slitherkit.circle_homeo import random_pl_map
from slitherkit.hyperbolic import Moebius, MoebiusLift, genus2_fuchsian, geodesic_endpoints, lift_action
from slitherkit.triples import (
    Triple,
    TripleBox,
    act_on_triple,
    geodesic_flow_triple,
    parabolic_scan,
    proper_discontinuity_probe,
    spacelike_type,
    z_third,
)

G2 = genus2_fuchsian().representation()
GENUS2_BOX = TripleBox(Triple(0.0, 0.03, 0.06), 0.0145)


@st.composite
def triples(draw):
    u = draw(st.fractions(-3, 3, max_denominator=100))
    gaps = draw(st.lists(st.fractions(F(1, 100), 1, max_denominator=100), min_size=3, max_size=3))
    total = sum(gaps)
    return Triple(u, u + gaps[0] / total, u + (gaps[0] + gaps[1]) / total)


@st.composite
def seeded_pl(draw):
    return random_pl_map(np.random.default_rng(draw(st.integers(0, 2**32 - 1))))


def circ(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1 - d)


# -- triples and boxes ------------------------------------------------------------------------

def test_unordered_triple_rejected():
    with pytest.raises(ValueError):
        Triple(0, 0.5, 0.4)
    with pytest.raises(ValueError):
        Triple(0, 0.5, 1.0)


def test_canonical_representative():
    t = Triple(2.25, 2.5, 3.0).canonical()
    assert t.as_tuple() == (0.25, 0.5, 1.0)


def test_box_radius_checked():
    with pytest.raises(ValueError):
        TripleBox(Triple(0, 0.1, 0.2), 0.06)
    with pytest.raises(ValueError):
        TripleBox(Triple(0, 0.1, 0.2), 0)


# -- action and the cube root of Z ---------------------------------------------------------------

def test_identity_action():
    t = Triple(F(1, 10), F(1, 2), F(3, 4))
    assert act_on_triple(LiftedCircleMap.identity(), t) == t


def test_deck_shift_action():
    t = Triple(F(1, 10), F(1, 2), F(3, 4))
    img = act_on_triple(LiftedCircleMap.translation(1), t)
    assert img == t.shift(1) and img.canonical() == t


def test_rotation_shifts_each_coordinate():
    t = Triple(F(1, 10), F(1, 2), F(3, 4))
    assert act_on_triple(LiftedCircleMap.rotation(F(1, 7)), t) == t.shift(F(1, 7))


@given(triples())
def test_z_third_cubed_is_deck_shift(t):
    assert z_third(z_third(z_third(t))) == t.shift(1)


@given(triples())
def test_z_third_keeps_order(t):
    s = z_third(t)
    assert s.u < s.p < s.u + 1 and t.p < t.u + 1 < t.s + 1


@given(seeded_pl(), triples())
@settings(max_examples=40, deadline=None)
def test_z_third_commutes_with_action(f, t):
    assert z_third(act_on_triple(f, t)) == act_on_triple(f, z_third(t))


@given(seeded_pl(), seeded_pl(), triples())
@settings(max_examples=40, deadline=None)
def test_action_is_a_homomorphism(f, g, t):
    lhs = act_on_triple(compose(f, g), t)
    rhs = act_on_triple(f, act_on_triple(g, t))
    assert max(abs(a - b) for a, b in zip(lhs.as_tuple(), rhs.as_tuple())) <= 1e-12


# -- space-like types ------------------------------------------------------------------------------

def test_hyperbolic_type():
    f = lift_action(MoebiusLift(Moebius.translation(1.1, 0.2), 0))
    assert spacelike_type(f).kind == "hyperbolic-type"


def test_parabolic_type():
    f = lift_action(MoebiusLift(Moebius(np.array([[1.0, 1.0], [0.0, 1.0]])), 0))
    assert spacelike_type(f).kind == "parabolic-type"


def test_rotation_not_spacelike():
    assert spacelike_type(LiftedCircleMap.rotation(F(1, 3))).kind == "not-space-like"


def test_three_fixed_points_flagged():
    f = LiftedCircleMap.pl([(0, 0), (F(1, 6), F(1, 4)), (F(1, 3), F(1, 3)), (F(1, 2), F(5, 12)),
                            (F(2, 3), F(2, 3)), (F(5, 6), F(3, 4))])
    out = spacelike_type(f)
    assert out.kind == "violation" and len(out.fixed) == 3


def test_genus2_words_never_parabolic():
    out = parabolic_scan(G2, 8, sample=60)
    assert out["trace_near_2"] == 0
    assert out["min_nontrivial_trace"] > 2.5
    assert "parabolic-type" not in out["sampled_types"]


# -- geodesic flow coordinates ----------------------------------------------------------------------

def test_flow_triple_at_origin():
    t = geodesic_flow_triple(0, 0.0)
    assert t.to_list() == pytest.approx([0.5, 1.0, 1.25], abs=1e-15)


@given(st.floats(0, 2 * math.pi))
def test_flow_rotation_equivariance(theta):
    t = geodesic_flow_triple(0, theta)
    base = geodesic_flow_triple(0, 0.0)
    shift = theta / (2 * math.pi)
    for a, b in zip(t.as_tuple(), base.as_tuple()):
        assert circ(a, b + shift) < 1e-12


def test_flow_triple_general_point():
    z, th = 0.3 + 0.4j, 1.2
    t = geodesic_flow_triple(z, th)
    assert circ(t.s, geodesic_endpoints(z, th)) < 1e-12
    assert circ(t.u, geodesic_endpoints(z, th + math.pi)) < 1e-12
    assert circ(t.p, geodesic_endpoints(z, th + math.pi / 2)) < 1e-12
    assert t.u < t.s < t.p < t.u + 1


def test_flow_triple_injective_on_samples():
    rng = np.random.default_rng(4)
    seen = set()
    for _ in range(300):
        r, a, th = rng.uniform(0, 0.9), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
        t = geodesic_flow_triple(r * complex(math.cos(a), math.sin(a)), th).canonical()
        seen.add(tuple(round(v, 9) for v in t.as_tuple()))
    assert len(seen) == 300


# -- proper discontinuity probe -----------------------------------------------------------------------

def test_trivial_group_counts_identity_only():
    rep = GroupRepresentation({"a": LiftedCircleMap.identity()})
    out = proper_discontinuity_probe(rep, TripleBox(Triple(0, F(1, 3), F(2, 3)), 0.1), 4)
    assert out["count"] == 1 and out["stabilized"]


def test_irrational_rotation_keeps_returning():
    theta = math.sqrt(2) / 60
    rep = GroupRepresentation({"a": LiftedCircleMap.rotation(theta)})
    box = TripleBox(Triple(0, F(1, 3), F(2, 3)), 0.15)
    counts = proper_discontinuity_probe(rep, box, 12)["element_counts"]
    assert all(b > a for a, b in zip(counts, counts[1:]))
    # oracle: the n-th power returns iff n * theta is within 2r + slack of an integer
    expect = [1]
    for n in range(1, 13):
        hits = sum(1 for k in (n, -n) if abs(k * theta - round(k * theta)) <= 0.3 + 1e-12)
        expect.append(expect[-1] + hits)
    assert counts == expect


def _bfs_elements(rep, box, max_len):
    """Independent oracle: compose lifted maps breadth first and test the box directly."""
    lo, hi = box.bounds()[:, 0], box.bounds()[:, 1]
    pts = np.array([lo, hi]).T.reshape(-1)
    frontier = {(): LiftedCircleMap.identity()}
    found = set()
    letters = rep.alphabet()
    for n in range(max_len + 1):
        nxt = {}
        for w, f in frontier.items():
            img = f.evaluate_array(pts).reshape(3, 2)
            k_lo = np.ceil(np.max(lo - img[:, 1]) - 1e-12)
            if k_lo <= np.floor(np.min(hi - img[:, 0]) + 1e-12):
                found.add(tuple(np.round(np.mod(f.evaluate_array(np.linspace(0.05, 0.95, 7)), 1.0), 6) + 0.0))
            if n < max_len:
                for a in letters:
                    if w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                        continue
                    nxt[w + (a,)] = compose(f, rep.letter(*a))
        frontier = nxt
    return found


def test_genus2_probe_matches_bfs_oracle():
    out = proper_discontinuity_probe(G2, GENUS2_BOX, 4)
    assert out["count"] == len(_bfs_elements(G2, GENUS2_BOX, 4))


@pytest.mark.slow
def test_genus2_probe_stabilizes():
    out = proper_discontinuity_probe(G2, GENUS2_BOX, 8)
    assert out["stabilized"]
    assert out["count"] == 3
    assert out["elements"][0] == ""
