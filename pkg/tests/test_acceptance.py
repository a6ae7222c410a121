"""Quantitative acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL summary that the terminal summary prints.
"""
import math
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp

from slitherkit import LiftedCircleMap, compose, inverse
from slitherkit.circle_homeo import commutator, random_pl_map
from slitherkit.currents import (
    GeodesicCurrent,
    MonodromyAction,
    angular_distance,
    eigenmeasure,
    growth_factor,
    injectivity_radius_bound,
    intersection_number,
    linking_series,
    mass,
    perron_vector,
)
from slitherkit.hyperbolic import genus2_fuchsian, relator_winding
from slitherkit.render import FIGURES, SVG_NS, SceneConfig, render
from slitherkit.rotation import (
    milnor_wood_suite,
    rotation_number,
    staircase_pair,
    verify_commutator_bound,
    verify_milnor_wood,
)
from slitherkit.slither import leaf_separation_bound, torus_slithering, uniformity_probe, z_value
from slitherkit.triples import Triple, TripleBox, proper_discontinuity_probe, z_third

Z = LiftedCircleMap.translation(1)
CAT = MonodromyAction(((2, 1), (1, 1)))
LAMBDA = (3 + math.sqrt(5)) / 2


@pytest.fixture
def report(record_property):
    def emit(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        record_property("acceptance", line)
        assert ok, line
    return emit


def test_criterion_1_commutator_bound(report):
    rng = np.random.default_rng(101)
    violations = inconclusive = 0
    for _ in range(1000):
        r = verify_commutator_bound(random_pl_map(rng), random_pl_map(rng), Z, samples=256)
        violations += len(r.violations)
        inconclusive += r.inconclusive
    a, b = staircase_pair()
    xs = np.linspace(0, 1, 20001)
    sharp = float(-(commutator(a, b).evaluate_array(xs) - xs).min())
    ok = violations == 0 and inconclusive == 0 and sharp >= 1.9
    report(1, ok, f"1000 pairs: {violations} violations, {inconclusive} inconclusive; "
                  f"staircase displacement {sharp:.4f}")


def test_criterion_2_milnor_wood(report):
    rng = np.random.default_rng(202)
    pairs = [(random_pl_map(rng), random_pl_map(rng)) for _ in range(1000)]
    suite = milnor_wood_suite(pairs, 2000)
    g = genus2_fuchsian()
    winding = relator_winding(g)
    rep = g.representation().generators
    genus2 = verify_milnor_wood([(rep["a1"], rep["b1"]), (rep["a2"], rep["b2"])], 2000)
    ok = (suite.delta.status == suite.single.status == suite.half.status == "pass"
          and suite.half_pairs >= 200 and abs(winding) == 2 and abs(winding) < g.genus + 1
          and genus2.status == "pass")
    report(2, ok, f"delta {suite.delta.status}, single {suite.single.status}, "
                  f"half-bound {suite.half.status} on {suite.half_pairs} pairs; genus-2 winding {winding}")


def test_criterion_3_rotation_rigor(report):
    rng = np.random.default_rng(303)
    n = 10_000
    thetas = rng.uniform(-3, 3, 100)
    sound = all(
        (e := rotation_number(LiftedCircleMap.sampled(lambda x, t=t: x + t), n, certify=False)).lo <= t <= e.hi
        and e.width <= 2 / n
        for t in thetas
    )
    failed = []
    for q in range(1, 13):
        for p in range(q):
            rigid = LiftedCircleMap.rotation(F(p, q))
            conj = random_pl_map(rng, shift_range=(0, 0))
            for f in (rigid, compose(conj, compose(rigid, inverse(conj)))):
                e = rotation_number(f, n)
                if not (e.exact and e.lo == e.hi == F(p, q)):
                    failed.append((p, q))
    report(3, sound and not failed, f"100 sampled rotations enclosed at n=1e4: {sound}; "
                                    f"p/q certification failures (q<=12): {len(failed)}")


def test_criterion_4_z_function(report):
    cases = z_value(0, 1) == 2 and z_value(0, F(1, 2)) == 1
    rng = np.random.default_rng(404)
    vals = [(F(int(a), 97), F(int(b), 97)) for a, b in rng.integers(-500, 500, (1000, 2))]
    anti = all(z_value(r, t) == -z_value(t, r) for r, t in vals)
    r = F(13, 100)
    fit = leaf_separation_bound(torus_slithering(), [(r, r + F(k, 2)) for k in range(1, 7)])
    ok = cases and anti and fit.z == [1, 2, 3, 4, 5, 6] and fit.residual <= 0.2
    report(4, ok, f"formula cases {cases}, antisymmetry {anti}; separation fit C2={fit.C2:.3f} "
                  f"C1={fit.C1:.3f} residual {fit.residual:.3f}")


def test_criterion_5_uniformity(report):
    torus = uniformity_probe("torus", 0.1, 50)
    anosov = uniformity_probe("anosov", 0.1, 20)
    rel = abs(anosov["growth_rate"] - LAMBDA) / LAMBDA
    ok = torus["bounded"] and rel <= 0.01 and not anosov["bounded"]
    report(5, ok, f"torus max image {torus['max_length']:.4f} (bounded {torus['bounded']}); "
                  f"Anosov rate {anosov['growth_rate']:.6f}, relative error {rel:.1e}")


def test_criterion_6_convergence(report):
    g2 = proper_discontinuity_probe(genus2_fuchsian().representation(),
                                    TripleBox(Triple(0.0, 0.03, 0.06), 0.0145), 8)
    from slitherkit import GroupRepresentation
    irr = proper_discontinuity_probe(GroupRepresentation({"a": LiftedCircleMap.rotation(math.sqrt(2) / 60)}),
                                     TripleBox(Triple(0, F(1, 3), F(2, 3)), 0.15), 12)
    counts = irr["element_counts"]
    growing = all(b > a for a, b in zip(counts, counts[1:]))
    rng = np.random.default_rng(606)
    cube = True
    for _ in range(1000):
        u = F(int(rng.integers(-1000, 1000)), 100)
        a, b, c = sorted(int(v) for v in rng.choice(np.arange(1, 1000), 3, replace=False))
        t = Triple(u, u + F(a, 1000), u + F(b, 1000))
        cube &= z_third(z_third(z_third(t))) == t.shift(1)
    ok = g2["stabilized"] and growing and cube
    report(6, ok, f"genus-2 counts {g2['element_counts']} stabilized {g2['stabilized']}; "
                  f"irrational counts strictly increasing {growing}; z_third cubed exact {cube}")


def test_criterion_7_eigenmeasure(report):
    growth = growth_factor(CAT, GeodesicCurrent.torus((1, 0)))
    _, vec = perron_vector(CAT)
    em = eigenmeasure(CAT, GeodesicCurrent.torus((1, 0)), N=40)
    err = angular_distance(em.vector, [float(x) for x in vec])
    mu, nu = GeodesicCurrent.torus((1, 0)), GeodesicCurrent.torus((0, 1))
    lhs = linking_series(GeodesicCurrent.torus(CAT.apply(mu.vector)), nu, CAT, (-6, 5))
    rhs = linking_series(mu, nu, CAT, (-6, 6))
    shift = all(lhs.coefficient(2 * k) == rhs.coefficient(2 * k + 2) for k in range(-6, 6))
    e = GeodesicCurrent.torus(vec)
    self_link = all(sp.simplify(c) == 0 for c in linking_series(e, e, CAT, (-6, 6)).coefficients.values())
    ok = abs(growth.factor - LAMBDA) <= 1e-9 and err <= 1e-6 and shift and self_link
    report(7, ok, f"growth error {abs(growth.factor - LAMBDA):.1e}; eigenmeasure angle {err:.1e}; "
                  f"shift identity {shift}; self-linking zero {self_link}")


def test_criterion_8_intersection(report):
    g = genus2_fuchsian()
    one = intersection_number(GeodesicCurrent.surface(g, {"a1": 1}), GeodesicCurrent.surface(g, {"b1": 1}), depth=6)
    words = ["a1", "b1", "a2", "a1 b1", "a1 B1", "a1 a2"]
    a = injectivity_radius_bound(g)
    symmetric = bilinear = collar = True
    for x in words:
        for y in words:
            mu, nu = GeodesicCurrent.surface(g, {x: 1}), GeodesicCurrent.surface(g, {y: 1})
            i_xy = intersection_number(mu, nu).value
            symmetric &= i_xy == intersection_number(nu, mu).value
            collar &= a * a * i_xy < mass(mu) * mass(nu)
    mu = GeodesicCurrent.surface(g, {"a1": 1, "a1 b1": 2})
    nu = GeodesicCurrent.surface(g, {"b1": 1})
    bilinear = intersection_number(mu.scaled(2), nu.scaled(3)).value == 6 * intersection_number(mu, nu).value
    ok = one.value == 1 and one.converged and symmetric and bilinear and collar
    report(8, ok, f"i(a1,b1)={one.value} converged {one.converged}; symmetric {symmetric}, "
                  f"bilinear {bilinear}, a^2 i < |mu||nu| {collar} (a={a:.4f})")


def test_criterion_9_rendering(report):
    ok, sizes = True, []
    for fig in FIGURES:
        cfg = SceneConfig(figure=fig, leaf_count=12, seed=9)
        first, second = render(cfg), render(cfg)
        root = ET.fromstring(first)
        ok &= first == second and root.tag == f"{{{SVG_NS}}}svg"
        sizes.append(len(first))
    paths = len(ET.fromstring(render(SceneConfig("torus-foliation", leaf_count=12))).findall(f".//{{{SVG_NS}}}path"))
    ok &= paths == 14
    report(9, ok, f"{len(FIGURES)} figures deterministic and well-formed; torus paths {paths} for 12 leaves; "
                  f"sizes {sizes}")
