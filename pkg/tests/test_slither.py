import dataclasses
import math
from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from slitherkit.circle_homeo import fixed_points
from slitherkit.hyperbolic import boundary_action, genus2_fuchsian
from slitherkit.rotation import SPACE_LIKE, classify, rotation_number
from slitherkit.slither import (
    TWO_PI,
    leaf_separation,
    leaf_separation_bound,
    tangent_bundle_slithering,
    torus_slithering,
    uniformity_probe,
    verify_bundle_automorphism,
    z_diameter,
    z_value,
)

TORUS = torus_slithering()
BUNDLE = tangent_bundle_slithering(genus2_fuchsian())
fracs = st.fractions(-5, 5, max_denominator=50)


# -- z function -----------------------------------------------------------------------------

def test_z_formula_cases():
    assert z_value(0, 1) == 2
    assert z_value(0, F(1, 2)) == 1
    assert z_value(0, F(-1, 2)) == -1
    assert z_value(F(1, 2), 0) == -1
    assert z_value(0, 0) == 0


@given(fracs, fracs)
def test_z_antisymmetric(r, t):
    assert z_value(r, t) == -z_value(t, r)


@given(fracs, fracs)
def test_z_even_iff_integer_gap(r, t):
    assert (z_value(r, t) % 2 == 0) == ((t - r).denominator == 1)


@given(fracs, fracs, fracs)
def test_z_nearly_additive(r, t, u):
    gap = z_value(r, t) + z_value(t, u) - z_value(r, u)
    assert abs(gap) <= 1
    if (t - r).denominator == 1 or (u - t).denominator == 1:
        assert gap == 0


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_z_deck_invariant(r, t):
    phi = TORUS.induced_fiber_maps["phi"]
    fr, ft = (float(phi.evaluate_array(np.array([v]))[0]) for v in (r, t))
    gap = t - r
    assume(abs(gap - round(gap)) > 1e-9)  # float images cannot keep an exact integer gap
    assert z_value(fr, ft) == z_value(r, t)


@given(fracs, fracs)
def test_z_shift_invariant(r, t):
    assert z_value(r + 1, t + 1) == z_value(r, t)


# -- torus model ----------------------------------------------------------------------------

def test_deck_maps_commute():
    x, y = sp.symbols("x y", real=True)
    phi = lambda p: (p[0] + 1, p[1] + sp.Rational(1, 2) * sp.sin(p[1]))
    psi = lambda p: (p[0], p[1] + 2 * sp.pi)
    a, b = phi(psi((x, y))), psi(phi((x, y)))
    assert sp.simplify(a[0] - b[0]) == 0 and sp.simplify(a[1] - b[1]) == 0
    pts = np.random.default_rng(0).uniform(-10, 10, (100, 2))
    g, h = TORUS.deck_generators["phi"], TORUS.deck_generators["psi"]
    assert np.allclose(g(h(pts)), h(g(pts)), rtol=0, atol=1e-12)


def test_closed_leaves():
    fx = sorted(lo for lo, _ in fixed_points(TORUS.induced_fiber_maps["phi"]))
    assert fx == pytest.approx([0.0, 0.5], abs=1e-12)


def test_phi_is_spacelike():
    f = TORUS.induced_fiber_maps["phi"]
    assert classify(f) == SPACE_LIKE
    e = rotation_number(f)
    assert e.exact and e.lo == 0


def test_psi_moves_fibers_by_a_turn():
    pts = TORUS.fiber_sampler(0.3, 16)
    vals = TORUS.fibration(TORUS.deck_generators["psi"](pts))
    assert np.allclose(vals, 1.3, atol=1e-14)


@pytest.mark.parametrize("samples", [8, 64, 256])
def test_bundle_automorphism_passes(samples):
    assert verify_bundle_automorphism(TORUS, samples)["status"] == "pass"
    assert verify_bundle_automorphism(BUNDLE, samples)["status"] == "pass"


def test_corrupted_generator_fails():
    def bad(p):
        p = np.asarray(p, dtype=float)
        return np.stack([p[..., 0] + 1, p[..., 1] + 0.5 * np.sin(p[..., 1]) + 0.1 * np.sin(p[..., 0])], axis=-1)

    model = dataclasses.replace(TORUS, deck_generators={"bad": bad})
    out = verify_bundle_automorphism(model)
    assert out["status"] == "fail"
    assert out["witness"]["generator"] == "bad"
    assert len(out["witness"]["points"]) == 2


def test_z_diameter_torus():
    assert z_diameter(TORUS) == 2


# -- tangent bundle ------------------------------------------------------------------------

def test_bundle_fibration_equivariant():
    grp = genus2_fuchsian()
    pts = BUNDLE.fiber_sampler(0.37, 32)
    for name, g in grp.generators.items():
        img = BUNDLE.fibration(BUNDLE.deck_generators[name](pts))
        expect = boundary_action(g, BUNDLE.fibration(pts))
        d = np.abs(img - expect) % 1.0
        assert np.all(np.minimum(d, 1 - d) < 1e-9)


def test_bundle_generators_spacelike_with_two_fixed_points():
    for f in BUNDLE.induced_fiber_maps.values():
        assert classify(f) == SPACE_LIKE
        assert len(fixed_points(f)) == 2


# -- leaf separation ---------------------------------------------------------------------------

def test_same_leaf_zero():
    assert leaf_separation(0.2, 0.2) == 0.0
    assert z_value(F(1, 5), F(1, 5)) == 0


def test_separation_grows():
    assert leaf_separation(0.13, 0.13 + 2.0) > leaf_separation(0.13, 0.63)


def test_separation_fit():
    r = F(13, 100)
    pairs = [(r, r + F(k, 2)) for k in range(1, 7)]
    rep = leaf_separation_bound(TORUS, pairs)
    assert rep.z == [1, 2, 3, 4, 5, 6]
    assert rep.residual <= 0.2
    assert rep.refinement_change <= 0.05
    for z, s in zip(rep.z, rep.separation):
        assert rep.C2 * (z - 1) - 1e-12 <= s <= rep.C1 * z + 1e-12


def test_separation_needs_torus():
    with pytest.raises(ValueError):
        leaf_separation_bound(BUNDLE, [(0, F(1, 2))])


# -- uniformity ---------------------------------------------------------------------------------

def test_torus_images_bounded():
    out = uniformity_probe("torus", 0.1, 50)
    assert out["bounded"] and out["max_length"] < TWO_PI
    fine = uniformity_probe("torus", 0.1, 50, resolution=16)
    assert fine["max_length"] == pytest.approx(out["max_length"], rel=0.01)


def test_anosov_growth():
    out = uniformity_probe("anosov", 0.1, 20)
    assert out["growth_rate"] == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-9)
    assert not out["bounded"]


def test_zero_arc():
    assert max(uniformity_probe("torus", 0.0, 10)["lengths"]) == 0
    assert max(uniformity_probe("anosov", 0.0, 10)["lengths"]) == 0


@given(st.floats(0.0, 0.9), st.floats(0.01, 0.5))
@settings(max_examples=20, deadline=None)
def test_torus_bounded_any_arc(start, length):
    out = uniformity_probe("torus", length, 20, arc_start=start)
    assert out["max_length"] <= TWO_PI
