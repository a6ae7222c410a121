import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from slitherkit.cli import EXIT_USAGE, main
from slitherkit.hyperbolic import geodesic_endpoints
from slitherkit.render import (
    FIGURES,
    SVG_NS,
    SceneConfig,
    helicoid_leaves,
    poincare_to_klein,
    render,
    slat,
)


def circ(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1 - d)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


# -- rendering ---------------------------------------------------------------------------------

@pytest.mark.parametrize("figure", FIGURES)
def test_render_deterministic_and_well_formed(figure):
    cfg = SceneConfig(figure=figure, leaf_count=6, seed=3)
    a, b = render(cfg), render(cfg)
    assert a == b
    assert len(a) < 5_000_000
    root = ET.fromstring(a)
    assert root.tag == f"{{{SVG_NS}}}svg"


def test_seed_changes_output():
    assert render(SceneConfig(seed=1)) != render(SceneConfig(seed=2))


@pytest.mark.parametrize("n", [1, 5, 12])
def test_torus_path_count(n):
    root = ET.fromstring(render(SceneConfig("torus-foliation", leaf_count=n)))
    assert len(root.findall(f".//{{{SVG_NS}}}path")) == n + 2


def test_config_validation():
    with pytest.raises(ValueError):
        SceneConfig(leaf_count=0)
    with pytest.raises(ValueError):
        SceneConfig(figure="teapot")
    with pytest.raises(ValueError):
        SceneConfig(size=4)


def test_render_writes_file(tmp_path):
    out = tmp_path / "t.svg"
    data = render(SceneConfig(output=str(out), leaf_count=2))
    assert out.read_bytes() == data


def test_slat_rays_end_at_the_leaf_endpoint():
    phi = 1.1
    for theta in (phi - 2.5, phi - 1.0, phi + 0.3, phi + 2.0):
        for z in slat(phi, theta, samples=9):
            assert abs(z) < 1
            assert circ(geodesic_endpoints(complex(z), theta), phi / (2 * math.pi)) < 1e-10


def test_klein_map_fixes_diameters():
    z = np.array([0.5, 0.5j, -0.3 - 0.4j])
    k = poincare_to_klein(z)
    assert np.allclose(np.angle(k), np.angle(z))
    assert np.all(np.abs(k) < 1) and np.all(np.abs(k) > np.abs(z))


def test_condensed_is_scaled_toward_endpoint():
    plain = helicoid_leaves(5, 3)
    dense = helicoid_leaves(5, 3, condensed=True)
    for (phi, pieces), (_, dpieces) in zip(plain, dense):
        anchor = np.array([math.cos(phi), math.sin(phi), 0.0])
        for (_, pts), (_, dpts) in zip(pieces, dpieces):
            assert np.allclose(dpts, anchor + 0.25 * (pts - anchor), atol=1e-15)


# -- command line -------------------------------------------------------------------------------

def test_help_lists_subcommands(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for name in ("rot", "classify", "verify", "probe", "fuchsian", "model", "triple", "current",
                 "render", "verify-all"):
        assert name in text


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE


def test_bad_map_literal_is_usage_error(capsys):
    assert main(["rot", '{"kind": "rotation"}']) == EXIT_USAGE


def test_rot_and_classify(capsys):
    code, out = run(capsys, "rot", '{"type": "rotation", "theta": "1/3"}')
    assert code == 0 and out["enclosure"]["exact"] and out["enclosure"]["lo"] == "1/3"
    code, out = run(capsys, "classify", '{"type": "pl", "breaks": [[0, 0], ["1/2", "3/4"]]}')
    assert code == 0 and out["class"] == "space-like"


def test_z_command(capsys):
    assert run(capsys, "z", "0", "1/2")[1]["z"] == 1


def test_triple_flow_units(capsys):
    assert run(capsys, "triple", "flow", "--dir", "0")[1]["triple"] == pytest.approx([0.5, 1.0, 1.25])
    out = run(capsys, "triple", "flow", "--dir", "0", "--unit", "radians")[1]
    assert out["triple"] == pytest.approx([math.pi, 2 * math.pi, 2.5 * math.pi])


@pytest.fixture(scope="module")
def genus2_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("rep") / "g2.json"
    assert main(["fuchsian", "genus2", "--emit", str(path)]) == 0
    return path


def test_milnor_wood_genus2(capsys, genus2_file):
    code, out = run(capsys, "verify", "milnor-wood", str(genus2_file), "--iters", "2000")
    assert code == 0 and out["status"] == "pass"


def test_corrupted_report_exits_one(capsys, genus2_file, tmp_path):
    main(["verify", "milnor-wood", str(genus2_file), "--iters", "2000"])
    report = json.loads(capsys.readouterr().out)
    report["violations"] = [{"pair": "a1:b1", "margin": [-0.5, -0.1]}]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(report))  # label still says pass
    assert main(["verify", "milnor-wood", "--report", str(bad)]) == 1
    report["violations"], report["checked"] = [], 7
    bad.write_text(json.dumps(report))
    assert main(["verify", "milnor-wood", "--report", str(bad)]) == 1


def test_milnor_wood_needs_input(capsys):
    assert main(["verify", "milnor-wood"]) == EXIT_USAGE


def test_triple_act(capsys, genus2_file):
    code, out = run(capsys, "triple", "act", str(genus2_file), "a1 A1", "--triple", "0.1,0.4,0.7")
    assert code == 0 and out["canonical"] == pytest.approx([0.1, 0.4, 0.7], abs=1e-12)


def test_current_commands(capsys):
    out = run(capsys, "current", "growth", "--matrix", "2,1,1,1")[1]
    assert out["factor"] == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-9)
    out = run(capsys, "current", "linking", "--matrix", "2,1,1,1", "--mu", "1,0", "--nu", "0,1",
              "--window", "-2,2")[1]
    # Z^2 (1,0) = (5,3) and Z^-2 (1,0) = (2,-3)
    assert out["coefficients"]["4"] == 5 and out["coefficients"]["-4"] == 2


def test_render_command(capsys, tmp_path):
    out = tmp_path / "f.svg"
    assert main(["render", "torus-foliation", "--leaves", "3", "-o", str(out)]) == 0
    ET.parse(out)


def test_verify_all_worst_outcome(capsys, tmp_path):
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps([
        {"name": "z", "argv": ["z", "0", "1"], "expect": 0},
        {"name": "bad", "argv": ["rot", "{}"], "expect": 0},
    ]))
    assert main(["verify-all", str(manifest)]) != 0
    manifest.write_text(json.dumps([{"name": "z", "argv": ["z", "0", "1"], "expect": 0}]))
    assert main(["verify-all", str(manifest)]) == 0


def test_shipped_manifest_passes(capsys):
    from pathlib import Path
    manifest = Path(__file__).resolve().parents[1] / "scripts" / "acceptance_manifest.json"
    code, out = run(capsys, "verify-all", str(manifest))
    assert code == 0 and all(c["ok"] for c in out["checks"])
