"""Deterministic SVG figures: torus foliation, helicoid leaves (plain and condensed), commutator staircase."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circle_homeo import commutator, evaluate
from .rotation import staircase_pair
from .slither import leaf_height

FIGURES = ("torus-foliation", "helicoid-foliation", "helicoid-condensed", "commutator-staircase")
SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class SceneConfig:
    figure: str = "torus-foliation"
    leaf_count: int = 12
    seed: int = 0
    size: int = 480
    output: str | None = None

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; choose from {', '.join(FIGURES)}")
        if self.leaf_count < 1:
            raise ValueError("leaf_count must be at least 1")
        if self.size < 16:
            raise ValueError("size must be at least 16 pixels")


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _canvas(size: int, height: int | None = None) -> ET.Element:
    h = size if height is None else height
    svg = ET.Element("svg", xmlns=SVG_NS, width=str(size), height=str(h), viewBox=f"0 0 {size} {h}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(size), height=str(h), fill="white")
    return svg


def _path_data(runs) -> str:
    """Each run is an (n, 2) array drawn as one subpath."""
    parts = []
    for run in runs:
        if len(run) < 2:
            continue
        pts = [f"{_fmt(x)},{_fmt(y)}" for x, y in run]
        parts.append("M" + pts[0] + " L" + " ".join(pts[1:]))
    return " ".join(parts)


def _write(svg: ET.Element, output) -> bytes:
    data = ET.tostring(svg, encoding="utf-8", xml_declaration=True)
    if output is not None:
        Path(output).write_bytes(data)
    return data


# -- torus ---------------------------------------------------------------------------------

def render_torus_foliation(cfg: SceneConfig) -> bytes:
    """Leaves spiralling onto the closed leaves y = 0 and y = pi in the unit square x [0, 2pi)."""
    size, pad = cfg.size, 0.06 * cfg.size
    side = size - 2 * pad
    svg = _canvas(size)
    ET.SubElement(svg, "rect", x=_fmt(pad), y=_fmt(pad), width=_fmt(side), height=_fmt(side),
                  fill="none", stroke="#888", **{"stroke-width": "1"})

    def screen(x, y):
        return np.column_stack([pad + x * side, pad + side - y / (2 * math.pi) * side])

    rng = np.random.default_rng(cfg.seed)
    heights = np.sort(rng.uniform(0.02, 2 * math.pi - 0.02, cfg.leaf_count))
    heights[np.abs(heights - math.pi) < 0.02] += 0.04
    xs = np.linspace(0, 1, 41)
    for y0 in heights:
        runs = []
        for k in range(-8, 8):
            h = leaf_height(xs + k, np.full(xs.shape, y0))
            runs.append(screen(xs, np.mod(h, 2 * math.pi)))
        ET.SubElement(svg, "path", d=_path_data(runs), fill="none", stroke="#1f4e79",
                      **{"stroke-width": "0.8", "class": "leaf"})
    for y, dash in ((0.0, "none"), (math.pi, "6,3")):
        run = screen(np.array([0.0, 1.0]), np.array([y, y]))
        ET.SubElement(svg, "path", d=_path_data([run]), fill="none", stroke="#b22222",
                      **{"stroke-width": "2.4", "stroke-dasharray": dash, "class": "closed-leaf"})
    return _write(svg, cfg.output)


# -- helicoid ------------------------------------------------------------------------------

def slat(phi: float, theta: float, samples: int = 24) -> np.ndarray:
    """Poincaré-disk chord of points whose ray in direction theta ends at angle phi (radians).

    Valid for theta in (phi - pi, phi + pi).  The chord starts at the ideal point.
    """
    xi = np.exp(1j * phi)
    u = np.exp(1j * (phi + theta) / 2)
    length = 2 * math.cos((phi - theta) / 2)
    s = np.linspace(0.0, 1.0, samples)[1:-1] * length
    return xi - s * u


def poincare_to_klein(z):
    z = np.asarray(z)
    return 2 * z / (1 + np.abs(z) ** 2)


def helicoid_leaves(seed: int, leaf_count: int, slats: int = 11, condensed: bool = False) -> list:
    """Per leaf: (phi, list of (theta, (n, 3) points in Klein disk x height))."""
    rng = np.random.default_rng(seed)
    out = []
    margin = 0.35
    for phi in rng.uniform(0, 2 * math.pi, leaf_count):
        pieces = []
        for theta in phi + np.linspace(-math.pi + margin, math.pi - margin, slats):
            k = poincare_to_klein(slat(phi, theta))
            pts = np.column_stack([k.real, k.imag, np.full(k.shape, theta - phi)])
            if condensed:
                anchor = np.array([math.cos(phi), math.sin(phi), 0.0])
                pts = anchor + 0.25 * (pts - anchor)
            pieces.append((float(theta), pts))
        out.append((float(phi), pieces))
    return out


def render_helicoid_foliation(cfg: SceneConfig, condensed: bool | None = None) -> bytes:
    """Leaves of the circle-at-infinity foliation over the projective disk, angle drawn vertically."""
    if condensed is None:
        condensed = cfg.figure == "helicoid-condensed"
    size = cfg.size
    svg = _canvas(size)
    radius, tilt = 0.36 * size, 0.35
    rise = 0.06 * size  # pixels per radian of angle

    def screen(p):
        x = size / 2 + radius * p[:, 0]
        y = size / 2 - radius * tilt * p[:, 1] - rise * p[:, 2]
        return np.column_stack([x, y])

    for level in (-math.pi, math.pi):
        ring = np.exp(1j * np.linspace(0, 2 * math.pi, 73))
        pts = np.column_stack([ring.real, ring.imag, np.full(ring.shape, level)])
        ET.SubElement(svg, "polyline", points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in screen(pts)),
                      fill="none", stroke="#aaa", **{"stroke-width": "0.8"})
    palette = ["#1f4e79", "#2e7d32", "#b22222", "#6a1b9a", "#ef6c00", "#00838f"]
    for i, (phi, pieces) in enumerate(helicoid_leaves(cfg.seed, cfg.leaf_count, condensed=condensed)):
        g = ET.SubElement(svg, "g", stroke=palette[i % len(palette)], fill="none",
                          **{"stroke-width": "1.1", "data-phi": _fmt(phi)})
        for _, pts in pieces:
            ET.SubElement(g, "polyline", points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in screen(pts)))
    return _write(svg, cfg.output)


# -- commutator staircase --------------------------------------------------------------------

def render_commutator_staircase(cfg: SceneConfig) -> bytes:
    """Graphs of a, b and [a, b] over one period, with the lines y = x and y = x - 2."""
    a, b = staircase_pair()
    c = commutator(a, b)
    size, pad = cfg.size, 0.08 * cfg.size
    side = size - 2 * pad
    lo, hi = -2.0, 2.0
    svg = _canvas(size)

    def screen(x, y):
        return np.column_stack([pad + x * side, pad + (hi - y) / (hi - lo) * side])

    xs = np.unique(np.concatenate([np.linspace(0, 1, 201),
                                   [float(p) for f in (a, b, c) for p in f.breakpoints()]]))
    xs = xs[(xs >= 0) & (xs <= 1)]
    guides = [(np.array([0.0, 1.0]), np.array([0.0, 1.0]), "#888", "4,3"),
              (np.array([0.0, 1.0]), np.array([-2.0, -1.0]), "#b22222", "2,2")]
    for gx, gy, color, dash in guides:
        ET.SubElement(svg, "path", d=_path_data([screen(gx, gy)]), fill="none", stroke=color,
                      **{"stroke-dasharray": dash, "stroke-width": "1"})
    for f, color, label in ((a, "#1f4e79", "a"), (b, "#2e7d32", "b"), (c, "#000", "[a,b]")):
        ys = np.array([float(evaluate(f, x)) for x in xs])
        ET.SubElement(svg, "path", d=_path_data([screen(xs, ys)]), fill="none", stroke=color,
                      **{"stroke-width": "1.6", "data-map": label})
    return _write(svg, cfg.output)


def render(cfg: SceneConfig) -> bytes:
    if cfg.figure == "torus-foliation":
        return render_torus_foliation(cfg)
    if cfg.figure == "commutator-staircase":
        return render_commutator_staircase(cfg)
    return render_helicoid_foliation(cfg)
