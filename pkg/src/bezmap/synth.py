"""Seeded synthetic annotation corpora.

Stand-in for real map annotations: dividers are gentle arcs or S-bends,
crossings are short straight edges, boundaries are straight runs joined
by circular bends. Every shape is placed entirely inside the perception
range and annotated with roughly evenly spaced, slightly jittered
vertices. Instances are grouped into scenes of ``per_scene`` instances
per class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mapmodel import MapInstance, VectorMap, default_grid, default_taxonomy
from .polyline import Polyline

__all__ = ["CorpusSpec", "synth_corpus", "trace_path"]


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    per_class: int = 500
    per_scene: int = 5
    divider_length: tuple = (15.0, 45.0)
    divider_curvature: float = 0.03  # max |1/radius|, 1/m
    crossing_length: tuple = (3.0, 8.0)
    boundary_length: tuple = (20.0, 50.0)
    boundary_bends: tuple = (1, 3)
    bend_radius: tuple = (6.0, 20.0)
    bend_angle: tuple = (20.0, 90.0)  # degrees
    spacing: float = 1.0
    noise: float = 0.01
    margin: float = 0.5


def _advance(pos, heading, k, u):
    """Position after travelling ``u`` metres at curvature ``k``."""
    u = np.asarray(u, dtype=float)
    if abs(k) < 1e-12:
        d = np.stack([np.cos(heading) * u, np.sin(heading) * u], axis=-1)
    else:
        d = np.stack([
            (np.sin(heading + k * u) - math.sin(heading)) / k,
            (math.cos(heading) - np.cos(heading + k * u)) / k,
        ], axis=-1)
    return pos + d


def trace_path(pieces, spacing: float) -> np.ndarray:
    """Points along a chain of ``(length, curvature)`` pieces from the origin, heading +x.

    Vertices are spread evenly in arc length, about ``spacing`` metres apart,
    and include both ends.
    """
    lengths = np.array([L for L, _ in pieces], dtype=float)
    starts = np.r_[0.0, np.cumsum(lengths)]
    poses = [(np.zeros(2), 0.0)]
    for L, k in pieces:
        pos, th = poses[-1]
        poses.append((_advance(pos, th, k, L), th + k * L))
    s = np.linspace(0.0, starts[-1], max(2, int(math.ceil(starts[-1] / spacing)) + 1))
    j = np.clip(np.searchsorted(starts, s, side="right") - 1, 0, len(pieces) - 1)
    out = np.empty((len(s), 2))
    for i in range(len(pieces)):
        sel = j == i
        pos, th = poses[i]
        out[sel] = _advance(pos, th, pieces[i][1], s[sel] - starts[i])
    return out


def _divider(rng, spec):
    L = rng.uniform(*spec.divider_length)
    if rng.random() < 0.5:
        return [(L, rng.uniform(-spec.divider_curvature, spec.divider_curvature))]
    k = rng.uniform(0.3, 1.0) * spec.divider_curvature * rng.choice([-1.0, 1.0])
    a = rng.uniform(0.35, 0.65)
    return [(a * L, k), ((1 - a) * L, -k)]


def _boundary(rng, spec):
    bends = int(rng.integers(spec.boundary_bends[0], spec.boundary_bends[1] + 1))
    pieces = []
    for _ in range(bends):
        r = rng.uniform(*spec.bend_radius)
        ang = math.radians(rng.uniform(*spec.bend_angle))
        pieces.append((r * ang, rng.choice([-1.0, 1.0]) / r))
    arc_len = sum(L for L, _ in pieces)
    total = max(rng.uniform(*spec.boundary_length), arc_len + 2.0 * (bends + 1))
    straights = rng.dirichlet(np.ones(bends + 1)) * (total - arc_len)
    out = [(straights[0], 0.0)]
    for (L, k), s in zip(pieces, straights[1:]):
        out += [(L, k), (s, 0.0)]
    return [(L, k) for L, k in out if L > 1e-6]


def _place(rng, local, grid, margin):
    """Rotate and translate a shape to a random pose fully inside the range, or None."""
    th = rng.uniform(-math.pi, math.pi)
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    pts = local @ R.T
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    xmin, xmax = -grid.rear + margin - lo[0], grid.front - margin - hi[0]
    ymin, ymax = -grid.right + margin - lo[1], grid.left - margin - hi[1]
    if xmin > xmax or ymin > ymax:
        return None
    return pts + np.array([rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)])


def _instance(rng, kind, spec, grid):
    while True:
        if kind == "ped-crossing":
            L = rng.uniform(*spec.crossing_length)
            npts = int(rng.integers(2, 5))
            local = np.column_stack([np.linspace(0.0, L, npts), np.zeros(npts)])
        elif kind == "lane-divider":
            local = trace_path(_divider(rng, spec), spec.spacing)
        else:
            local = trace_path(_boundary(rng, spec), spec.spacing)
        pts = _place(rng, local, grid, spec.margin)
        if pts is None:
            continue
        jitter = rng.uniform(-spec.noise, spec.noise, size=pts.shape)
        return Polyline(pts + jitter)


def synth_corpus(spec: CorpusSpec = CorpusSpec(), taxonomy=None, grid=None) -> VectorMap:
    """Deterministic annotation map; the same spec always yields the same map."""
    taxonomy = tuple(taxonomy or default_taxonomy())
    grid = grid or default_grid()
    rng = np.random.default_rng(spec.seed)
    per_scene = max(1, spec.per_scene)
    n_scenes = -(-spec.per_class // per_scene)
    instances = []
    for scene in range(n_scenes):
        for cls in taxonomy:
            count = min(per_scene, spec.per_class - scene * per_scene)
            for _ in range(count):
                instances.append(MapInstance(cls.id, _instance(rng, cls.name, spec, grid), 1.0, scene))
    return VectorMap(tuple(instances), taxonomy, grid)
