"""SVG rendering of vector maps in BEV pixel space."""

from __future__ import annotations

import numpy as np

from .bezier import PiecewiseBezier, restore_curve
from .geometry import bev_world_transforms
from .polyline import as_points

__all__ = ["render_svg", "CLASS_COLORS"]

CLASS_COLORS = ("#e6550d", "#3182bd", "#31a354", "#756bb1", "#636363")


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _xy(tf, pts) -> list:
    rc = tf.world_to_pixel(np.asarray(pts, dtype=float).reshape(-1, 2))
    return [f"{_fmt(c)} {_fmt(r)}" for r, c in rc]


def _path_data(tf, geom) -> str:
    if isinstance(geom, PiecewiseBezier):
        n = geom.degree
        if n > 3:
            xy = _xy(tf, restore_curve(geom, 32))
            return "M " + xy[0] + "".join(" L " + p for p in xy[1:])
        cmd = {1: "L", 2: "Q", 3: "C"}[n]
        xy = _xy(tf, geom.controls)
        d = "M " + xy[0]
        for j in range(geom.pieces):
            d += f" {cmd} " + " ".join(xy[j * n + 1:(j + 1) * n + 1])
        return d
    xy = _xy(tf, as_points(geom))
    return "M " + xy[0] + "".join(" L " + p for p in xy[1:])


def render_svg(vmap, gt=None, grid=None, controls: bool = False) -> str:
    """SVG 1.1 document with one ``<path>`` per instance.

    ``gt`` is drawn underneath in a dashed grey style. With ``controls``,
    the control points of Bezier instances in ``vmap`` are drawn as circles.
    """
    grid = grid or vmap.grid
    tf = bev_world_transforms(grid)
    H, W = grid.shape
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]
    if gt is not None:
        lines.append('<g id="gt" fill="none" stroke="#999999" stroke-width="3" stroke-dasharray="6 4">')
        for inst in gt.instances:
            lines.append(f'<path class="gt c{inst.class_id}" d="{_path_data(tf, inst.geometry)}"/>')
        lines.append("</g>")
    lines.append('<g id="pred" fill="none" stroke-width="2">')
    for inst in vmap.instances:
        color = CLASS_COLORS[inst.class_id % len(CLASS_COLORS)]
        lines.append(f'<path class="c{inst.class_id}" stroke="{color}" d="{_path_data(tf, inst.geometry)}"/>')
    lines.append("</g>")
    if controls:
        lines.append('<g id="controls" fill="#1f77b4">')
        for inst in vmap.instances:
            if isinstance(inst.geometry, PiecewiseBezier):
                for p in _xy(tf, inst.geometry.controls):
                    x, y = p.split()
                    lines.append(f'<circle cx="{x}" cy="{y}" r="2.5"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
