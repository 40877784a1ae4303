"""Rasterisation of vector maps onto the BEV grid."""

from __future__ import annotations

import numpy as np

from .geometry import bev_world_transforms
from .losses import DilationSpec, dilate_coords
from .metrics import EVAL_POINTS, instance_points

__all__ = ["rasterize", "instance_cells"]


def instance_cells(geometry, grid, spec: DilationSpec, num: int = EVAL_POINTS) -> np.ndarray:
    """Unique in-bounds ``(row, col)`` cells covered by one dilated instance."""
    pix = bev_world_transforms(grid).world_to_pixel(instance_points(geometry, num))
    cells = np.rint(dilate_coords(pix, spec)).astype(np.int64)
    H, W = grid.shape
    ok = (cells[:, 0] >= 0) & (cells[:, 0] < H) & (cells[:, 1] >= 0) & (cells[:, 1] < W)
    return np.unique(cells[ok], axis=0)


def rasterize(vmap, grid=None, spec: DilationSpec | int = 0) -> np.ndarray:
    """Binary masks, one channel per class, shape ``(U, H, W)``.

    Each instance is sampled at 100 points, mapped to pixels, dilated and
    rounded to the nearest cell; cells outside the grid are dropped.
    """
    grid = grid or vmap.grid
    if not isinstance(spec, DilationSpec):
        spec = DilationSpec(spec)
    masks = np.zeros((len(vmap.taxonomy),) + grid.shape)
    for inst in vmap.instances:
        c = instance_cells(inst.geometry, grid, spec)
        masks[inst.class_id, c[:, 0], c[:, 1]] = 1.0
    return masks
