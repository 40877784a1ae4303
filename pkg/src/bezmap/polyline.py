"""Ordered 2D point chains and arc-length resampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, ShapeError

__all__ = ["Polyline", "as_points", "arc_lengths", "resample_arclength"]


@dataclass(frozen=True, eq=False)
class Polyline:
    """Open chain of 2D points in metres.

    Consecutive duplicates are dropped on construction; a chain that
    collapses to a single point is rejected.
    """

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise ShapeError(f"points must have shape (m, 2), got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError("polyline coordinates must be finite")
        if len(p) > 1:
            keep = np.r_[True, np.any(p[1:] != p[:-1], axis=1)]
            p = p[keep]
        if len(p) < 2:
            raise DegenerateError("polyline needs at least two distinct points")
        if self.closed:
            raise DomainError("map curves are open")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Polyline):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    @property
    def length(self) -> float:
        return float(arc_lengths(self.points)[-1])


def as_points(obj) -> np.ndarray:
    """Coordinates of a Polyline or anything array-like, as ``(m, 2)`` floats."""
    if isinstance(obj, Polyline):
        return obj.points
    p = np.asarray(obj, dtype=float)
    if p.ndim == 1 and p.shape == (2,):
        p = p[None]
    if p.ndim != 2 or p.shape[1] != 2:
        raise ShapeError(f"expected (m, 2) coordinates, got {p.shape}")
    return p


def arc_lengths(points) -> np.ndarray:
    """Cumulative distance along the chain, starting at 0."""
    p = as_points(points)
    return np.r_[0.0, np.cumsum(np.hypot(*np.diff(p, axis=0).T))]


def resample_arclength(points, num: int) -> np.ndarray:
    """``num`` points equally spaced in arc length along the chain.

    The first and last outputs are the chain's endpoints exactly.
    """
    p = as_points(points)
    if num < 2:
        raise DomainError("need at least 2 output points")
    s = arc_lengths(p)
    if s[-1] <= 0.0:
        raise DegenerateError("cannot resample a zero-length chain")
    target = np.linspace(0.0, s[-1], num)
    out = np.column_stack([np.interp(target, s, p[:, 0]), np.interp(target, s, p[:, 1])])
    out[0] = p[0]
    out[-1] = p[-1]
    return out
