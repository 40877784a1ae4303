"""Map classes, instances and the bird's-eye-view raster grid.

Axis convention used throughout the package: ``x`` is longitudinal
(forward positive), ``y`` is lateral (left positive), both in metres in
the ego frame. Raster rows grow to the right (decreasing ``y``) and
columns grow forward (increasing ``x``). Integer pixel coordinates are
cell centres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bezier import PiecewiseBezier
from .errors import ConfigurationError
from .gengt import GenGtConfig
from .polyline import Polyline

__all__ = [
    "MapClass",
    "MapInstance",
    "VectorMap",
    "BevGridSpec",
    "CLASS_NAMES",
    "default_taxonomy",
    "default_grid",
]

CLASS_NAMES = ("lane-divider", "ped-crossing", "road-boundary")


@dataclass(frozen=True)
class MapClass:
    id: int
    name: str
    config: GenGtConfig

    @property
    def degree(self) -> int:
        return self.config.degree

    @property
    def max_pieces(self) -> int:
        return self.config.max_pieces


def default_taxonomy(tolerance: float = 0.1, samples: int = 100) -> tuple:
    """Divider <3,2>, crossing <1,1>, boundary <7,3>; max pieces equal to k."""
    deploy = {"lane-divider": (3, 2), "ped-crossing": (1, 1), "road-boundary": (7, 3)}
    return tuple(
        MapClass(i, name, GenGtConfig(deploy[name][1], samples, tolerance, deploy[name][0]))
        for i, name in enumerate(CLASS_NAMES)
    )


def _check_taxonomy(taxonomy):
    if [c.id for c in taxonomy] != list(range(len(taxonomy))):
        raise ConfigurationError("class ids must be 0..U-1 in order")
    if len({c.name for c in taxonomy}) != len(taxonomy):
        raise ConfigurationError("class names must be unique")


@dataclass(frozen=True)
class BevGridSpec:
    """Perception range (metres) and raster resolution (metres per pixel)."""

    front: float = 30.0
    rear: float = 30.0
    left: float = 15.0
    right: float = 15.0
    resolution: float = 0.15

    def __post_init__(self):
        if self.resolution <= 0:
            raise ConfigurationError("resolution must be positive")
        for name in ("front", "rear", "left", "right"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} range must be non-negative")
        for extent, name in ((self.left + self.right, "lateral"), (self.front + self.rear, "longitudinal")):
            cells = extent / self.resolution
            if abs(cells - round(cells)) > 1e-6:
                raise ConfigurationError(f"{name} extent is not a whole number of pixels")

    @property
    def height(self) -> int:
        return int(round((self.left + self.right) / self.resolution))

    @property
    def width(self) -> int:
        return int(round((self.front + self.rear) / self.resolution))

    @property
    def shape(self) -> tuple:
        return (self.height, self.width)

    @property
    def kappa(self) -> tuple:
        """Scale (metres -> pixels) along x and y; y is negative since rows run rightward."""
        return (1.0 / self.resolution, -1.0 / self.resolution)

    def contains(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        return (
            (xy[..., 0] >= -self.rear) & (xy[..., 0] <= self.front)
            & (xy[..., 1] >= -self.right) & (xy[..., 1] <= self.left)
        )


def default_grid() -> BevGridSpec:
    return BevGridSpec()


@dataclass(frozen=True)
class MapInstance:
    """One class-labelled map element.

    ``geometry`` is a :class:`Polyline` (annotation form) or a
    :class:`PiecewiseBezier` (ground-truth form). ``scene`` groups
    instances that belong to the same sample; evaluation only matches
    within a scene. ``source`` optionally records the index of the
    annotation a generated curve came from.
    """

    class_id: int
    geometry: object
    score: float = 1.0
    scene: int = 0
    source: int | None = None

    def __post_init__(self):
        if not isinstance(self.geometry, (Polyline, PiecewiseBezier)):
            object.__setattr__(self, "geometry", Polyline(self.geometry))


@dataclass(frozen=True)
class VectorMap:
    instances: tuple = ()
    taxonomy: tuple = None
    grid: BevGridSpec = None

    def __post_init__(self):
        tax = tuple(self.taxonomy) if self.taxonomy is not None else default_taxonomy()
        _check_taxonomy(tax)
        object.__setattr__(self, "taxonomy", tax)
        object.__setattr__(self, "instances", tuple(self.instances))
        if self.grid is None:
            object.__setattr__(self, "grid", default_grid())
        for i, inst in enumerate(self.instances):
            if not 0 <= inst.class_id < len(tax):
                raise ConfigurationError(f"instance {i} has unknown class id {inst.class_id}")

    def of_class(self, class_id: int) -> list:
        return [x for x in self.instances if x.class_id == class_id]

    def class_by_name(self, name: str) -> MapClass:
        for c in self.taxonomy:
            if c.name == name:
                return c
        raise ConfigurationError(f"unknown class {name!r}")
