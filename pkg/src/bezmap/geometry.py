"""Pinhole projection, flat-ground unprojection, BEV scaling and sin-cos embeddings.

A feature-grid location ``p = (u, v, 1)`` and a world point ``X`` are
related through

    d * inv(A) @ p = K @ T @ X

with ``K`` the intrinsics, ``T`` the world-to-camera extrinsics (first
three rows of a 4x4 rigid transform), ``A`` the image-grid to
feature-grid mapping and ``d`` the depth. Fixing the world height turns
this into a 3x3 linear system for ``(x, y, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, ConfigurationError, ShapeError

__all__ = [
    "CameraModel",
    "BevTransform",
    "ipm_unproject",
    "project_to_feature",
    "bev_world_transforms",
    "sincos_embed",
    "look_at",
]


@dataclass(frozen=True, eq=False)
class CameraModel:
    """Intrinsics ``K`` (3x3), world-to-camera ``T`` (4x4) and feature transform ``A`` (3x3)."""

    K: np.ndarray
    T: np.ndarray
    A: np.ndarray = None

    def __post_init__(self):
        K = np.array(self.K, dtype=float)
        T = np.array(self.T, dtype=float)
        A = np.eye(3) if self.A is None else np.array(self.A, dtype=float)
        if K.shape != (3, 3) or A.shape != (3, 3):
            raise ShapeError("K and A must be 3x3")
        if T.shape == (3, 4):
            T = np.vstack([T, [0.0, 0.0, 0.0, 1.0]])
        if T.shape != (4, 4):
            raise ShapeError("T must be 4x4 (or 3x4)")
        for M, name in ((K, "K"), (A, "A")):
            if abs(np.linalg.det(M)) < 1e-12:
                raise ConfigurationError(f"{name} is not invertible")
        R = T[:3, :3]
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9) or np.linalg.det(R) < 0:
            raise ConfigurationError("T is not a rigid transform")
        if not np.allclose(T[3], [0, 0, 0, 1]):
            raise ConfigurationError("T must have a [0, 0, 0, 1] last row")
        for name, M in (("K", K), ("T", T), ("A", A)):
            M.setflags(write=False)
            object.__setattr__(self, name, M)

    @classmethod
    def with_stride(cls, K, T, stride: float, offset=(0.0, 0.0)):
        """Camera whose feature grid is the image grid scaled by ``1/stride``."""
        A = np.array([[1.0 / stride, 0.0, -offset[0] / stride],
                      [0.0, 1.0 / stride, -offset[1] / stride],
                      [0.0, 0.0, 1.0]])
        return cls(K, T, A)

    @property
    def center(self) -> np.ndarray:
        """Camera position in world coordinates."""
        R, t = self.T[:3, :3], self.T[:3, 3]
        return -R.T @ t


def look_at(eye, target, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """World-to-camera 4x4 for a camera at ``eye`` looking at ``target``.

    Camera axes follow the usual vision convention: ``z`` forward, ``x``
    right, ``y`` down.
    """
    eye = np.asarray(eye, dtype=float)
    z = np.asarray(target, dtype=float) - eye
    z /= np.linalg.norm(z)
    x = np.cross(z, np.asarray(up, dtype=float))
    if np.linalg.norm(x) < 1e-12:
        x = np.cross(z, [0.0, 1.0, 0.0]) if abs(z[1]) < 0.9 else np.cross(z, [1.0, 0.0, 0.0])
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    R = np.stack([x, y, z])
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = -R @ eye
    return T


def project_to_feature(world, cam: CameraModel):
    """Project a 3D world point onto the feature grid.

    Returns ``((u, v), d)``. Raises :class:`BehindCameraError` when ``d <= 0``.
    """
    X = np.append(np.asarray(world, dtype=float), 1.0)
    q = cam.A @ (cam.K @ (cam.T @ X)[:3])
    d = q[2]
    if d <= 0:
        raise BehindCameraError(f"point has non-positive depth {d:.6g}")
    return q[:2] / d, float(d)


def ipm_unproject(p_feat, cam: CameraModel, ground_height: float = 0.0):
    """Intersect the viewing ray of a feature-grid point with the ground plane.

    Returns ``((x, y), d)``. A non-positive ``d`` marks the location as
    invalid: the ray meets the plane behind the camera or, with ``d == 0``
    and NaN coordinates, never meets it.
    """
    u, v = p_feat
    R, t = cam.T[:3, :3], cam.T[:3, 3]
    ray = np.linalg.solve(cam.A, [u, v, 1.0])  # inv(A) @ p
    # d * ray = K (R[:, 0] x + R[:, 1] y + R[:, 2] h + t)
    M = np.column_stack([cam.K @ R[:, 0], cam.K @ R[:, 1], -ray])
    rhs = -cam.K @ (R[:, 2] * ground_height + t)
    scale = np.linalg.norm(M, axis=0).prod()
    if abs(np.linalg.det(M)) <= 1e-12 * scale:
        return (float("nan"), float("nan")), 0.0
    x, y, d = np.linalg.solve(M, rhs)
    return (float(x), float(y)), float(d)


@dataclass(frozen=True)
class BevTransform:
    """Affine world <-> BEV pixel mapping: ``pixel = kappa * (world - origin)``.

    Pixels are ``(row, col)``; see :mod:`bezmap.mapmodel` for the axes.
    """

    kappa: tuple
    origin: tuple
    shape: tuple

    def world_to_pixel(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        col = self.kappa[0] * (xy[..., 0] - self.origin[0])
        row = self.kappa[1] * (xy[..., 1] - self.origin[1])
        return np.stack([row, col], axis=-1)

    def pixel_to_world(self, rc) -> np.ndarray:
        rc = np.asarray(rc, dtype=float)
        x = rc[..., 1] / self.kappa[0] + self.origin[0]
        y = rc[..., 0] / self.kappa[1] + self.origin[1]
        return np.stack([x, y], axis=-1)

    def in_bounds(self, rc) -> np.ndarray:
        rc = np.asarray(rc, dtype=float)
        return (
            (rc[..., 0] >= 0) & (rc[..., 0] <= self.shape[0])
            & (rc[..., 1] >= 0) & (rc[..., 1] <= self.shape[1])
        )


def bev_world_transforms(grid) -> BevTransform:
    """World/pixel mapping of a :class:`~bezmap.mapmodel.BevGridSpec`.

    The rear-left corner of the range is pixel ``(0, 0)``, so the ego origin
    lands on ``(left / res, rear / res)``.
    """
    return BevTransform(grid.kappa, (-grid.rear, grid.left), grid.shape)


def sincos_embed(coords, dim: int) -> np.ndarray:
    """Sin-cos embedding of 2D world points, shape ``(N, dim)``.

    The first half encodes ``x`` and the second ``y``. Each half holds
    ``dim/4`` bands with wavelength factor ``10000 ** (2j / (dim/2))``,
    stored as interleaved ``sin, cos`` pairs.
    """
    if dim <= 0 or dim % 4:
        raise ShapeError(f"embedding dimension must be a positive multiple of 4, got {dim}")
    xy = np.atleast_2d(np.asarray(coords, dtype=float))
    if xy.shape[-1] != 2:
        raise ShapeError("coordinates must be 2D")
    half = dim // 2
    freq = 10000.0 ** (2.0 * np.arange(dim // 4) / half)
    out = []
    for axis in range(2):
        arg = xy[:, axis:axis + 1] / freq
        pair = np.stack([np.sin(arg), np.cos(arg)], axis=-1)
        out.append(pair.reshape(len(xy), half))
    return np.concatenate(out, axis=1)
