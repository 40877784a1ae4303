"""Point/curve/region recovery losses, auxiliary mask loss and matching.

Everything here works on plain numpy arrays; gradients of the two L1
terms are given in closed form so they can be checked against finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .bezier import PiecewiseBezier, restore_curve, restore_matrix
from .errors import DegenerateError, DomainError, ShapeError
from .geometry import bev_world_transforms
from .polyline import as_points

__all__ = [
    "LossWeights",
    "DilationSpec",
    "l_point",
    "l_curve",
    "dilate_coords",
    "grid_sample",
    "dice_loss",
    "bce_loss",
    "l_region",
    "pcr_loss",
    "aux_loss",
    "hungarian_match",
    "curve_match_cost",
    "grad_l_point",
    "grad_l_curve",
]


@dataclass(frozen=True)
class LossWeights:
    semantic: float = 1.0  # aux, BEV semantic masks
    instance: float = 5.0  # aux, instance masks
    point: float = 5.0
    curve: float = 10.0
    region: float = 1.0

    def __post_init__(self):
        for k, v in vars(self).items():
            if not (np.isfinite(v) and v >= 0):
                raise DomainError(f"weight {k} must be finite and non-negative, got {v}")

    def scaled(self, factor: float) -> "LossWeights":
        return LossWeights(*(factor * v for v in vars(self).values()))


@dataclass(frozen=True)
class DilationSpec:
    omega: int = 5

    def __post_init__(self):
        if self.omega < 0 or int(self.omega) != self.omega:
            raise DomainError(f"dilation width must be a non-negative integer, got {self.omega}")

    @property
    def size(self) -> int:
        return (2 * self.omega + 1) ** 2


def _ctrl(x) -> np.ndarray:
    return x.controls if isinstance(x, PiecewiseBezier) else as_points(x)


def l_point(pred, gt) -> float:
    """Mean over control points of ``|dx| + |dy|``."""
    p, g = _ctrl(pred), _ctrl(gt)
    if p.shape != g.shape:
        raise ShapeError(f"control sequences differ in shape: {p.shape} vs {g.shape}")
    return float(np.abs(g - p).sum(axis=1).mean())


def _check_same_shape(pred, gt):
    if (pred.degree, pred.pieces) != (gt.degree, gt.pieces):
        raise ShapeError(
            f"<{pred.pieces},{pred.degree}> prediction vs <{gt.pieces},{gt.degree}> ground truth"
        )


def l_curve(pred: PiecewiseBezier, gt: PiecewiseBezier, m: int = 100) -> float:
    """L1 loss between curves restored with ``m`` samples per segment."""
    _check_same_shape(pred, gt)
    return l_point(restore_curve(pred, m), restore_curve(gt, m))


def grad_l_point(pred, gt) -> np.ndarray:
    """d l_point / d pred. At a kink (equal coordinates) the right derivative, +1/N, is used."""
    p, g = _ctrl(pred), _ctrl(gt)
    if p.shape != g.shape:
        raise ShapeError("control sequences differ in shape")
    sign = np.where(p - g >= 0, 1.0, -1.0)
    return sign / len(p)


def grad_l_curve(pred: PiecewiseBezier, gt: PiecewiseBezier, m: int = 100) -> np.ndarray:
    """d l_curve / d pred.controls, chained through the fixed restore matrix."""
    _check_same_shape(pred, gt)
    S = restore_matrix(pred.degree, pred.pieces, m)
    r = S @ (pred.controls - gt.controls)
    sign = np.where(r >= 0, 1.0, -1.0)
    return S.T @ sign / S.shape[0]


def dilate_coords(points, spec: DilationSpec | int) -> np.ndarray:
    """Replace every coordinate with its ``(2w+1)^2`` integer-offset neighbourhood.

    Output is grouped per input point, offsets in row-major order.
    """
    w = spec.omega if isinstance(spec, DilationSpec) else DilationSpec(spec).omega
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    r = np.arange(-w, w + 1, dtype=float)
    off = np.stack(np.meshgrid(r, r, indexing="ij"), axis=-1).reshape(-1, 2)
    return (p[:, None, :] + off[None]).reshape(-1, 2)


def grid_sample(mask, coords) -> np.ndarray:
    """Bilinear read of ``mask`` at real ``(row, col)`` coordinates.

    Integer coordinates are cell centres; neighbours outside the mask read
    as zero.
    """
    M = np.asarray(mask, dtype=float)
    if M.ndim != 2:
        raise ShapeError("mask must be 2D")
    c = np.asarray(coords, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(c)):
        raise DomainError("sample coordinates must be finite")
    H, W = M.shape
    r0 = np.floor(c[:, 0]).astype(np.int64)
    c0 = np.floor(c[:, 1]).astype(np.int64)
    fr = c[:, 0] - r0
    fc = c[:, 1] - c0
    out = np.zeros(len(c))
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            rr, cc = r0 + dr, c0 + dc
            ok = (rr >= 0) & (rr < H) & (cc >= 0) & (cc < W)
            val = np.zeros(len(c))
            val[ok] = M[rr[ok], cc[ok]]
            out += wr * wc * val
    return out


def dice_loss(pred, gt, smooth: float = 1.0) -> float:
    """``1 - (2 sum(p*g) + s) / (sum(p^2) + sum(g^2) + s)``."""
    p = np.asarray(pred, dtype=float).ravel()
    g = np.asarray(gt, dtype=float).ravel()
    if p.shape != g.shape:
        raise ShapeError(f"dice inputs differ in size: {p.size} vs {g.size}")
    return float(1.0 - (2.0 * (p * g).sum() + smooth) / ((p * p).sum() + (g * g).sum() + smooth))


def bce_loss(pred, gt, eps: float = 1e-7) -> float:
    """Mean binary cross-entropy with predictions clamped to ``[eps, 1 - eps]``."""
    p = np.clip(np.asarray(pred, dtype=float), eps, 1.0 - eps)
    g = np.asarray(gt, dtype=float)
    if p.shape != g.shape:
        raise ShapeError(f"cross-entropy inputs differ in shape: {p.shape} vs {g.shape}")
    return float(-(g * np.log(p) + (1.0 - g) * np.log(1.0 - p)).mean())


def l_region(pred_mask, gt_mask, pred_curve, spec: DilationSpec, grid) -> float:
    """Dice between both masks read along the dilated predicted curve.

    ``pred_curve`` is in world metres; it is mapped into pixels with
    ``grid`` before dilation.
    """
    pm = np.asarray(pred_mask, dtype=float)
    gm = np.asarray(gt_mask, dtype=float)
    if pm.shape != gm.shape:
        raise ShapeError(f"mask shapes differ: {pm.shape} vs {gm.shape}")
    pts = restore_curve(pred_curve, 100) if isinstance(pred_curve, PiecewiseBezier) else as_points(pred_curve)
    if len(pts) == 0:
        raise DegenerateError("cannot sample masks along an empty curve")
    coords = dilate_coords(bev_world_transforms(grid).world_to_pixel(pts), spec)
    return dice_loss(grid_sample(gm, coords), grid_sample(pm, coords))


def pcr_loss(components, w: LossWeights = LossWeights()) -> float:
    """Weighted sum of the (point, curve, region) loss values."""
    lp, lc, lr = (float(x) for x in components)
    if not np.all(np.isfinite([lp, lc, lr])):
        raise DomainError("loss components must be finite")
    return w.point * lp + w.curve * lc + w.region * lr


def _compound(pred, gt) -> float:
    return bce_loss(pred, gt) + dice_loss(pred, gt)


def aux_loss(pred_sem, gt_sem, pred_ins, gt_ins, w: LossWeights = LossWeights()) -> float:
    """Weighted (cross-entropy + dice) on the semantic and instance masks."""
    for a, b, name in ((pred_sem, gt_sem, "semantic"), (pred_ins, gt_ins, "instance")):
        if np.shape(a) != np.shape(b):
            raise ShapeError(f"{name} masks differ in shape")
    total = 0.0
    if w.semantic:
        total += w.semantic * _compound(pred_sem, gt_sem)
    if w.instance:
        total += w.instance * _compound(pred_ins, gt_ins)
    return total


def hungarian_match(cost) -> list:
    """Minimum-cost one-to-one assignment as a sorted list of ``(row, col)`` pairs."""
    C = np.asarray(cost, dtype=float)
    if C.size == 0:
        return []
    if C.ndim != 2:
        raise ShapeError("cost must be a 2D matrix")
    if not np.all(np.isfinite(C)):
        raise DomainError("costs must be finite")
    rows, cols = linear_sum_assignment(C)
    return [(int(r), int(c)) for r, c in zip(rows, cols)]


def curve_match_cost(preds, gts, w: LossWeights = LossWeights(), mismatch: float = 1e3) -> np.ndarray:
    """Cost matrix between predicted and ground-truth instances.

    ``preds`` and ``gts`` are sequences of ``(class_id, PiecewiseBezier)``.
    Pairs of the same class and shape cost ``w.point * l_point``; anything
    else costs ``mismatch``.
    """
    C = np.full((len(preds), len(gts)), float(mismatch))
    for i, (ci, p) in enumerate(preds):
        for j, (cj, g) in enumerate(gts):
            if ci == cj and p.controls.shape == g.controls.shape:
                C[i, j] = w.point * l_point(p, g)
    return C
