"""Chamfer distance and instance-level average precision.

A prediction counts as a true positive when its Chamfer distance to a
still-unmatched ground-truth instance of the same class and scene is
below the threshold. Predictions are visited in descending score order
and take the closest unmatched ground truth; ground truths are consumed
only by true positives. AP is the area under the all-point interpolated
precision/recall curve, accumulated over every scene of the map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .bezier import PiecewiseBezier, restore_curve
from .errors import ConfigurationError, DomainError
from .polyline import as_points, resample_arclength

__all__ = [
    "EvalReport",
    "chamfer_distance",
    "chamfer_batch",
    "average_precision",
    "match_scene",
    "instance_ap",
    "instance_points",
    "evaluate_map",
    "DEFAULT_THRESHOLDS",
    "EVAL_POINTS",
]

DEFAULT_THRESHOLDS = (0.2, 0.5, 1.0)
EVAL_POINTS = 100

# above this many pairwise distances, switch to a kd-tree
_BRUTE_LIMIT = 250_000


def chamfer_distance(a, b) -> float:
    """Symmetric Chamfer distance in metres.

    Half the sum of the two directed mean nearest-neighbour distances::

        CD = (mean_a min_b |a - b| + mean_b min_a |a - b|) / 2
    """
    a = as_points(a)
    b = as_points(b)
    if len(a) == 0 or len(b) == 0:
        raise DomainError("Chamfer distance of an empty point set")
    if len(a) * len(b) <= _BRUTE_LIMIT:
        d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
        return 0.5 * float(d.min(axis=1).mean() + d.min(axis=0).mean())
    dab, _ = cKDTree(b).query(a)
    dba, _ = cKDTree(a).query(b)
    return 0.5 * float(dab.mean() + dba.mean())


def chamfer_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Chamfer distance between paired point sets ``a[i]`` and ``b[i]``.

    ``a`` is ``(E, p, 2)`` and ``b`` is ``(E, q, 2)``; returns ``(E,)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # squared distances through |a|^2 + |b|^2 - 2ab; roots only of the minima
    d2 = (a * a).sum(-1)[:, :, None] + (b * b).sum(-1)[:, None, :] - 2.0 * (a @ b.transpose(0, 2, 1))
    np.maximum(d2, 0.0, out=d2)
    return 0.5 * (np.sqrt(d2.min(axis=2)).mean(axis=1) + np.sqrt(d2.min(axis=1)).mean(axis=1))


def average_precision(scores, tp, n_gt: int) -> float:
    """All-point interpolated AP from per-prediction scores and TP flags."""
    scores = np.asarray(scores, dtype=float)
    tp = np.asarray(tp, dtype=float)
    if n_gt == 0:
        return 1.0 if len(scores) == 0 else 0.0
    if len(scores) == 0:
        return 0.0
    order = np.argsort(-scores, kind="stable")
    tp = tp[order]
    ctp = np.cumsum(tp)
    cfp = np.cumsum(1.0 - tp)
    recall = ctp / n_gt
    precision = ctp / (ctp + cfp)
    mrec = np.r_[0.0, recall, 1.0]
    mpre = np.r_[0.0, precision, 0.0]
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    return float(np.sum((mrec[1:] - mrec[:-1]) * mpre[1:]))


def match_scene(cd: np.ndarray, scores, tau: float) -> np.ndarray:
    """Greedy score-ordered matching inside one scene.

    ``cd`` is ``(num_pred, num_gt)``. Returns boolean TP flags in the
    original prediction order.
    """
    scores = np.asarray(scores, dtype=float)
    tp = np.zeros(len(scores), dtype=bool)
    if len(scores) == 0:
        return tp
    cd = np.asarray(cd, dtype=float).reshape(len(scores), -1)
    if cd.shape[1] == 0:
        return tp
    taken = np.zeros(cd.shape[1], dtype=bool)
    for i in np.argsort(-scores, kind="stable"):
        row = np.where(taken, np.inf, cd[i])
        j = int(np.argmin(row))
        if row[j] < tau:
            tp[i] = True
            taken[j] = True
    return tp


def instance_ap(preds, gts, tau: float) -> float:
    """AP of scored predictions against ground truths in a single scene.

    Parameters
    ----------
    preds : list of (points, score)
    gts : list of points
    tau : float
        True-positive Chamfer threshold in metres.
    """
    scores = [float(s) for _, s in preds]
    if not np.all(np.isfinite(scores)):
        raise DomainError("prediction scores must be finite")
    cd = np.array([[chamfer_distance(p, g) for g in gts] for p, _ in preds]).reshape(
        len(preds), len(gts)
    )
    tp = match_scene(cd, scores, tau)
    return average_precision(scores, tp, len(gts))


def instance_points(geometry, num: int = EVAL_POINTS) -> np.ndarray:
    """Evaluation samples of an instance: ``num`` points even in arc length.

    Bezier instances are restored densely first, so both curve forms are
    compared under the same sampling.
    """
    if isinstance(geometry, PiecewiseBezier):
        dense = restore_curve(geometry, 100)
    else:
        dense = as_points(geometry)
    return resample_arclength(dense, num)


@dataclass
class EvalReport:
    """Per-class, per-threshold AP with the class and overall means."""

    thresholds: tuple
    ap: dict  # class name -> {threshold: AP}
    counts: dict  # class name -> {"pred": int, "gt": int}
    empty_classes: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)

    @property
    def class_ap(self) -> dict:
        return {c: float(np.mean([v[t] for t in self.thresholds])) for c, v in self.ap.items()}

    @property
    def mAP(self) -> float:
        return float(np.mean(list(self.class_ap.values()))) if self.ap else 0.0

    def to_dict(self) -> dict:
        return {
            "thresholds": [float(t) for t in self.thresholds],
            "ap": {c: {repr(float(t)): v[t] for t in self.thresholds} for c, v in self.ap.items()},
            "class_ap": self.class_ap,
            "mAP": self.mAP,
            "counts": self.counts,
            "empty_classes": list(self.empty_classes),
            "failures": dict(self.failures),
        }


def _bbox_gap(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    # lower bound on every nearest-neighbour distance, hence on CD
    lo = np.maximum(boxes_a[:, None, :2], boxes_b[None, :, :2])
    hi = np.minimum(boxes_a[:, None, 2:], boxes_b[None, :, 2:])
    gap = np.clip(lo - hi, 0.0, None)
    return np.hypot(gap[..., 0], gap[..., 1])


def _scene_cd(pred_pts, gt_pts, cutoff: float) -> np.ndarray:
    cd = np.full((len(pred_pts), len(gt_pts)), np.inf)
    if not len(pred_pts) or not len(gt_pts):
        return cd
    A = np.stack(pred_pts)
    B = np.stack(gt_pts)
    box = lambda P: np.concatenate([P.min(axis=1), P.max(axis=1)], axis=1)  # noqa: E731
    gap = _bbox_gap(box(A), box(B))
    ii, jj = np.nonzero(gap < cutoff)
    if len(ii):
        cd[ii, jj] = chamfer_batch(A[ii], B[jj])
    return cd


def evaluate_map(pred, gt, thresholds=DEFAULT_THRESHOLDS, num_points: int = EVAL_POINTS) -> EvalReport:
    """Evaluate a predicted :class:`~bezmap.mapmodel.VectorMap` against ground truth.

    Instances are grouped by class and scene; matching never crosses either
    boundary. A class with neither predictions nor ground truth scores 1.0
    and is listed in ``empty_classes``.
    """
    thresholds = tuple(float(t) for t in thresholds)
    if not thresholds:
        raise ConfigurationError("at least one threshold is required")
    if [(c.id, c.name) for c in pred.taxonomy] != [(c.id, c.name) for c in gt.taxonomy]:
        raise ConfigurationError("prediction and ground truth use different taxonomies")
    cutoff = max(thresholds)
    ap, counts, empty = {}, {}, []
    for cls in gt.taxonomy:
        P = [x for x in pred.instances if x.class_id == cls.id]
        G = [x for x in gt.instances if x.class_id == cls.id]
        counts[cls.name] = {"pred": len(P), "gt": len(G)}
        if not P and not G:
            empty.append(cls.name)
        scenes = sorted({x.scene for x in P} | {x.scene for x in G})
        per_scene = []
        for sc in scenes:
            ps = [x for x in P if x.scene == sc]
            gs = [x for x in G if x.scene == sc]
            cd = _scene_cd(
                [instance_points(x.geometry, num_points) for x in ps],
                [instance_points(x.geometry, num_points) for x in gs],
                cutoff,
            )
            per_scene.append((cd, np.array([x.score for x in ps], dtype=float)))
        ap[cls.name] = {}
        for tau in thresholds:
            scores, tps = [], []
            for cd, sc in per_scene:
                scores.append(sc)
                tps.append(match_scene(cd, sc, tau))
            scores = np.concatenate(scores) if scores else np.zeros(0)
            tps = np.concatenate(tps) if tps else np.zeros(0, dtype=bool)
            ap[cls.name][tau] = average_precision(scores, tps, len(G))
    return EvalReport(thresholds, ap, counts, empty)
