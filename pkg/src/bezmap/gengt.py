"""Greedy piecewise-Bezier ground truth from annotated polylines.

Starting at the first vertex, the longest span whose Bezier fit stays
under the Chamfer tolerance is accepted, then the search restarts from the
span's end vertex. Candidate end vertices are tried from the far end of the
polyline inwards; they are evaluated in vectorised batches, which gives the
same answer as trying them one at a time.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .bezier import BezierSegment, PiecewiseBezier, bernstein_matrix
from .errors import BezmapError, CapacityError, ConfigurationError, DegenerateError, DomainError, ToleranceError
from .metrics import DEFAULT_THRESHOLDS, chamfer_batch, chamfer_distance
from .polyline import Polyline, arc_lengths, as_points

__all__ = [
    "GenGtConfig",
    "Polyline",
    "curve_interpolate",
    "fit_error",
    "fit_span",
    "gen_gt",
    "gen_gt_map",
    "verify_corpus",
]

# candidate end vertices per batch: small first (long spans often fit), then growing
_BATCHES = (1, 4, 16, 64)


@dataclass(frozen=True)
class GenGtConfig:
    """Parameters of ground-truth generation for one map class.

    ``parameterization`` chooses how a span is resampled before fitting:
    ``"arclength"`` (equal spacing along the chain) or ``"index"`` (linear
    in vertex index, which keeps points that were already sampled at
    uniform curve parameters in place).
    """

    degree: int
    samples: int = 100
    tolerance: float = 0.1
    max_pieces: int = 1
    parameterization: str = "arclength"

    def __post_init__(self):
        if self.degree < 1:
            raise ConfigurationError(f"degree must be >= 1, got {self.degree}")
        if not self.tolerance > 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tolerance}")
        if self.samples < self.degree + 1:
            raise ConfigurationError(
                f"{self.samples} samples cannot determine a degree-{self.degree} segment"
            )
        if self.max_pieces < 1:
            raise ConfigurationError("max_pieces must be >= 1")
        if self.parameterization not in ("arclength", "index"):
            raise ConfigurationError(f"unknown parameterization {self.parameterization!r}")


def _knots(points: np.ndarray, parameterization: str) -> np.ndarray:
    if parameterization == "index":
        return np.arange(len(points), dtype=float)
    return arc_lengths(points)


def _interp_spans(points, knots, s, es, m):
    """Resample spans ``(s, e)`` for every ``e`` in ``es``; shape ``(E, m, 2)``."""
    es = np.asarray(es)
    u = np.linspace(0.0, 1.0, m)
    targets = knots[s] + u[None, :] * (knots[es] - knots[s])[:, None]
    flat = targets.ravel()
    out = np.stack([np.interp(flat, knots, points[:, 0]), np.interp(flat, knots, points[:, 1])], -1)
    out = out.reshape(len(es), m, 2)
    out[:, 0] = points[s]
    out[:, -1] = points[es]
    return out


def curve_interpolate(p, s: int, e: int, m: int, parameterization: str = "arclength") -> np.ndarray:
    """Resample the sub-chain ``p[s..e]`` to exactly ``m`` points.

    With the default arc-length parameterization the outputs are equally
    spaced along the chain; ``p[s]`` and ``p[e]`` are reproduced exactly.
    """
    pts = as_points(p)
    if not 0 <= s < e <= len(pts) - 1:
        raise DomainError(f"invalid span ({s}, {e}) for {len(pts)} points")
    if m < 2:
        raise DomainError("need at least 2 output points")
    knots = _knots(pts, parameterization)
    if knots[e] - knots[s] <= 0.0:
        raise DegenerateError(f"sub-curve ({s}, {e}) has zero length")
    return _interp_spans(pts, knots, s, [e], m)[0]


def fit_error(a, b) -> float:
    """Fitting error between two sampled curves (symmetric Chamfer distance)."""
    return chamfer_distance(a, b)


@functools.lru_cache(maxsize=64)
def _clamped_system(n: int, m: int):
    B = bernstein_matrix(n, m).forward
    mid = B[:, 1:-1]
    pinv_mid = np.linalg.pinv(mid) if n > 1 else np.zeros((0, m))
    return B, pinv_mid


def fit_span(samples: np.ndarray, n: int):
    """Endpoint-clamped least-squares fit of sample batches.

    ``samples`` is ``(E, m, 2)``. The first and last controls are pinned to
    the first and last samples so consecutive pieces join exactly; the
    interior controls solve the remaining least-squares problem through
    the pseudo-inverse of the interior Bernstein columns. Returns controls
    ``(E, n+1, 2)`` and restored curves ``(E, m, 2)``.
    """
    m = samples.shape[1]
    B, pinv_mid = _clamped_system(n, m)
    c0 = samples[:, :1]
    cn = samples[:, -1:]
    rhs = samples - B[None, :, :1] * c0 - B[None, :, -1:] * cn
    mid = np.einsum("im,emd->eid", pinv_mid, rhs)
    ctrl = np.concatenate([c0, mid, cn], axis=1)
    restored = np.einsum("mi,eid->emd", B, ctrl)
    return ctrl, restored


def _batch_sizes():
    yield from _BATCHES
    while True:
        yield _BATCHES[-1]


def gen_gt(p, cfg: GenGtConfig, class_id: int = 0) -> PiecewiseBezier:
    """Convert an annotated polyline into a minimal-piece Bezier curve.

    Raises
    ------
    CapacityError
        More than ``cfg.max_pieces`` pieces would be required.
    ToleranceError
        Even a single-edge span cannot be fitted below tolerance.
    """
    pts = Polyline(p).points if not isinstance(p, Polyline) else p.points
    knots = _knots(pts, cfg.parameterization)
    n, m = cfg.degree, cfg.samples
    last = len(pts) - 1
    s = 0
    segments = []
    while s < last:
        if len(segments) == cfg.max_pieces:
            raise CapacityError(f"polyline needs more than the allowed {cfg.max_pieces} piece(s)")
        accepted = None
        candidates = np.arange(last, s, -1)
        lo = 0
        for size in _batch_sizes():
            if lo >= len(candidates):
                break
            es = candidates[lo:lo + size]
            lo += size
            dagger = _interp_spans(pts, knots, s, es, m)
            ctrl, ddagger = fit_span(dagger, n)
            err = chamfer_batch(dagger, ddagger)
            ok = np.nonzero(err < cfg.tolerance)[0]
            if len(ok):
                accepted = (int(es[ok[0]]), ctrl[ok[0]])
                break
        if accepted is None:
            raise ToleranceError(f"span starting at vertex {s} cannot be fitted within {cfg.tolerance}")
        e, c = accepted
        segments.append(BezierSegment(c))
        s = e
    return PiecewiseBezier(tuple(segments), class_id)


def gen_gt_map(vmap, configs=None):
    """Generate Bezier ground truth for every polyline instance of a map.

    ``configs`` maps class id to :class:`GenGtConfig`; by default each
    class's own config from the map taxonomy is used. Returns the new map
    (Bezier instances carry the index of their source annotation) and a
    dict of per-class failure counts. Failed instances are left out.
    """
    from .mapmodel import MapInstance, VectorMap

    if configs is None:
        configs = {c.id: c.config for c in vmap.taxonomy}
    out, failures = [], {}
    for idx, inst in enumerate(vmap.instances):
        cfg = configs[inst.class_id]
        try:
            pb = gen_gt(inst.geometry, cfg, inst.class_id)
        except BezmapError:
            name = vmap.taxonomy[inst.class_id].name
            failures[name] = failures.get(name, 0) + 1
            continue
        out.append(MapInstance(inst.class_id, pb, inst.score, inst.scene, source=idx))
    return VectorMap(tuple(out), vmap.taxonomy, vmap.grid), failures


def verify_corpus(instances, configs=None, thresholds=DEFAULT_THRESHOLDS, taxonomy=None):
    """Reliability check of generated ground truth.

    Each annotation is converted with :func:`gen_gt`, the result is restored
    and scored as a prediction (score 1.0) against the original annotations.
    Instances whose generation fails are missing predictions.

    ``instances`` is a :class:`~bezmap.mapmodel.VectorMap` or a list of
    ``(polyline, class_id)`` / ``(polyline, class_id, scene)`` tuples.
    """
    from .mapmodel import MapInstance, VectorMap, default_taxonomy
    from .metrics import evaluate_map

    if isinstance(instances, VectorMap):
        annot = instances
    else:
        items = list(instances)
        if not items:
            raise DomainError("empty corpus")
        insts = []
        for it in items:
            poly, cls = it[0], int(it[1])
            scene = int(it[2]) if len(it) > 2 else 0
            insts.append(MapInstance(cls, poly if isinstance(poly, Polyline) else Polyline(poly), 1.0, scene))
        annot = VectorMap(tuple(insts), tuple(taxonomy or default_taxonomy()))
    if not annot.instances:
        raise DomainError("empty corpus")
    if isinstance(configs, GenGtConfig):
        configs = {c.id: configs for c in annot.taxonomy}
    pred, failures = gen_gt_map(annot, configs)
    report = evaluate_map(pred, annot, thresholds)
    report.failures = failures
    return report
