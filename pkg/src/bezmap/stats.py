"""Compactness and piece-count statistics of generated ground truth."""

from __future__ import annotations

import numpy as np

from .bezier import PiecewiseBezier
from .polyline import Polyline

__all__ = ["stats", "reduction_ratio"]


def reduction_ratio(num_points: int, degree: int, pieces: int) -> float:
    """Fraction of annotation points saved by ``n*k + 1`` control points."""
    return 1.0 - (degree * pieces + 1) / num_points


def stats(annotation, gt) -> dict:
    """Per-class compactness and piece histograms for paired documents.

    Ground-truth instances are paired with annotations through their
    ``source`` index (falling back to position). Pairs whose class or
    geometry kind does not line up are counted as skipped.
    """
    out = {
        c.name: {"instances": 0, "skipped": 0, "control_points": 0, "annotation_points": 0,
                 "reduction_mean": None, "reduction_min": None, "pieces": {}}
        for c in gt.taxonomy
    }
    ratios = {c.name: [] for c in gt.taxonomy}
    ann = annotation.instances
    for pos, inst in enumerate(gt.instances):
        name = gt.taxonomy[inst.class_id].name
        idx = inst.source if inst.source is not None else pos
        src = ann[idx] if 0 <= idx < len(ann) else None
        g = inst.geometry
        if (
            src is None or src.class_id != inst.class_id
            or not isinstance(g, PiecewiseBezier) or not isinstance(src.geometry, Polyline)
        ):
            out[name]["skipped"] += 1
            continue
        row = out[name]
        row["instances"] += 1
        row["control_points"] += len(g.controls)
        row["annotation_points"] += len(src.geometry)
        key = str(g.pieces)
        row["pieces"][key] = row["pieces"].get(key, 0) + 1
        ratios[name].append(reduction_ratio(len(src.geometry), g.degree, g.pieces))
    for name, r in ratios.items():
        if r:
            out[name]["reduction_mean"] = float(np.mean(r))
            out[name]["reduction_min"] = float(np.min(r))
        out[name]["pieces"] = dict(sorted(out[name]["pieces"].items(), key=lambda kv: int(kv[0])))
    return out
