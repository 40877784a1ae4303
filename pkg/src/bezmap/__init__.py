"""Piecewise Bezier vectorisation of HD-map elements.

Bezier math, greedy ground-truth generation, Chamfer-AP evaluation,
recovery losses, camera/BEV geometry and file tooling.
"""

from .bezier import (
    BernsteinMatrix, BezierSegment, OffsetEncoding, PiecewiseBezier, bernstein_basis,
    bernstein_matrix, decode_offsets, degree_elevate, encode_offsets, eval_bezier,
    fit_segment, restore_curve, sample_points,
)
from .geometry import (
    BevTransform, CameraModel, bev_world_transforms, ipm_unproject, look_at, project_to_feature,
    sincos_embed,
)
from .gengt import GenGtConfig, curve_interpolate, fit_error, gen_gt, gen_gt_map, verify_corpus
from .mapmodel import BevGridSpec, MapClass, MapInstance, VectorMap, default_grid, default_taxonomy
from .metrics import EvalReport, chamfer_distance, evaluate_map, instance_ap
from .polyline import Polyline
from .raster import rasterize
from .synth import CorpusSpec, synth_corpus

__version__ = "0.1.0"

__all__ = [
    "BernsteinMatrix", "BezierSegment", "OffsetEncoding", "PiecewiseBezier",
    "bernstein_basis", "bernstein_matrix", "decode_offsets", "degree_elevate",
    "encode_offsets", "eval_bezier", "fit_segment", "restore_curve", "sample_points",
    "GenGtConfig", "curve_interpolate", "fit_error", "gen_gt", "gen_gt_map", "verify_corpus",
    "BevGridSpec", "MapClass", "MapInstance", "VectorMap", "default_grid", "default_taxonomy",
    "EvalReport", "chamfer_distance", "evaluate_map", "instance_ap", "Polyline",
    "BevTransform", "CameraModel", "bev_world_transforms", "ipm_unproject", "look_at",
    "project_to_feature", "sincos_embed", "rasterize", "CorpusSpec", "synth_corpus",
]
