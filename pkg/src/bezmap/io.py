"""JSON map documents (schema ``bezmap/1``) and plain PGM rasters.

Document layout::

    {
      "schema": "bezmap/1",
      "grid": {"front": 30.0, "rear": 30.0, "left": 15.0, "right": 15.0, "resolution": 0.15},
      "taxonomy": [
        {"id": 0, "name": "lane-divider", "degree": 2, "max_pieces": 3,
         "samples": 100, "epsilon": 0.1}, ...
      ],
      "instances": [
        {"class": 0, "scene": 0, "score": 1.0, "kind": "polyline",
         "points": [[x, y], ...]},
        {"class": 0, "scene": 0, "score": 1.0, "kind": "bezier", "source": 3,
         "explicit": [[x, y], ...], "offsets": [[[dx, dy], ...], ...]}
      ]
    }

``offsets`` holds, per segment, the ``degree - 1`` implicit control
points relative to the midpoint of the segment's two explicit points.
Extrinsics in camera files are world-to-camera.
"""

from __future__ import annotations

import json

import numpy as np

from .bezier import OffsetEncoding, PiecewiseBezier, decode_offsets, encode_offsets
from .errors import BezmapError, ParseError, SchemaVersionError
from .gengt import GenGtConfig
from .mapmodel import BevGridSpec, MapClass, MapInstance, VectorMap
from .polyline import Polyline

__all__ = [
    "SCHEMA",
    "parse_map",
    "write_map",
    "read_map",
    "save_map",
    "dumps",
    "write_pgm",
    "read_pgm",
    "parse_camera",
]

SCHEMA = "bezmap/1"


def dumps(obj) -> str:
    """Deterministic JSON text: fixed key order from the caller, shortest round-trip floats."""
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def _pts(a) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(a, dtype=float)]


def _instance_to_json(inst: MapInstance) -> dict:
    d = {"class": inst.class_id, "scene": inst.scene, "score": float(inst.score)}
    g = inst.geometry
    if isinstance(g, PiecewiseBezier):
        enc = encode_offsets(g)
        d["kind"] = "bezier"
        if inst.source is not None:
            d["source"] = inst.source
        d["explicit"] = _pts(enc.explicit_points)
        d["offsets"] = [_pts(o) for o in enc.offsets]
    else:
        d["kind"] = "polyline"
        if inst.source is not None:
            d["source"] = inst.source
        d["points"] = _pts(g.points)
    return d


def write_map(doc: VectorMap) -> str:
    g = doc.grid
    out = {
        "schema": SCHEMA,
        "grid": {
            "front": float(g.front), "rear": float(g.rear),
            "left": float(g.left), "right": float(g.right),
            "resolution": float(g.resolution),
        },
        "taxonomy": [
            {
                "id": c.id, "name": c.name, "degree": c.config.degree,
                "max_pieces": c.config.max_pieces, "samples": c.config.samples,
                "epsilon": float(c.config.tolerance),
            }
            for c in doc.taxonomy
        ],
        "instances": [_instance_to_json(x) for x in doc.instances],
    }
    return dumps(out)


def _get(d, key, path, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"{path}.{key}", "missing field")
    v = d[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        raise ParseError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return v


def _num(d, key, path, default=None):
    if default is not None and key not in d:
        return default
    return float(_get(d, key, path, (int, float)))


def _point_list(v, path, min_len=1):
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(path, "expected a list of [x, y] pairs") from None
    if a.ndim != 2 or a.shape[1] != 2 or len(a) < min_len:
        raise ParseError(path, f"expected at least {min_len} [x, y] pairs")
    if not np.all(np.isfinite(a)):
        raise ParseError(path, "coordinates must be finite")
    return a


def parse_map(text: str) -> VectorMap:
    """Parse a map document, raising :class:`ParseError` with a field path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("$", f"invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ParseError("$", "document must be an object")
    version = raw.get("schema")
    if version != SCHEMA:
        raise SchemaVersionError("$.schema", f"unsupported schema version {version!r}")

    gd = _get(raw, "grid", "$", dict)
    try:
        grid = BevGridSpec(*(_num(gd, k, "$.grid") for k in ("front", "rear", "left", "right", "resolution")))
    except ParseError:
        raise
    except BezmapError as e:
        raise ParseError("$.grid", str(e)) from None

    taxonomy = []
    for i, cd in enumerate(_get(raw, "taxonomy", "$", list)):
        path = f"$.taxonomy[{i}]"
        try:
            cfg = GenGtConfig(
                int(_get(cd, "degree", path, int)),
                int(_get(cd, "samples", path, int)) if "samples" in cd else 100,
                _num(cd, "epsilon", path, 0.1),
                int(_get(cd, "max_pieces", path, int)),
            )
        except ParseError:
            raise
        except BezmapError as e:
            raise ParseError(path, str(e)) from None
        taxonomy.append(MapClass(int(_get(cd, "id", path, int)), _get(cd, "name", path, str), cfg))
    if [c.id for c in taxonomy] != list(range(len(taxonomy))):
        raise ParseError("$.taxonomy", "class ids must be 0..U-1 in order")

    instances = []
    for i, idat in enumerate(_get(raw, "instances", "$", list)):
        path = f"$.instances[{i}]"
        cls = _get(idat, "class", path, int)
        if not 0 <= cls < len(taxonomy):
            raise ParseError(f"{path}.class", f"unknown class id {cls}")
        scene = int(_get(idat, "scene", path, int)) if "scene" in idat else 0
        score = _num(idat, "score", path, 1.0)
        source = int(_get(idat, "source", path, int)) if "source" in idat else None
        kind = _get(idat, "kind", path, str)
        if kind == "polyline":
            pts = _point_list(_get(idat, "points", path), f"{path}.points", 2)
            try:
                geom = Polyline(pts)
            except BezmapError as e:
                raise ParseError(f"{path}.points", str(e)) from None
        elif kind == "bezier":
            mc = taxonomy[cls]
            explicit = _point_list(_get(idat, "explicit", path), f"{path}.explicit", 2)
            raw_off = _get(idat, "offsets", path, list)
            if len(raw_off) != len(explicit) - 1:
                raise ParseError(f"{path}.offsets", f"expected {len(explicit) - 1} segments")
            offs = []
            for j, o in enumerate(raw_off):
                if not isinstance(o, list) or len(o) != mc.degree - 1:
                    raise ParseError(f"{path}.offsets[{j}]", f"degree {mc.degree} needs {mc.degree - 1} offsets")
                offs.append(_point_list(o, f"{path}.offsets[{j}]", 0) if o else np.zeros((0, 2)))
            if len(explicit) - 1 > mc.max_pieces:
                raise ParseError(f"{path}.explicit", f"{len(explicit) - 1} pieces exceed max {mc.max_pieces}")
            try:
                geom = decode_offsets(OffsetEncoding(explicit, np.array(offs, dtype=float)), mc.degree, cls)
            except BezmapError as e:
                raise ParseError(path, str(e)) from None
        else:
            raise ParseError(f"{path}.kind", f"unknown instance kind {kind!r}")
        instances.append(MapInstance(cls, geom, score, scene, source))
    return VectorMap(tuple(instances), tuple(taxonomy), grid)


def read_map(path) -> VectorMap:
    with open(path, encoding="utf-8") as f:
        return parse_map(f.read())


def save_map(doc: VectorMap, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_map(doc))


def write_pgm(mask) -> str:
    """Plain (P2) PGM with maxval 255; values in [0, 1] are scaled and rounded."""
    m = np.asarray(mask, dtype=float)
    if m.ndim != 2:
        raise BezmapError("PGM export needs a 2D mask")
    v = np.rint(np.clip(m, 0.0, 1.0) * 255).astype(int)
    lines = ["P2", f"{m.shape[1]} {m.shape[0]}", "255"]
    lines += [" ".join(map(str, row)) for row in v]
    return "\n".join(lines) + "\n"


def read_pgm(text: str) -> np.ndarray:
    tokens = [t for line in text.splitlines() for t in line.split("#")[0].split()]
    if not tokens or tokens[0] != "P2":
        raise ParseError("$", "not a plain PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    vals = np.array(tokens[4:4 + w * h], dtype=float)
    if vals.size != w * h:
        raise ParseError("$", "truncated PGM")
    return vals.reshape(h, w) / maxval


def parse_camera(text: str):
    """Camera from JSON ``{"K": 3x3, "T": 4x4 world-to-camera, "A": 3x3 (optional)}``."""
    from .geometry import CameraModel

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("$", f"invalid JSON: {e}") from None
    try:
        return CameraModel(_get(raw, "K", "$"), _get(raw, "T", "$"), raw.get("A"))
    except ParseError:
        raise
    except (BezmapError, TypeError) as e:
        raise ParseError("$", str(e)) from None
