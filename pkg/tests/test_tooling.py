import json

import numpy as np
import pytest

from bezmap import io
from bezmap.bezier import PiecewiseBezier
from bezmap.errors import ParseError, SchemaVersionError
from bezmap.gengt import gen_gt_map
from bezmap.mapmodel import MapInstance, VectorMap, default_grid
from bezmap.polyline import Polyline
from bezmap.raster import instance_cells, rasterize
from bezmap.render import render_svg
from bezmap.stats import reduction_ratio, stats
from bezmap.synth import CorpusSpec, synth_corpus, trace_path


def small_map():
    pb = PiecewiseBezier.from_controls([[0.1, 0.2], [1.3, 2.7], [2.0, 0.1], [3.3, -1.0], [4.0, 0.0]], 2)
    return VectorMap((
        MapInstance(0, pb, 0.75, 3, 1),
        MapInstance(1, [[0, 0], [2.5, 0.125]], 1.0, 0),
    ))


# io

def test_io_round_trip():
    doc = small_map()
    text = io.write_map(doc)
    back = io.parse_map(text)
    assert io.write_map(back) == text
    assert back.instances[0].geometry == doc.instances[0].geometry
    assert back.instances[0].score == 0.75 and back.instances[0].scene == 3 and back.instances[0].source == 1
    assert back.instances[1].geometry == doc.instances[1].geometry


def test_io_synth_round_trip_bit_exact(tmp_path):
    gt, _ = gen_gt_map(synth_corpus(CorpusSpec(seed=3, per_class=10)))
    path = tmp_path / "gt.json"
    io.save_map(gt, path)
    assert io.write_map(io.read_map(path)) == path.read_text()


def _doc(**changes):
    d = json.loads(io.write_map(small_map()))
    for path, value in changes.items():
        node = d
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[int(k)] if k.isdigit() else node[k]
        last = keys[-1]
        if value is KeyError:
            del node[int(last) if last.isdigit() else last]
        else:
            node[int(last) if last.isdigit() else last] = value
    return json.dumps(d)


@pytest.mark.parametrize("changes,where", [
    ({"instances__0__class": 9}, "$.instances[0].class"),
    ({"instances__1__points": [[0, 0]]}, "$.instances[1].points"),
    ({"instances__0__offsets": [[[0, 0]]]}, "$.instances[0].offsets"),
    ({"instances__0__offsets__1": [[0, 0], [1, 1]]}, "$.instances[0].offsets[1]"),
    ({"instances__0__kind": "spline"}, "$.instances[0].kind"),
    ({"instances__1__score": "high"}, "$.instances[1].score"),
    ({"grid__resolution": -1}, "$.grid"),
    ({"taxonomy__0__id": 4}, "$.taxonomy"),
])
def test_parse_errors_name_the_field(changes, where):
    with pytest.raises(ParseError) as e:
        io.parse_map(_doc(**changes))
    assert str(e.value).startswith(where)


def test_parse_too_many_pieces():
    d = json.loads(_doc())
    d["taxonomy"][0]["max_pieces"] = 1
    with pytest.raises(ParseError, match="exceed"):
        io.parse_map(json.dumps(d))


def test_parse_schema_and_json():
    with pytest.raises(SchemaVersionError):
        io.parse_map(_doc(schema="bezmap/2"))
    with pytest.raises(ParseError):
        io.parse_map("{not json")
    with pytest.raises(ParseError):
        io.parse_map("[]")


def test_dumps_rejects_nan():
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})


def test_pgm_round_trip():
    m = np.zeros((3, 4))
    m[1, 2] = 1.0
    text = io.write_pgm(m)
    assert text.startswith("P2\n4 3\n255\n")
    np.testing.assert_array_equal(io.read_pgm(text), m)


def test_parse_camera():
    cam = io.parse_camera(json.dumps({"K": np.eye(3).tolist(), "T": np.eye(4).tolist()}))
    np.testing.assert_array_equal(cam.A, np.eye(3))
    with pytest.raises(ParseError):
        io.parse_camera(json.dumps({"K": np.zeros((3, 3)).tolist(), "T": np.eye(4).tolist()}))


# raster

def test_raster_single_cell_dilation():
    grid = default_grid()
    tiny = Polyline([[0, 0], [0.01, 0]])
    assert len(instance_cells(tiny, grid, 0)) == 1
    cells = instance_cells(tiny, grid, 1)
    assert len(cells) == 9
    assert cells.min(0).tolist() == [99, 199] and cells.max(0).tolist() == [101, 201]


def test_raster_channels_and_clipping():
    vm = VectorMap((MapInstance(2, [[-29.99, 0], [-29.99, 1]]), MapInstance(0, [[0, 0], [5, 0]])))
    m = rasterize(vm, spec=2)
    assert m.shape == (3, 200, 400)
    assert m[1].sum() == 0
    assert m[2, :, 0].sum() > 0 and m[2, :, 5:].sum() == 0
    # a straight 5 m run along a row: 34 columns by 5 rows
    assert m[0].sum() == (round(5 / 0.15) + 1 + 4) * 5


# synth

def test_synth_deterministic():
    a = io.write_map(synth_corpus(CorpusSpec(seed=5, per_class=20)))
    b = io.write_map(synth_corpus(CorpusSpec(seed=5, per_class=20)))
    c = io.write_map(synth_corpus(CorpusSpec(seed=6, per_class=20)))
    assert a == b and a != c


def test_synth_in_range_and_counts():
    vm = synth_corpus(CorpusSpec(seed=1, per_class=23, per_scene=5))
    for cls in vm.taxonomy:
        assert len(vm.of_class(cls.id)) == 23
    assert max(x.scene for x in vm.instances) == 4
    for x in vm.instances:
        assert vm.grid.contains(x.geometry.points).all()
    spans = [len(x.geometry) for x in vm.of_class(1)]
    assert min(spans) >= 2 and max(spans) <= 4


def test_trace_path_arc():
    # quarter circle of radius 10: ends at (10, 10), every vertex on the circle
    pts = trace_path([(np.pi * 5, 0.1)], 0.5)
    np.testing.assert_allclose(pts[-1], [10, 10], atol=1e-9)
    np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1] - 10), 10, atol=1e-9)


# stats

def test_reduction_ratio():
    assert reduction_ratio(100, 3, 7) == pytest.approx(0.78)
    assert reduction_ratio(4, 1, 3) == 0.0


def test_stats_on_boundary():
    pts = trace_path([(10, 0.0), (np.pi * 5, 0.1), (10, 0.0), (np.pi * 5, -0.1), (12, 0.0)], 0.5)
    pts = pts[np.linspace(0, len(pts) - 1, 100).round().astype(int)]
    ann = VectorMap((MapInstance(2, pts - pts.mean(0)),))
    gt, fails = gen_gt_map(ann)
    assert fails == {}
    s = stats(ann, gt)["road-boundary"]
    k = gt.instances[0].geometry.pieces
    assert s["control_points"] == 3 * k + 1 <= 22
    assert s["annotation_points"] == 100
    assert s["reduction_min"] >= 0.78
    assert s["pieces"] == {str(k): 1}


def test_stats_skips_mismatched():
    ann = VectorMap((MapInstance(0, [[0, 0], [1, 0]]),))
    gt = VectorMap((MapInstance(1, PiecewiseBezier.from_controls([[0, 0], [1, 0]], 1), source=0),))
    assert stats(ann, gt)["ped-crossing"]["skipped"] == 1


# render

def test_render_controls():
    pb = PiecewiseBezier.from_controls([[0, 0], [1, 2], [2, 0], [3, -2], [4, 0], [5, 2], [6, 0]], 2)
    assert pb.pieces == 3
    svg = render_svg(VectorMap((MapInstance(0, pb),)), controls=True)
    assert svg.count("<circle") == 7
    assert svg.count("<path") == 1 and svg.count(" Q ") == 3


def test_render_gt_and_high_degree():
    pb = PiecewiseBezier.from_controls(np.column_stack([np.arange(5.0), np.zeros(5)]), 4)
    svg = render_svg(VectorMap((MapInstance(0, pb),)), gt=VectorMap((MapInstance(0, [[0, 0], [4, 0]]),)))
    assert 'id="gt"' in svg and "stroke-dasharray" in svg
    assert " C " not in svg and svg.count("<path") == 2
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
