import numpy as np
import pytest

from bezmap.bezier import PiecewiseBezier, bernstein_matrix, restore_curve
from bezmap.errors import CapacityError, ConfigurationError, DegenerateError, ToleranceError
from bezmap.gengt import GenGtConfig, curve_interpolate, fit_error, fit_span, gen_gt, verify_corpus
from bezmap.mapmodel import default_taxonomy
from bezmap.polyline import Polyline
from bezmap.synth import CorpusSpec, synth_corpus


def l_shape(step=0.01):
    a = np.column_stack([np.arange(0, 1, step), np.zeros(int(round(1 / step)))])
    b = np.column_stack([np.ones(int(round(1 / step)) + 1), np.linspace(0, 1, int(round(1 / step)) + 1)])
    return np.vstack([a, b])


# curve_interpolate

def test_interpolate_straight():
    np.testing.assert_allclose(curve_interpolate([[0, 0], [1, 0]], 0, 1, 3), [[0, 0], [0.5, 0], [1, 0]])


def test_interpolate_identity_on_even_spacing():
    p = np.column_stack([np.arange(6.0), np.zeros(6)])
    np.testing.assert_allclose(curve_interpolate(p, 1, 4, 4), p[1:5], atol=1e-15)


def test_interpolate_l_shape():
    out = curve_interpolate([[0, 0], [1, 0], [1, 1]], 0, 2, 5)
    np.testing.assert_allclose(out, [[0, 0], [0.5, 0], [1, 0], [1, 0.5], [1, 1]], atol=1e-15)


def test_interpolate_endpoints_exact():
    rng = np.random.default_rng(0)
    p = rng.normal(size=(20, 2))
    out = curve_interpolate(p, 3, 11, 100)
    assert np.array_equal(out[0], p[3]) and np.array_equal(out[-1], p[11])


def test_interpolate_degenerate():
    with pytest.raises(DegenerateError):
        curve_interpolate([[0, 0], [0, 0], [1, 1]], 0, 1, 10)


# fit_error

def test_fit_error_identical():
    p = np.random.default_rng(1).normal(size=(30, 2))
    assert fit_error(p, p) == 0.0


def test_fit_error_single_points():
    assert fit_error([[0, 0]], [[3, 4]]) == pytest.approx(5.0)


def test_fit_error_symmetric():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=(17, 2)), rng.normal(size=(40, 2))
    assert fit_error(a, b) == pytest.approx(fit_error(b, a), abs=1e-15)


# fit_span

def test_fit_span_recovers_exact_curve():
    rng = np.random.default_rng(3)
    c = rng.uniform(-5, 5, (4, 2))
    P = bernstein_matrix(3, 100).forward @ c
    ctrl, restored = fit_span(P[None], 3)
    np.testing.assert_allclose(ctrl[0], c, atol=1e-9)
    np.testing.assert_allclose(restored[0], P, atol=1e-9)


# gen_gt

def test_gen_gt_single_cubic_index_parameterization():
    c = np.array([[0.0, 0.0], [3.0, 4.0], [7.0, -2.0], [10.0, 1.0]])
    P = bernstein_matrix(3, 100).forward @ c
    pb = gen_gt(P, GenGtConfig(3, 100, 0.1, 7, parameterization="index"))
    assert pb.pieces == 1
    np.testing.assert_allclose(pb.controls, c, atol=1e-4)


def test_gen_gt_single_cubic_arclength():
    c = np.array([[0.0, 0.0], [3.0, 4.0], [7.0, -2.0], [10.0, 1.0]])
    P = bernstein_matrix(3, 100).forward @ c
    pb = gen_gt(P, GenGtConfig(3, 100, 0.1, 7))
    assert pb.pieces == 1
    dense = bernstein_matrix(3, 2000).forward @ c
    assert fit_error(restore_curve(pb, 2000), dense) < 0.1


def test_gen_gt_chord():
    pb = gen_gt([[1, 1], [4, 5]], GenGtConfig(1, 100, 0.1, 1))
    np.testing.assert_allclose(pb.controls, [[1, 1], [4, 5]])


def test_gen_gt_right_angle():
    # 5 cm vertex spacing: one vertex past the corner already breaks 1 cm
    p = l_shape(0.05)
    cfg = GenGtConfig(1, 100, 0.01, 5)
    # one straight piece over the whole corner is not good enough
    whole = curve_interpolate(p, 0, len(p) - 1, 100)
    line = np.linspace(p[0], p[-1], 100)
    assert fit_error(whole, line) >= 0.01
    pb = gen_gt(p, cfg)
    assert pb.pieces == 2
    np.testing.assert_allclose(pb.explicit_points[1], [1, 0])


def test_gen_gt_capacity():
    zigzag = [[0, 0], [1, 1], [2, 0], [3, 1], [4, 0]]
    with pytest.raises(CapacityError):
        gen_gt(zigzag, GenGtConfig(1, 100, 0.01, 2))


def test_gen_gt_tolerance_error():
    # a bent pair of edges cannot be fitted below a sub-rounding tolerance
    with pytest.raises(ToleranceError):
        gen_gt([[0, 0], [1e6, 1], [2e6, 0]], GenGtConfig(1, 100, 1e-300, 5))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        GenGtConfig(3, 3, 0.1, 1)
    with pytest.raises(ConfigurationError):
        GenGtConfig(2, 100, 0.0, 1)
    with pytest.raises(ConfigurationError):
        GenGtConfig(2, 100, 0.1, 0)


@pytest.fixture(scope="module")
def corpus():
    return synth_corpus(CorpusSpec(seed=11, per_class=40))


def _recheck(pts, pb, cfg):
    """Independent re-evaluation of each accepted piece, plus the span one vertex longer."""
    ex = pb.explicit_points
    idx = [int(np.nonzero(np.all(pts == e, axis=1))[0][0]) for e in ex]
    for j, seg in enumerate(pb.segments):
        s, e = idx[j], idx[j + 1]
        dagger = curve_interpolate(pts, s, e, cfg.samples)
        ddagger = bernstein_matrix(cfg.degree, cfg.samples).forward @ seg.controls
        assert fit_error(dagger, ddagger) < cfg.tolerance
        if e < len(pts) - 1:
            longer = curve_interpolate(pts, s, e + 1, cfg.samples)
            _, restored = fit_span(longer[None], cfg.degree)
            assert fit_error(longer, restored[0]) >= cfg.tolerance


def test_invariants_on_corpus(corpus):
    for inst in corpus.instances:
        cfg = corpus.taxonomy[inst.class_id].config
        pts = inst.geometry.points
        pb = gen_gt(inst.geometry, cfg)
        assert np.array_equal(pb.explicit_points[0], pts[0])
        assert np.array_equal(pb.explicit_points[-1], pts[-1])
        assert len(pb.controls) == cfg.degree * pb.pieces + 1
        _recheck(pts, pb, cfg)


def test_monotone_in_tolerance(corpus):
    for inst in corpus.of_class(2)[:20]:
        ks = []
        for eps in (0.2, 0.1, 0.05, 0.02):
            ks.append(gen_gt(inst.geometry, GenGtConfig(3, 100, eps, 50)).pieces)
        assert ks == sorted(ks)


def test_compactness_independent_of_density(corpus):
    cfg = GenGtConfig(3, 100, 0.1, 7)
    for inst in corpus.of_class(2)[:10]:
        for num in (60, 100, 300):
            dense = Polyline(np.array([np.interp(np.linspace(0, 1, num), np.linspace(0, 1, len(inst.geometry)), inst.geometry.points[:, d]) for d in (0, 1)]).T)
            pb = gen_gt(dense, cfg)
            assert len(pb.controls) == 3 * pb.pieces + 1


# verify_corpus

def test_verify_exact_curves():
    rng = np.random.default_rng(12)
    items = []
    for cls, (k, n) in enumerate([(3, 2), (1, 1), (7, 3)]):
        for _ in range(5):
            # exact <k, n> curve with widely spaced joints, densely sampled
            ex = np.cumsum(rng.uniform(2, 4, (k + 1, 2)), axis=0) - 10
            ctrl = []
            for j in range(k):
                ctrl.append(ex[j])
                for i in range(1, n):
                    ctrl.append(ex[j] + (ex[j + 1] - ex[j]) * i / n + rng.uniform(-0.5, 0.5, 2))
            ctrl.append(ex[-1])
            pb = PiecewiseBezier.from_controls(np.array(ctrl), n)
            items.append((restore_curve(pb, 50), cls))
    report = verify_corpus(items, thresholds=[0.2, 0.5, 1.0])
    assert report.failures == {}
    for name, v in report.ap.items():
        assert all(x == 1.0 for x in v.values()), name


def test_verify_capacity_failures_count_as_misses():
    zig = [[0, 0], [1, 1], [2, 0], [3, 1], [4, 0]]
    items = [(zig, 1), ([[0, 0], [5, 0]], 0)]
    tax = default_taxonomy()
    report = verify_corpus(items, taxonomy=tax, thresholds=[0.2])
    assert report.failures == {"ped-crossing": 1}
    assert report.ap["ped-crossing"][0.2] == 0.0
    assert report.ap["lane-divider"][0.2] == 1.0
