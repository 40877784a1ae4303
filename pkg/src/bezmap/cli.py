"""Command line pipeline: synth -> gengt -> restore/eval/verify/stats/render/losses.

Exit status is 0 on success, 1 on invalid input files or values and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .bezier import PiecewiseBezier, restore_curve
from .errors import BezmapError, ConfigurationError
from .gengt import GenGtConfig, gen_gt_map, verify_corpus
from .losses import (
    DilationSpec, LossWeights, curve_match_cost, grad_l_curve, grad_l_point,
    hungarian_match, l_curve, l_point, l_region, pcr_loss,
)
from .mapmodel import MapClass, MapInstance, VectorMap
from .metrics import DEFAULT_THRESHOLDS, evaluate_map
from .polyline import Polyline
from .raster import rasterize
from .render import render_svg
from .stats import stats
from .synth import CorpusSpec, synth_corpus


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("no values given")
    return vals


def _class_overrides(text: str) -> dict:
    """``name=KxN,...`` -> {name: (k, n)}."""
    out = {}
    for item in text.split(","):
        try:
            name, spec = item.split("=")
            k, n = spec.lower().split("x")
            out[name.strip()] = (int(k), int(n))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad class spec {item!r}, expected name=KxN") from None
    return out


def _taxonomy(base, args) -> tuple:
    """Apply --classes / --epsilon / --samples overrides to a taxonomy."""
    over = getattr(args, "classes", None) or {}
    unknown = set(over) - {c.name for c in base}
    if unknown:
        raise ConfigurationError(f"unknown classes in --classes: {sorted(unknown)}")
    out = []
    for c in base:
        k, n = over.get(c.name, (c.config.max_pieces, c.config.degree))
        eps = args.epsilon if getattr(args, "epsilon", None) is not None else c.config.tolerance
        m = args.samples if getattr(args, "samples", None) is not None else c.config.samples
        out.append(MapClass(c.id, c.name, GenGtConfig(n, m, eps, k)))
    return tuple(out)


def _with_taxonomy(vmap, taxonomy):
    return VectorMap(vmap.instances, taxonomy, vmap.grid)


def cmd_synth(args):
    doc = synth_corpus(CorpusSpec(seed=args.seed, per_class=args.per_class, per_scene=args.per_scene))
    _emit(io.write_map(doc), args.out)


def cmd_gengt(args):
    annot = io.read_map(args.input)
    annot = _with_taxonomy(annot, _taxonomy(annot.taxonomy, args))
    gt, failures = gen_gt_map(annot)
    for name, n in failures.items():
        print(f"warning: {n} {name} instance(s) could not be converted", file=sys.stderr)
    _emit(io.write_map(gt), args.out)


def cmd_restore(args):
    doc = io.read_map(args.input)
    out = []
    for inst in doc.instances:
        g = inst.geometry
        if isinstance(g, PiecewiseBezier):
            g = Polyline(restore_curve(g, args.samples))
        out.append(MapInstance(inst.class_id, g, inst.score, inst.scene, inst.source))
    _emit(io.write_map(VectorMap(tuple(out), doc.taxonomy, doc.grid)), args.out)


def cmd_eval(args):
    report = evaluate_map(io.read_map(args.pred), io.read_map(args.gt), args.thresholds)
    _emit(io.dumps(report.to_dict()), args.out)


def cmd_verify(args):
    annot = io.read_map(args.input)
    tax = _taxonomy(annot.taxonomy, args)
    annot = _with_taxonomy(annot, tax)
    thresholds = args.thresholds or ((args.threshold,) if args.threshold is not None else DEFAULT_THRESHOLDS)
    if args.gt:
        gt = io.read_map(args.gt)
        pred = VectorMap(gt.instances, annot.taxonomy, annot.grid)
        report = evaluate_map(pred, annot, thresholds)
    else:
        report = verify_corpus(annot, thresholds=thresholds)
    _emit(io.dumps(report.to_dict()), args.out)


def cmd_stats(args):
    _emit(io.dumps(stats(io.read_map(args.annotation), io.read_map(args.gt))), args.out)


def cmd_render(args):
    doc = io.read_map(args.input)
    gt = io.read_map(args.gt) if args.gt else None
    _emit(render_svg(doc, gt, controls=args.controls), args.out)


def cmd_raster(args):
    doc = io.read_map(args.input)
    masks = rasterize(doc, spec=DilationSpec(args.omega))
    for c, mask in zip(doc.taxonomy, masks):
        with open(f"{args.out}{c.name}.pgm", "w", encoding="ascii", newline="\n") as f:
            f.write(io.write_pgm(mask))


def _fd_grad(fn, x, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (fn(xp) - fn(xm)) / (2 * h)
    return g


def _rel_err(a, b) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def cmd_losses(args):
    pred = io.read_map(args.pred)
    gt = io.read_map(args.gt)
    if [(c.id, c.name) for c in pred.taxonomy] != [(c.id, c.name) for c in gt.taxonomy]:
        raise ConfigurationError("prediction and ground truth use different taxonomies")
    w = LossWeights()
    spec = DilationSpec(args.omega)
    pmask = rasterize(pred, spec=spec)
    gmask = rasterize(gt, spec=spec)
    pairs = []
    scenes = sorted({x.scene for x in pred.instances} | {x.scene for x in gt.instances})
    for sc in scenes:
        P = [x for x in pred.instances if x.scene == sc and isinstance(x.geometry, PiecewiseBezier)]
        G = [x for x in gt.instances if x.scene == sc and isinstance(x.geometry, PiecewiseBezier)]
        cost = curve_match_cost([(x.class_id, x.geometry) for x in P], [(x.class_id, x.geometry) for x in G], w)
        for i, j in hungarian_match(cost):
            p, g = P[i], G[j]
            if p.class_id != g.class_id or p.geometry.controls.shape != g.geometry.controls.shape:
                continue
            lp = l_point(p.geometry, g.geometry)
            lc = l_curve(p.geometry, g.geometry, args.samples)
            lr = l_region(pmask[p.class_id], gmask[g.class_id], p.geometry, spec, pred.grid)
            row = {"scene": sc, "class": pred.taxonomy[p.class_id].name,
                   "point": lp, "curve": lc, "region": lr, "pcr": pcr_loss((lp, lc, lr), w)}
            if args.grad_check:
                pc = p.geometry.controls
                n = p.geometry.degree
                fd_p = _fd_grad(lambda c: l_point(c, g.geometry.controls), pc.copy())
                fd_c = _fd_grad(
                    lambda c: l_curve(PiecewiseBezier.from_controls(c, n), g.geometry, args.samples), pc.copy()
                )
                row["grad_point_rel_err"] = _rel_err(grad_l_point(pc, g.geometry.controls), fd_p)
                row["grad_curve_rel_err"] = _rel_err(grad_l_curve(p.geometry, g.geometry, args.samples), fd_c)
            pairs.append(row)
    mean = {k: float(np.mean([r[k] for r in pairs])) if pairs else 0.0
            for k in ("point", "curve", "region", "pcr")}
    report = {"weights": vars(w), "omega": spec.omega, "matched": len(pairs),
              "unmatched_pred": len(pred.instances) - len(pairs),
              "unmatched_gt": len(gt.instances) - len(pairs), "mean": mean, "pairs": pairs}
    _emit(io.dumps(report), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bezmap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def gen_flags(sp):
        sp.add_argument("--classes", type=_class_overrides, help="per-class pieces/degree, e.g. road-boundary=7x3")
        sp.add_argument("--epsilon", type=float, help="fit tolerance in metres")
        sp.add_argument("--samples", type=int, help="resample length m")

    s = sub.add_parser("synth", help="generate a synthetic annotation document")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--per-class", type=int, default=500)
    s.add_argument("--per-scene", type=int, default=5)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("gengt", help="convert annotations to piecewise Bezier ground truth")
    s.add_argument("input")
    gen_flags(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gengt)

    s = sub.add_parser("restore", help="sample Bezier instances back into polylines")
    s.add_argument("input")
    s.add_argument("--samples", type=int, default=100, help="points per segment")
    s.add_argument("--out")
    s.set_defaults(func=cmd_restore)

    s = sub.add_parser("eval", help="Chamfer AP of predictions against ground truth")
    s.add_argument("pred")
    s.add_argument("gt")
    s.add_argument("--thresholds", type=_floats, default=DEFAULT_THRESHOLDS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("verify", help="reliability of generated ground truth against annotations")
    s.add_argument("input")
    s.add_argument("--gt", help="use this ground-truth document instead of regenerating")
    s.add_argument("--threshold", type=float)
    s.add_argument("--thresholds", type=_floats)
    gen_flags(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="compactness and piece statistics")
    s.add_argument("annotation")
    s.add_argument("gt")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("render", help="draw a document as SVG")
    s.add_argument("input")
    s.add_argument("--gt")
    s.add_argument("--controls", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("raster", help="write per-class PGM masks")
    s.add_argument("input")
    s.add_argument("--omega", type=int, default=0)
    s.add_argument("--out", required=True, help="output path prefix")
    s.set_defaults(func=cmd_raster)

    s = sub.add_parser("losses", help="matched point/curve/region losses between two Bezier documents")
    s.add_argument("pred")
    s.add_argument("gt")
    s.add_argument("--omega", type=int, default=5)
    s.add_argument("--samples", type=int, default=100, help="points per segment for the curve loss")
    s.add_argument("--grad-check", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_losses)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    try:
        args.func(args)
    except (BezmapError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
