"""
Training losses on piecewise Bezier curves
==========================================

Point, curve and region terms between a prediction and its matched
ground truth, and the matching itself.
"""

import numpy as np

from bezmap import PiecewiseBezier, default_grid, rasterize, MapInstance, VectorMap
from bezmap.losses import (
    DilationSpec, LossWeights, curve_match_cost, grad_l_curve, hungarian_match, l_curve, l_point,
    l_region, pcr_loss,
)

gt = PiecewiseBezier.from_controls([[0, 0], [4, 3], [8, 0], [12, -3], [16, 0]], 2)
pred = PiecewiseBezier.from_controls(gt.controls + [[0, 0], [0.5, 0], [0, 0.4], [0, 0], [0, 0.2]], 2)

lp = l_point(pred, gt)
lc = l_curve(pred, gt)
print(round(lp, 4), round(lc, 4))

# the curve gradient is chained through the fixed restore matrix
print(grad_l_curve(pred, gt).round(4))

# region term: both masks read along the dilated predicted curve
grid = default_grid()
spec = DilationSpec(2)
pm = rasterize(VectorMap((MapInstance(0, pred),)), spec=spec)[0]
gm = rasterize(VectorMap((MapInstance(0, gt),)), spec=spec)[0]
lr = l_region(pm, gm, pred, spec, grid)
print(round(lr, 4))

w = LossWeights()
print(round(pcr_loss((lp, lc, lr), w), 4))

# one-to-one matching on point-loss costs; other classes cost a fixed penalty
preds = [(0, pred), (0, gt)]
gts = [(0, gt), (1, gt)]
cost = curve_match_cost(preds, gts, w)
print(cost.round(3))
print(hungarian_match(cost))
