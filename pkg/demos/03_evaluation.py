"""
Chamfer distance and instance AP
================================

How predictions are scored against ground-truth map elements.
"""

import numpy as np

from bezmap import MapInstance, VectorMap, chamfer_distance, evaluate_map
from bezmap.metrics import instance_ap

line = lambda y, n=100: np.column_stack([np.linspace(0, 10, n), np.full(n, y)])  # noqa: E731

# parallel lines 0.3 m apart
print(chamfer_distance(line(0.0), line(0.3)))

# one prediction, one ground truth: a hit or a miss depending on the threshold
for tau in (0.2, 0.5, 1.0):
    print(tau, instance_ap([(line(0.3), 0.9)], [line(0.0)], tau))

# a false positive ranked above a hit halves the AP
print(instance_ap([(line(8.0), 0.9), (line(0.0), 0.8)], [line(0.0)], 0.5))

# maps: matching stays inside each class and scene
gt = VectorMap((MapInstance(0, line(0.0), scene=0), MapInstance(2, line(5.0), scene=1)))
pred = VectorMap((
    MapInstance(0, line(0.1), 0.9, scene=0),
    MapInstance(2, line(5.0), 0.8, scene=0),  # right shape, wrong scene
))
report = evaluate_map(pred, gt)
print(report.to_dict()["ap"])
print(report.mAP, report.empty_classes)
