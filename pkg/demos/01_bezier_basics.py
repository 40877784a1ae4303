"""
Bezier segments and piecewise curves
====================================

Evaluating, fitting and re-encoding Bezier curves with plain arrays.
"""

import numpy as np

from bezmap import (
    BezierSegment, PiecewiseBezier, bernstein_matrix, decode_offsets, degree_elevate,
    encode_offsets, eval_bezier, fit_segment, restore_curve,
)

# a cubic segment, evaluated at a few parameters
seg = BezierSegment([[0, 0], [3, 4], [7, -2], [10, 1]])
print(eval_bezier(seg, np.array([0.0, 0.5, 1.0])))

# sampling is a matrix product with the Bernstein matrix
B = bernstein_matrix(3, 100).forward
samples = B @ seg.controls
print(B.shape, np.allclose(B.sum(axis=1), 1.0))

# least-squares fitting recovers the controls from exact samples
print(np.abs(fit_segment(samples, 3).controls - seg.controls).max())

# degree elevation adds a control point but keeps the shape
up = degree_elevate(seg)
t = np.linspace(0, 1, 50)
print(up.degree, np.abs(eval_bezier(up, t) - eval_bezier(seg, t)).max())

# a <2, 3> piecewise curve: 7 controls, 3 of them on the curve
pb = PiecewiseBezier.from_controls([[0, 0], [2, 3], [4, 3], [6, 0], [8, -3], [10, -3], [12, 0]], 3)
print(pb.pieces, len(pb.controls), pb.explicit_points.tolist())

# implicit points stored as offsets from their segment's midpoint
enc = encode_offsets(pb)
print(enc.offsets)
print(np.allclose(decode_offsets(enc, 3).controls, pb.controls))

# restoring samples each segment and keeps every joint once
print(restore_curve(pb, 10).shape)
