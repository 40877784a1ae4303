"""
Cameras, the ground plane and the BEV grid
==========================================

Projecting ground points into a feature map, lifting them back, and
mapping world metres to BEV pixels.
"""

import numpy as np

from bezmap import CameraModel, bev_world_transforms, default_grid, ipm_unproject, look_at, project_to_feature
from bezmap.geometry import sincos_embed

K = np.array([[800.0, 0, 640], [0, 800.0, 360], [0, 0, 1]])
T = look_at(eye=[0, 0, 1.6], target=[10, 0, 0])  # 1.6 m up, pitched down
cam = CameraModel.with_stride(K, T, stride=8)

# a point on the road 12 m ahead and 2 m to the left
(u, v), d = project_to_feature([12, 2, 0], cam)
print(round(u, 3), round(v, 3), round(d, 3))

# and back onto the ground plane
(x, y), d = ipm_unproject((u, v), cam)
print(round(x, 9), round(y, 9))

# a location above the horizon never meets the ground in front
print(ipm_unproject((80, 0), cam)[1] <= 0)

# world metres to (row, col) on the default 200 x 400 grid
tf = bev_world_transforms(default_grid())
print(tf.world_to_pixel([[0, 0], [30, -15], [-30, 15]]))

# positional embedding of BEV coordinates
print(sincos_embed([[0.0, 0.0], [12.0, 2.0]], 8).round(3))
