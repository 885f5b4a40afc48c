#!/usr/bin/env python3
"""Regenerates the sample OBJs in this directory."""

import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def grid(nx, ny, corner, fn):
    x0, y0, w, h = corner
    verts, uvs = [], []
    for j in range(ny + 1):
        for i in range(nx + 1):
            x = x0 + w * i / nx
            y = y0 + h * j / ny
            verts.append(fn(x, y))
            uvs.append(None)
    faces = []
    at = lambda i, j: j * (nx + 1) + i
    for j in range(ny):
        for i in range(nx):
            faces.append((at(i, j), at(i + 1, j), at(i + 1, j + 1)))
            faces.append((at(i, j), at(i + 1, j + 1), at(i, j + 1)))
    return verts, faces


def write(name, verts, faces, uv_fn):
    path = os.path.join(HERE, name)
    with open(path, "w") as f:
        for v in verts:
            f.write("v %.17g %.17g %.17g\n" % v)
        for v in verts:
            f.write("vt %.17g %.17g\n" % uv_fn(v))
        for a, b, c in faces:
            f.write("f %d/%d %d/%d %d/%d\n" % (a + 1, a + 1, b + 1, b + 1, c + 1, c + 1))
    print("wrote", path)


# planar grid on [1,2]x[0.5,1.5] mapped by the conformal z^2
verts, faces = grid(8, 8, (1.0, 0.5, 1.0, 1.0), lambda x, y: (x, y, 0.0))
write("square_z2.obj", verts, faces, lambda v: (v[0] * v[0] - v[1] * v[1], 2.0 * v[0] * v[1]))

# planar grid under the anisotropic stretch (x,y) -> (2x, y); far from
# conformal, the projective baseline is discontinuous on it
verts, faces = grid(6, 4, (0.0, 0.0, 1.5, 1.0), lambda x, y: (x, y, 0.0))
write("stretch.obj", verts, faces, lambda v: (2.0 * v[0], v[1]))

# bumpy surface with the (x, y) projection as its vertex map
verts, faces = grid(
    8, 8, (0.0, 0.0, 1.0, 1.0),
    lambda x, y: (x, y, 0.3 * math.sin(math.pi * x) * math.sin(math.pi * y)))
write("bump.obj", verts, faces, lambda v: (v[0], v[1]))

# developable cylinder sector with its exact isometric unrolling
R, ARC, H = 1.0, 1.8, 1.2
verts, faces = grid(
    8, 6, (0.0, 0.0, 1.0, 1.0),
    lambda s, t: (R * math.sin(ARC * s), H * t, R * math.cos(ARC * s)))
write("cylinder.obj", verts, faces,
      lambda v: (R * math.atan2(v[0], v[2]), v[1]))
