"""Deterministic binary silhouette rendering from 20 dodecahedral viewpoints.

Orthographic cameras on the vertices of a regular dodecahedron, fixed square
frustum [-1.05, 1.05]^2 (unit sphere plus 5% margin).  Coverage is pixel-center
point-in-triangle with an inclusive top-left edge rule; no antialiasing, no
depth: the output is a binary occupancy mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .geometry import Mesh

#: Half-extent of the square orthographic frustum in camera coordinates.
FRUSTUM = 1.05

DEFAULT_RESOLUTION = 256

N_VIEWS = 20


@dataclass(frozen=True)
class Viewpoint:
    view_direction: np.ndarray
    up: np.ndarray
    index: int

    def __post_init__(self):
        d = np.asarray(self.view_direction, dtype=np.float64)
        u = np.asarray(self.up, dtype=np.float64)
        d.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "view_direction", d)
        object.__setattr__(self, "up", u)
        assert abs(np.linalg.norm(d) - 1.0) < 1e-12
        assert abs(np.linalg.norm(u) - 1.0) < 1e-12
        assert abs(float(d @ u)) < 1e-12

    @property
    def right(self) -> np.ndarray:
        return np.cross(self.up, self.view_direction)


@dataclass(frozen=True)
class SilhouetteImage:
    """Binary occupancy image, row 0 at the top."""

    bits: np.ndarray  # (H, W) bool

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.bits, dtype=bool))
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def to_pgm(self) -> bytes:
        """P5 PGM bytes, foreground 255 on background 0."""
        header = f"P5\n{self.width} {self.height}\n255\n".encode()
        return header + (self.bits.astype(np.uint8) * 255).tobytes()


def _up_vector(d: np.ndarray) -> np.ndarray:
    ref = np.array([0.0, 0.0, 1.0])
    if abs(float(d @ ref)) > 0.999:
        ref = np.array([0.0, 1.0, 0.0])
    side = np.cross(ref, d)
    side /= np.linalg.norm(side)
    # rotate `side` by +90 degrees about d; for side ⟂ d this is d × side
    up = np.cross(d, side)
    return up / np.linalg.norm(up)


def dodecahedron_viewpoints() -> list[Viewpoint]:
    """The 20 unit vertex directions of a regular dodecahedron, fixed order.

    Vertex set {(±1,±1,±1), (0,±1/φ,±φ), (±1/φ,±φ,0), (±φ,0,±1/φ)} with φ the
    golden ratio, listed in that order with sign triples in lexicographic
    (-,+) order, then normalized.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    inv = 1.0 / phi
    raw = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                raw.append((sx, sy, sz))
    for sy in (-1.0, 1.0):
        for sz in (-1.0, 1.0):
            raw.append((0.0, sy * inv, sz * phi))
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            raw.append((sx * inv, sy * phi, 0.0))
    for sx in (-1.0, 1.0):
        for sz in (-1.0, 1.0):
            raw.append((sx * phi, 0.0, sz * inv))
    views = []
    for i, p in enumerate(raw):
        d = np.asarray(p) / np.linalg.norm(p)
        views.append(Viewpoint(d, _up_vector(d), i))
    return views


def _is_top_left(ax, ay, bx, by) -> bool:
    # screen coordinates, y growing downward, triangles wound clockwise on
    # screen: a top edge runs in +x, a left edge runs in -y
    return (ay == by and bx > ax) or (by < ay)


def render_silhouette(
    part: Mesh, vp: Viewpoint, resolution: int = DEFAULT_RESOLUTION
) -> SilhouetteImage:
    """Orthographic binary silhouette of `part` from viewpoint `vp`.

    The mesh must already carry the whole-object normalization so it fits the
    frustum.  An empty mesh renders to the all-zero image.
    """
    if resolution < 8:
        raise ResolutionError(f"resolution {resolution} < 8")
    bits = np.zeros((resolution, resolution), dtype=bool)
    if part.is_empty():
        return SilhouetteImage(bits)

    cam_x = part.vertices @ vp.right
    cam_y = part.vertices @ vp.up
    # continuous pixel coordinates with pixel centers at integers, y down
    scale = resolution / (2.0 * FRUSTUM)
    px = (cam_x + FRUSTUM) * scale - 0.5
    py = (FRUSTUM - cam_y) * scale - 0.5

    for tri in part.triangles:
        xs = px[tri]
        ys = py[tri]
        area = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (ys[1] - ys[0]) * (xs[2] - xs[0])
        if area == 0.0:
            continue
        if area < 0.0:
            xs = xs[[0, 2, 1]]
            ys = ys[[0, 2, 1]]
        x0 = max(int(np.ceil(xs.min())), 0)
        x1 = min(int(np.floor(xs.max())), resolution - 1)
        y0 = max(int(np.ceil(ys.min())), 0)
        y1 = min(int(np.floor(ys.max())), resolution - 1)
        if x0 > x1 or y0 > y1:
            continue
        gx, gy = np.meshgrid(
            np.arange(x0, x1 + 1, dtype=np.float64),
            np.arange(y0, y1 + 1, dtype=np.float64),
        )
        inside = np.ones(gx.shape, dtype=bool)
        for a, b in ((0, 1), (1, 2), (2, 0)):
            w = (xs[b] - xs[a]) * (gy - ys[a]) - (ys[b] - ys[a]) * (gx - xs[a])
            if _is_top_left(xs[a], ys[a], xs[b], ys[b]):
                inside &= w >= 0.0
            else:
                inside &= w > 0.0
        bits[y0 : y1 + 1, x0 : x1 + 1] |= inside
    return SilhouetteImage(bits)


def render_all(
    parts: dict, resolution: int = DEFAULT_RESOLUTION, viewpoints=None
) -> dict:
    """Render every part from all 20 viewpoints; values are lists in view order."""
    if viewpoints is None:
        viewpoints = dodecahedron_viewpoints()
    return {
        label: [render_silhouette(mesh, vp, resolution) for vp in viewpoints]
        for label, mesh in parts.items()
    }
