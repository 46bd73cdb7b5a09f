"""Toy preview renderer.

Projects a procedural scene (a ground-plane point lattice plus the horizon
line) through a session's pinhole camera, giving the steering console
visual feedback about where the camera is and how it moves. Rasterization
is pure integer painting over numpy buffers, so identical poses produce
identical PNG bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..camera import CameraPose
from ..core import Rgba8Image

BACKGROUND = (16, 22, 38, 255)
SKY = (28, 38, 62, 255)
HORIZON = (96, 104, 118, 255)
POINT_COLORS = ((224, 222, 208, 255), (150, 204, 162, 255))


@dataclass(frozen=True)
class ProceduralScene:
    """Point lattice on the ground plane y=0, `extent` units each way from
    the origin at unit spacing."""

    extent: int = 10

    def points(self) -> np.ndarray:
        xs = np.arange(-self.extent, self.extent + 1, dtype=np.float64)
        zs = np.arange(-self.extent, self.extent + 1, dtype=np.float64)
        gx, gz = np.meshgrid(xs, zs, indexing="ij")
        pts = np.stack([gx, np.zeros_like(gx), gz], axis=-1)
        return pts.reshape(-1, 3)


DEFAULT_SCENE = ProceduralScene()


def project_points(
    pose: CameraPose, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pinhole projection of world points: returns (u, v) pixel positions,
    camera depths, and the in-front visibility mask."""
    fx, fy, cx, cy = pose.intrinsics
    rel = points - pose.center[None, :]
    cam = rel @ pose.rotation  # row-vector form of R^T @ rel
    depth = -cam[:, 2]
    visible = depth > 1e-6
    safe = np.where(visible, depth, 1.0)
    u = cx + fx * cam[:, 0] / safe
    v = cy - fy * cam[:, 1] / safe
    return np.stack([u, v], axis=1), depth, visible


def _paint_square(buf: np.ndarray, row: int, col: int, side: int, color) -> None:
    h, w, _ = buf.shape
    half = side // 2
    r0, r1 = max(0, row - half), min(h, row - half + side)
    c0, c1 = max(0, col - half), min(w, col - half + side)
    if r0 < r1 and c0 < c1:
        buf[r0:r1, c0:c1] = color


def render_preview(
    pose: CameraPose,
    scene: ProceduralScene = DEFAULT_SCENE,
    height: int = 64,
    width: int = 64,
) -> Rgba8Image:
    """Deterministic raster of the scene: sky above the horizon, lattice
    points z-sorted with nearer points drawn last."""
    buf = np.empty((height, width, 4), dtype=np.uint8)
    buf[:] = BACKGROUND

    fx, fy, cx, cy = pose.intrinsics
    rot = pose.rotation
    # Horizon: pixels whose ray is world-horizontal (d_y == 0).
    if abs(rot[1, 1]) > 1e-9:
        for col in range(width):
            x_c = (col + 0.5 - cx) / fx
            y_c = (rot[1, 2] - rot[1, 0] * x_c) / rot[1, 1]
            row = int(round(cy - fy * y_c - 0.5))
            if 0 <= row < height:
                buf[:row, col] = SKY
                buf[row, col] = HORIZON
            elif row < 0:
                pass
            else:
                buf[:, col] = SKY

    pts = scene.points()
    uv, depth, visible = project_points(pose, pts)
    order = np.argsort(-depth, kind="stable")  # far first, near painted last
    extent = scene.extent
    for idx in order:
        if not visible[idx]:
            continue
        col = int(round(uv[idx, 0] - 0.5))
        row = int(round(uv[idx, 1] - 0.5))
        if not (-8 <= col < width + 8 and -8 <= row < height + 8):
            continue
        side = int(np.clip(round(6.0 / depth[idx]), 1, 6))
        gx = int(pts[idx, 0]) + extent
        gz = int(pts[idx, 2]) + extent
        _paint_square(buf, row, col, side, POINT_COLORS[(gx + gz) % 2])
    return Rgba8Image(buf)
