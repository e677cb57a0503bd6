"""Agent parameters and start pose for downstream navigation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import UnnavigableSceneError
from .floor import FLOOR, FloorReport
from .geometry import Pose, convert_frame, yaw_to_quat
from .model import AssetManifest, SourceScene

AGENT_RADIUS = 0.18
AGENT_HEIGHT = 1.5
GRID_STEP = 0.1
_TIE_DECIMALS = 9


@dataclass(frozen=True)
class NavigationBlock:
    agent_radius: float
    agent_height: float
    start_pose: Pose  # source (Z-up) frame
    clearance: float

    def to_dict(self) -> dict:
        """Serialized in the Y-up target frame."""
        p = convert_frame(self.start_pose)
        return {
            "agent_radius": self.agent_radius,
            "agent_height": self.agent_height,
            "start_pose": p.to_dict(),
            "start_clearance": self.clearance,
        }


def _rect_distance(px: np.ndarray, py: np.ndarray, lo, hi) -> np.ndarray:
    dx = np.maximum(np.maximum(lo[0] - px, 0.0), px - hi[0])
    dy = np.maximum(np.maximum(lo[1] - py, 0.0), py - hi[1])
    return np.hypot(dx, dy)


def setup_navigation(
    scene: SourceScene,
    floor: FloorReport,
    asset_manifest: AssetManifest | None = None,
    categories: Mapping[str, str] | None = None,
    agent_radius: float = AGENT_RADIUS,
    agent_height: float = AGENT_HEIGHT,
) -> NavigationBlock:
    """Pick the floor grid point with the most clearance as the start pose.

    Clearance is the distance to the nearest floor edge or object footprint
    (objects above the agent's head are ignored). Ties go to the point nearest
    the floor center, then to the smallest x, then y. The start pose faces the
    centroid of the objects.

    Raises:
        UnnavigableSceneError: no grid point has clearance >= agent_radius.
    """
    categories = categories or {}
    fb = scene.model(floor.floor_model).world_bounds(asset_manifest)
    top = floor.floor_top
    nx = int(math.floor((fb.max[0] - fb.min[0]) / GRID_STEP + 1e-9)) + 1
    ny = int(math.floor((fb.max[1] - fb.min[1]) / GRID_STEP + 1e-9)) + 1
    gx, gy = np.meshgrid(
        fb.min[0] + GRID_STEP * np.arange(nx), fb.min[1] + GRID_STEP * np.arange(ny), indexing="ij"
    )
    clearance = np.minimum.reduce(
        [gx - fb.min[0], fb.max[0] - gx, gy - fb.min[1], fb.max[1] - gy]
    )

    centers = []
    for m in scene.models:
        if m.name == floor.floor_model or categories.get(m.name) == FLOOR:
            continue
        b = m.world_bounds(asset_manifest)
        centers.append(b.center)
        if b.min[2] >= top + agent_height:
            continue
        clearance = np.minimum(clearance, _rect_distance(gx, gy, b.min, b.max))

    clearance = np.round(clearance, _TIE_DECIMALS)
    best = clearance.max()
    if best < agent_radius:
        raise UnnavigableSceneError(
            f"scene {scene.name!r}: best clearance {best:.3f} m < agent radius {agent_radius} m"
        )
    cx, cy = (fb.min[0] + fb.max[0]) / 2, (fb.min[1] + fb.max[1]) / 2
    to_center = np.round(np.hypot(gx - cx, gy - cy), _TIE_DECIMALS)
    cand = np.argwhere(clearance == best)  # row-major: sorted by x index, then y index
    dist = to_center[cand[:, 0], cand[:, 1]]
    i, j = cand[int(np.argmin(dist))]
    x, y = float(gx[i, j]), float(gy[i, j])

    yaw = 0.0
    if centers:
        mx = sum(c[0] for c in centers) / len(centers)
        my = sum(c[1] for c in centers) / len(centers)
        if math.hypot(mx - x, my - y) > 1e-9:
            yaw = math.atan2(my - y, mx - x)
    return NavigationBlock(
        agent_radius=agent_radius,
        agent_height=agent_height,
        start_pose=Pose((x, y, top), yaw_to_quat(yaw)),
        clearance=float(best),
    )
