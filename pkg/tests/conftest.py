import shutil
from pathlib import Path

import numpy as np
import pytest

from scenebench._data import data_path

GOLDEN_DIR = Path(__file__).parent / "golden"
GOLDEN_SEED = 7
MINI_DIR = data_path("fixtures", "workspaces", "mini")
SCENE_IDS = ("bedroom_03", "kitchen_02", "living_room_01")


def scene_source(scene_id: str) -> tuple[bytes, Path]:
    sdir = MINI_DIR / "scenes" / scene_id
    return (sdir / "scene.sdf").read_bytes(), sdir / "manifest.json"


@pytest.fixture
def mini_workspace(tmp_path) -> Path:
    ws = tmp_path / "ws"
    shutil.copytree(MINI_DIR, ws)
    return ws


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
