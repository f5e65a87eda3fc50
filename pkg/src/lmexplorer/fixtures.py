"""Bundled demo scenes and bundle sequences, loadable by name."""

from __future__ import annotations

import json
from importlib import resources

SCENE_FIXTURES = {
    "crossing_disks": "crossing_disks.scene.json",
    "solovey_tee": "solovey_tee.scene.json",
    "bhattacharya_square": "bhattacharya_square.scene.json",
    "se2_corridor": "se2_corridor.scene.json",
}

BUNDLE_FIXTURES = {
    "crossing_disks": "crossing_disks.bundle.json",
    "solovey_tee_123": "solovey_tee_123.bundle.json",
    "solovey_tee_321": "solovey_tee_321.bundle.json",
    "bhattacharya_square": "bhattacharya_square.bundle.json",
    "se2_corridor": "se2_corridor.bundle.json",
}


def _load(filename: str) -> dict:
    ref = resources.files("lmexplorer") / "fixtures" / filename
    return json.loads(ref.read_text())


def scene_doc(name: str) -> dict:
    if name not in SCENE_FIXTURES:
        raise KeyError(f"unknown scene fixture {name!r}; available: {sorted(SCENE_FIXTURES)}")
    return _load(SCENE_FIXTURES[name])


def bundle_doc(name: str) -> dict:
    if name not in BUNDLE_FIXTURES:
        raise KeyError(f"unknown bundle fixture {name!r}; available: {sorted(BUNDLE_FIXTURES)}")
    return _load(BUNDLE_FIXTURES[name])
