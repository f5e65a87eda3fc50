"""Component-based reductions between configuration-space levels.

A bundle sequence is an ordered list of composite spaces, base level
first, full scene space last.  Between adjacent levels each robot
carries one component mapping: keep it unchanged, drop it entirely,
forget an SE2 robot's orientation, or truncate a box space to its first
coordinates.  Documents list levels bottom-up; a robot omitted at a
level is removed there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .cspace import (
    ComponentSpace,
    CompositeSpace,
    component_for_robot,
    composite_start_goal,
    empty_component,
    full_space,
)
from .scene import DiskShape, Scene, SchemaError, ValidationError, _parse_shape

IDENTITY = "identity"
REMOVE_ROBOT = "remove_robot"
SE2_TO_R2 = "se2_to_r2"
RN_TO_RM = "rn_to_rm"


class UnsupportedMapping(ValidationError):
    """Requested component reduction is outside the planar catalogue."""


class RobotUnknown(ValidationError):
    """Bundle references a robot absent from the scene."""


class DimensionMismatch(ValueError):
    """Fiber values do not fit the mapping's fiber space."""


@dataclass(frozen=True)
class ComponentMapping:
    """Projection of one robot's component between adjacent levels."""

    kind: str
    robot: int
    fiber: ComponentSpace
    upper_index: int  # component position in the upper level
    lower_index: int | None  # component position in the lower level (None if removed)
    keep_dims: int = 0  # coords copied to the lower level


@dataclass
class BundleSequence:
    scene: Scene
    levels: list[CompositeSpace]  # index 0 = base, index K-1 = full space
    mappings: list[list[ComponentMapping]]  # mappings[l-1]: levels[l] -> levels[l-1]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def start_goal(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        return composite_start_goal(self.levels[level])


def _inscribed_disk(shape) -> DiskShape:
    """Largest origin-centered disk contained in the body."""
    if isinstance(shape, DiskShape):
        return shape
    pts = shape.points
    n = len(pts)
    r = min(geometry.dist_point_segment((0.0, 0.0), pts[i], pts[(i + 1) % n]) for i in range(n))
    return DiskShape(radius=r)


def _entry_fields(entry, where: str) -> tuple[str, str | None, dict | None]:
    if isinstance(entry, str):
        return entry, None, None
    if isinstance(entry, dict):
        if "robot" not in entry:
            raise SchemaError(f"{where}.robot: missing")
        return str(entry["robot"]), entry.get("space"), entry.get("shape")
    raise SchemaError(f"{where}: expected robot name or object")


def load_bundle(document, scene: Scene, resolution_frac: float = 0.01) -> BundleSequence:
    """Parse, infer component mappings and validate a bundle document."""
    if isinstance(document, (str, bytes)):
        import json

        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document: invalid JSON ({exc})") from None
    if isinstance(document, dict):
        raw_levels = document.get("levels")
    else:
        raw_levels = document
    if not isinstance(raw_levels, list) or not raw_levels:
        raise SchemaError("levels: expected a non-empty list of levels")

    levels: list[CompositeSpace] = []
    level_specs: list[dict[int, tuple[str, object]]] = []  # robot -> (kind, shape)
    for li, entries in enumerate(raw_levels):
        where = f"levels[{li}]"
        if not isinstance(entries, list) or not entries:
            raise SchemaError(f"{where}: expected a non-empty list of robot entries")
        spec: dict[int, tuple[str, object]] = {}
        for ei, entry in enumerate(entries):
            ewhere = f"{where}[{ei}]"
            rname, kind, shape_doc = _entry_fields(entry, ewhere)
            try:
                ridx = scene.robot_index(rname)
            except KeyError:
                raise RobotUnknown(f"{ewhere}: unknown robot {rname!r}") from None
            if ridx in spec:
                raise ValidationError(f"{ewhere}: robot {rname!r} listed twice in level {li + 1}")
            robot = scene.robots[ridx]
            own_kind = robot.space_kind
            kind = kind or own_kind
            if kind in ("SO3", "SE3"):
                raise UnsupportedMapping(f"{ewhere}: {kind} spaces are not supported")
            if kind not in ("R1", "R2", "SE2"):
                raise SchemaError(f"{ewhere}.space: unknown space {kind!r}")
            if kind == own_kind:
                space = robot.space
                shape = _parse_shape(shape_doc, f"{ewhere}.shape") if shape_doc else robot.shape
            elif kind == "R2" and own_kind == "SE2":
                space = "R2"
                shape = _parse_shape(shape_doc, f"{ewhere}.shape") if shape_doc else _inscribed_disk(robot.shape)
            else:
                raise UnsupportedMapping(
                    f"{ewhere}: cannot reduce {own_kind} robot {rname!r} to {kind}"
                )
            spec[ridx] = (kind, (space, shape))
        level_specs.append(spec)
        comps = [
            component_for_robot(scene.workspace.bounds, ridx, spec[ridx][1][0], spec[ridx][1][1])
            for ridx in sorted(spec)
        ]
        levels.append(CompositeSpace(scene, comps, resolution_frac))

    top = level_specs[-1]
    if set(top) != set(range(len(scene.robots))):
        raise ValidationError(f"levels[{len(levels) - 1}]: top level must contain every scene robot")
    for ridx, (kind, _) in top.items():
        if kind != scene.robots[ridx].space_kind:
            raise ValidationError(
                f"levels[{len(levels) - 1}]: robot {scene.robots[ridx].name!r} must use its own space at the top level"
            )

    mappings: list[list[ComponentMapping]] = []
    for l in range(1, len(levels)):
        upper, lower = levels[l], levels[l - 1]
        upper_spec, lower_spec = level_specs[l], level_specs[l - 1]
        if not set(lower_spec) <= set(upper_spec):
            extra = sorted(set(lower_spec) - set(upper_spec))
            name = scene.robots[extra[0]].name
            raise ValidationError(
                f"levels[{l - 1}]: robot {name!r} present below level {l + 1} but absent above"
            )
        maps = []
        all_identity = True
        for ui, comp in enumerate(upper.components):
            ridx = comp.robot
            if ridx not in lower_spec:
                maps.append(
                    ComponentMapping(REMOVE_ROBOT, ridx, comp, ui, None)
                )
                all_identity = False
                continue
            lower_kind = lower_spec[ridx][0]
            upper_kind = upper_spec[ridx][0]
            li = lower.component_index(ridx)
            if lower_kind == upper_kind:
                maps.append(
                    ComponentMapping(IDENTITY, ridx, empty_component(ridx), ui, li, keep_dims=comp.dimension)
                )
            elif upper_kind == "SE2" and lower_kind == "R2":
                fiber = ComponentSpace(
                    "SO2", ridx,
                    lo=np.array([-math.pi]), hi=np.array([math.pi]),
                    wrap=np.array([True]), weights=np.array([comp.weights[2]]),
                )
                maps.append(ComponentMapping(SE2_TO_R2, ridx, fiber, ui, li, keep_dims=2))
                all_identity = False
            else:
                raise UnsupportedMapping(
                    f"levels[{l}]: no mapping from {upper_kind} to {lower_kind} for robot {scene.robots[ridx].name!r}"
                )
        if all_identity:
            raise ValidationError(
                f"levels[{l - 1}]: adjacent levels differ only by identity mappings"
            )
        mappings.append(maps)

    seq = BundleSequence(scene=scene, levels=levels, mappings=mappings)
    if not levels[-1].same_layout(full_space(scene, resolution_frac)):
        raise ValidationError("top level does not match the scene's composite space")
    return seq


def box_truncation_mapping(upper: ComponentSpace, keep_dims: int, upper_index: int, lower_index: int) -> ComponentMapping:
    """Generic RN -> RM reduction keeping the first coordinates of a box block."""
    n = upper.dimension
    if not 0 <= keep_dims < n:
        raise DimensionMismatch(f"keep_dims must be in [0, {n})")
    fiber = ComponentSpace(
        "Rbox", upper.robot,
        lo=upper.lo[keep_dims:].copy(), hi=upper.hi[keep_dims:].copy(),
        wrap=upper.wrap[keep_dims:].copy(), weights=upper.weights[keep_dims:].copy(),
    )
    return ComponentMapping(RN_TO_RM, upper.robot, fiber, upper_index, lower_index, keep_dims=keep_dims)


def project_config(seq: BundleSequence, upper_level: int, x: np.ndarray) -> np.ndarray:
    """Project a configuration from levels[upper_level] to the level below."""
    maps = seq.mappings[upper_level - 1]
    upper = seq.levels[upper_level]
    lower = seq.levels[upper_level - 1]
    out = np.zeros(lower.dimension)
    for m in maps:
        if m.lower_index is None:
            continue
        blk = upper.block(x, m.upper_index)
        lo, hi = lower.offsets[m.lower_index], lower.offsets[m.lower_index + 1]
        out[lo:hi] = blk[: m.keep_dims]
    return out


def lift_config(
    seq: BundleSequence,
    upper_level: int,
    x_base: np.ndarray,
    fiber_values: list[np.ndarray],
) -> np.ndarray:
    """Insert fiber coordinates into a base configuration, one block per
    upper component; project_config recovers x_base exactly."""
    maps = seq.mappings[upper_level - 1]
    upper = seq.levels[upper_level]
    lower = seq.levels[upper_level - 1]
    if len(fiber_values) != len(maps):
        raise DimensionMismatch(f"expected {len(maps)} fiber blocks, got {len(fiber_values)}")
    out = np.zeros(upper.dimension)
    for m, fv in zip(maps, fiber_values):
        fv = np.asarray(fv, dtype=float)
        if fv.shape != (m.fiber.dimension,):
            raise DimensionMismatch(
                f"fiber block for robot {m.robot} must have {m.fiber.dimension} dims, got {fv.shape}"
            )
        lo, hi = upper.offsets[m.upper_index], upper.offsets[m.upper_index + 1]
        if m.lower_index is None:
            out[lo:hi] = fv
        else:
            blo, bhi = lower.offsets[m.lower_index], lower.offsets[m.lower_index + 1]
            out[lo: lo + m.keep_dims] = x_base[blo:bhi]
            out[lo + m.keep_dims: hi] = fv
    return out


def sample_fibers(seq: BundleSequence, upper_level: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Uniform fiber sample per upper component (fixed consumption order)."""
    return [m.fiber.sample_uniform(rng) for m in seq.mappings[upper_level - 1]]


def project_path(seq: BundleSequence, upper_level: int, waypoints: np.ndarray) -> np.ndarray:
    """Waypoint-wise projection with consecutive duplicates merged."""
    if len(waypoints) == 0:
        raise ValueError("path must have at least one waypoint")
    projected = np.array([project_config(seq, upper_level, w) for w in waypoints])
    keep = [0]
    for i in range(1, len(projected)):
        if not np.allclose(projected[i], projected[keep[-1]], atol=1e-12):
            keep.append(i)
    out = projected[keep]
    if len(out) == 1:
        out = np.vstack([out, out])  # zero-length path, kept two-waypoint
    return out


@dataclass
class AdmissibilityReport:
    level: int
    requested: int
    checked: int
    violations: int
    examples: list[np.ndarray] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.checked > 0


def check_admissibility(
    seq: BundleSequence,
    upper_level: int,
    n_samples: int,
    rng: np.random.Generator,
    max_attempts_factor: int = 200,
) -> AdmissibilityReport:
    """Sample feasible upper configurations and verify their projections
    stay feasible below (the no-minima-lost obligation on projections)."""
    upper = seq.levels[upper_level]
    lower = seq.levels[upper_level - 1]
    checked = violations = attempts = 0
    examples: list[np.ndarray] = []
    limit = max_attempts_factor * n_samples
    while checked < n_samples and attempts < limit:
        batch = max(64, n_samples - checked)
        X = np.array([upper.sample_uniform(rng) for _ in range(batch)])
        attempts += batch
        feasible = X[upper.configs_feasible(X)]
        for x in feasible:
            if checked >= n_samples:
                break
            checked += 1
            if not lower.config_feasible(project_config(seq, upper_level, x)):
                violations += 1
                if len(examples) < 10:
                    examples.append(x.copy())
    return AdmissibilityReport(
        level=upper_level, requested=n_samples, checked=checked,
        violations=violations, examples=examples,
    )
