"""Component and composite configuration spaces.

Configurations are flat float arrays; a composite space owns the layout
(one block per active robot, scene order).  The metric is the Euclidean
norm of per-component distances, with SE2 angle differences wrapped to
[-pi, pi) and weighted by the robot circumradius so that rotation cost
bounds workspace displacement.

Spaces are immutable after construction; sampling takes an explicit
numpy Generator so concurrent callers never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scene as scene_mod
from .scene import DiskShape, PolygonShape, R1Segment, Scene

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Wrap angle(s) into [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


def wrap_diff(d):
    """Wrap angle difference(s) into [-pi, pi].

    Uses round() so the result is exactly antisymmetric in floating
    point, which keeps the metric exactly symmetric."""
    return d - TWO_PI * np.round(d / TWO_PI)


@dataclass(frozen=True)
class ComponentSpace:
    """One robot's configuration space at some level (or a fiber block)."""

    kind: str  # "R1" | "R2" | "SE2" | "Empty"
    robot: int  # scene robot index, -1 for anonymous fiber blocks
    lo: np.ndarray
    hi: np.ndarray
    wrap: np.ndarray  # bool per dim, True for angular dims
    weights: np.ndarray  # metric weight per dim (theta weight for SE2)
    segment: R1Segment | None = None
    shape: DiskShape | PolygonShape | None = None

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        if self.dimension == 0:
            return np.zeros(0)
        return rng.uniform(self.lo, self.hi)


def _theta_weight(shape) -> float:
    if isinstance(shape, DiskShape):
        return shape.radius
    if isinstance(shape, PolygonShape):
        return shape.circumradius
    return 1.0


def empty_component(robot: int = -1) -> ComponentSpace:
    z = np.zeros(0)
    return ComponentSpace("Empty", robot, z, z, np.zeros(0, dtype=bool), z)


def component_for_robot(
    workspace_bounds: np.ndarray,
    robot: int,
    space: str | R1Segment,
    shape: DiskShape | PolygonShape,
) -> ComponentSpace:
    """Build the component space of one robot given its (possibly
    level-simplified) space kind and shape."""
    if isinstance(space, R1Segment):
        return ComponentSpace(
            "R1", robot,
            lo=np.array([0.0]), hi=np.array([1.0]),
            wrap=np.array([False]), weights=np.array([1.0]),
            segment=space, shape=shape,
        )
    lo = workspace_bounds[:2].astype(float)
    hi = workspace_bounds[2:].astype(float)
    if space == "R2":
        return ComponentSpace(
            "R2", robot,
            lo=lo, hi=hi,
            wrap=np.array([False, False]), weights=np.array([1.0, 1.0]),
            shape=shape,
        )
    if space == "SE2":
        w = _theta_weight(shape)
        return ComponentSpace(
            "SE2", robot,
            lo=np.concatenate([lo, [-math.pi]]), hi=np.concatenate([hi, [math.pi]]),
            wrap=np.array([False, False, True]), weights=np.array([1.0, 1.0, w]),
            shape=shape,
        )
    raise ValueError(f"unknown space kind {space!r}")


class CompositeSpace:
    """Product of the active robots' component spaces at one level."""

    def __init__(self, scene: Scene | None, components: list[ComponentSpace], resolution_frac: float = 0.01):
        self.scene = scene
        self.components = list(components)
        dims = [c.dimension for c in self.components]
        self.dimension = int(sum(dims))
        self.offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        if self.dimension:
            self.lo = np.concatenate([c.lo for c in self.components])
            self.hi = np.concatenate([c.hi for c in self.components])
            self.wrap = np.concatenate([c.wrap for c in self.components])
            self.weights = np.concatenate([c.weights for c in self.components])
        else:
            self.lo = np.zeros(0)
            self.hi = np.zeros(0)
            self.wrap = np.zeros(0, dtype=bool)
            self.weights = np.zeros(0)
        self.wrap_cols = np.flatnonzero(self.wrap)
        self.resolution_frac = float(resolution_frac)
        self._collision_components = [c for c in self.components if c.shape is not None]
        self._all_disks = all(isinstance(c.shape, DiskShape) for c in self._collision_components)
        extent = (self.hi - self.lo).copy()
        extent[self.wrap_cols] = math.pi
        self.measure = float(np.linalg.norm(extent * self.weights))

    # -- layout ------------------------------------------------------------

    @property
    def active_robots(self) -> list[int]:
        return [c.robot for c in self.components]

    def block(self, x: np.ndarray, i: int) -> np.ndarray:
        return x[..., self.offsets[i]: self.offsets[i + 1]]

    def component_index(self, robot: int) -> int:
        for i, c in enumerate(self.components):
            if c.robot == robot:
                return i
        raise KeyError(robot)

    @property
    def resolution(self) -> float:
        """Segment-check step h, a fixed fraction of the space measure."""
        return self.resolution_frac * self.measure if self.dimension else 0.0

    # -- metric ------------------------------------------------------------

    def _wrapped_diff(self, diff: np.ndarray) -> np.ndarray:
        if len(self.wrap_cols):
            diff[..., self.wrap_cols] = wrap_diff(diff[..., self.wrap_cols])
        return diff

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        diff = self._wrapped_diff(b - a)
        return float(np.linalg.norm(diff * self.weights))

    def distances_to(self, x: np.ndarray, pts: np.ndarray) -> np.ndarray:
        diff = self._wrapped_diff(pts - x)
        return np.linalg.norm(diff * self.weights, axis=-1)

    def consecutive_lengths(self, waypoints: np.ndarray) -> np.ndarray:
        if len(waypoints) < 2:
            return np.zeros(0)
        diff = self._wrapped_diff(waypoints[1:] - waypoints[:-1])
        return np.linalg.norm(diff * self.weights, axis=-1)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=float)
        if len(self.wrap_cols):
            x[..., self.wrap_cols] = wrap_angle(x[..., self.wrap_cols])
        return x

    def clamp(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=float)
        free = ~self.wrap
        x[free] = np.clip(x[free], self.lo[free], self.hi[free])
        if len(self.wrap_cols):
            x[self.wrap_cols] = wrap_angle(x[self.wrap_cols])
        return x

    def contains(self, x: np.ndarray, atol: float = 1e-9) -> bool:
        if x.shape != (self.dimension,):
            return False
        free = ~self.wrap
        return bool((x[free] >= self.lo[free] - atol).all() and (x[free] <= self.hi[free] + atol).all())

    def interpolate(self, a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
        if t == 0.0:
            return a.copy()
        if t == 1.0:
            return b.copy()  # endpoints reproduce inputs bit-exactly
        delta = self._wrapped_diff(b - a)
        return self.normalize(a + t * delta) if len(self.wrap_cols) else a + t * delta

    def interpolate_many(self, a: np.ndarray, b: np.ndarray, ts: np.ndarray) -> np.ndarray:
        delta = self._wrapped_diff(b - a)
        pts = a[None, :] + np.asarray(ts)[:, None] * delta[None, :]
        if len(self.wrap_cols):
            pts[:, self.wrap_cols] = wrap_angle(pts[:, self.wrap_cols])
        return pts

    # -- sampling ----------------------------------------------------------

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        if self.dimension == 0:
            return np.zeros(0)
        return rng.uniform(self.lo, self.hi)

    # -- feasibility -------------------------------------------------------

    def robot_centers(self, X: np.ndarray) -> list[np.ndarray]:
        """Workspace center of each collision component for configs X (n, dim)."""
        centers = []
        for i, c in enumerate(self.components):
            if c.shape is None:
                continue
            blk = self.block(X, i)
            if c.kind == "R1":
                t = blk[..., 0]
                p = c.segment.start[None, :] + t[..., None] * (c.segment.end - c.segment.start)[None, :]
                centers.append(p)
            else:
                centers.append(blk[..., :2])
        return centers

    def configs_feasible(self, X: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Vectorized feasibility mask over configs X (n, dim).

        A positive margin inflates every body by that amount; the
        optimizer uses it so its fixed points keep strict clearance and
        stay feasible under arbitrary resampling."""
        X = np.atleast_2d(X)
        n = len(X)
        if not self._collision_components:
            return np.ones(n, dtype=bool)
        if self._all_disks:
            ws = self.scene.workspace
            comps = self._collision_components
            centers = self.robot_centers(X)
            ok = np.ones(n, dtype=bool)
            for c, ctr in zip(comps, centers):
                ok &= ~scene_mod.disk_centers_obstacle_mask(ctr, c.shape.radius + margin, ws)
            for i in range(len(comps)):
                for j in range(i + 1, len(comps)):
                    d = np.hypot(
                        centers[i][:, 0] - centers[j][:, 0],
                        centers[i][:, 1] - centers[j][:, 1],
                    )
                    ok &= d > comps[i].shape.radius + comps[j].shape.radius + 2 * margin
            return ok
        return np.array([self._config_feasible_scalar(x, margin) for x in X])

    def _config_feasible_scalar(self, x: np.ndarray, margin: float = 0.0) -> bool:
        ws = self.scene.workspace
        placed = []
        for i, c in enumerate(self.components):
            if c.shape is None:
                continue
            shape = c.shape
            if margin > 0.0 and isinstance(shape, DiskShape):
                shape = DiskShape(radius=shape.radius + margin)
            blk = self.block(x, i)
            if c.kind == "R1":
                p = c.segment.point_at(float(blk[0]))
                pose = (float(p[0]), float(p[1]), 0.0)
            elif c.kind == "R2":
                pose = (float(blk[0]), float(blk[1]), 0.0)
            else:
                pose = (float(blk[0]), float(blk[1]), float(blk[2]))
            if scene_mod.shape_obstacle_collision(shape, *pose, ws):
                return False
            placed.append((shape, pose))
        for i in range(len(placed)):
            for j in range(i + 1, len(placed)):
                if scene_mod.shapes_collide(placed[i][0], placed[i][1], placed[j][0], placed[j][1]):
                    return False
        return True

    def config_feasible(self, x: np.ndarray, margin: float = 0.0) -> bool:
        return bool(self.configs_feasible(x[None, :], margin)[0])

    def segment_feasible(self, a: np.ndarray, b: np.ndarray, margin: float = 0.0) -> bool:
        """Discretized segment check at resolution h, endpoints included."""
        d = self.distance(a, b)
        if d == 0.0:
            return self.config_feasible(a, margin)
        steps = max(1, int(math.ceil(d / self.resolution)))
        ts = np.linspace(0.0, 1.0, steps + 1)
        return bool(self.configs_feasible(self.interpolate_many(a, b, ts), margin).all())

    # -- rendering helpers ---------------------------------------------------

    def robot_poses(self, x: np.ndarray) -> list[tuple[int, float, float, float]]:
        """(robot index, x, y, theta) for every active robot with a body."""
        poses = []
        for i, c in enumerate(self.components):
            if c.shape is None:
                continue
            blk = self.block(x, i)
            if c.kind == "R1":
                p = c.segment.point_at(float(blk[0]))
                poses.append((c.robot, float(p[0]), float(p[1]), 0.0))
            elif c.kind == "R2":
                poses.append((c.robot, float(blk[0]), float(blk[1]), 0.0))
            else:
                poses.append((c.robot, float(blk[0]), float(blk[1]), float(blk[2])))
        return poses

    def same_layout(self, other: "CompositeSpace") -> bool:
        if self.dimension != other.dimension or len(self.components) != len(other.components):
            return False
        return all(
            a.robot == b.robot and a.kind == b.kind
            for a, b in zip(self.components, other.components)
        )


def full_space(scene: Scene, resolution_frac: float = 0.01) -> CompositeSpace:
    """Composite space of the whole scene (every robot, own space and shape)."""
    comps = [
        component_for_robot(scene.workspace.bounds, i, r.space, r.shape)
        for i, r in enumerate(scene.robots)
    ]
    return CompositeSpace(scene, comps, resolution_frac)


def composite_start_goal(space: CompositeSpace) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-robot start/goal blocks for the given level space.

    Uses each robot's scene start/goal truncated to the level's component
    dimension (SE2 robots simplified to R2 drop theta)."""
    starts, goals = [], []
    for c in space.components:
        r = space.scene.robots[c.robot]
        starts.append(np.asarray(r.start[: c.dimension], dtype=float))
        goals.append(np.asarray(r.goal[: c.dimension], dtype=float))
    if not starts:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(starts), np.concatenate(goals)
