"""Scene model: 2D workspace, obstacles, robot specs and collision predicates.

A scene is immutable after loading.  Touching boundaries count as
collision (obstacles are closed sets), and a robot shape leaving the
workspace bounds is a collision rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry


class SceneError(Exception):
    """Base class for scene loading failures."""


class SchemaError(SceneError):
    """Document structure does not match the scene schema."""


class ValidationError(SceneError):
    """Well-formed document violating a scene invariant."""


@dataclass(frozen=True)
class DiskShape:
    radius: float


@dataclass(frozen=True)
class PolygonShape:
    """Convex robot polygon, vertices counterclockwise about the body origin."""

    points: np.ndarray

    @property
    def circumradius(self) -> float:
        return float(np.max(np.hypot(self.points[:, 0], self.points[:, 1])))


@dataclass(frozen=True)
class R1Segment:
    """1-dof space: unit parameter t mapped affinely onto a workspace segment."""

    start: np.ndarray
    end: np.ndarray

    def point_at(self, t: float) -> np.ndarray:
        return self.start + t * (self.end - self.start)


@dataclass(frozen=True)
class Obstacle:
    kind: str  # "disk" | "polygon"
    center: np.ndarray | None = None
    radius: float = 0.0
    points: np.ndarray | None = None
    # set for axis-aligned rectangular polygons; enables the clamp-based
    # disk distance fast path on the feasibility hot loop
    aabb: tuple[np.ndarray, np.ndarray] | None = None


def _rect_aabb(points: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    if len(points) != 4:
        return None
    edges = np.roll(points, -1, axis=0) - points
    if not np.all((edges[:, 0] == 0.0) | (edges[:, 1] == 0.0)):
        return None
    return points.min(axis=0), points.max(axis=0)


@dataclass(frozen=True)
class Workspace:
    bounds: np.ndarray  # [xmin, ymin, xmax, ymax]
    obstacles: tuple[Obstacle, ...] = ()

    @property
    def lo(self) -> np.ndarray:
        return self.bounds[:2]

    @property
    def hi(self) -> np.ndarray:
        return self.bounds[2:]


@dataclass(frozen=True)
class RobotSpec:
    name: str
    shape: DiskShape | PolygonShape
    space: str | R1Segment  # "R2" | "SE2" | R1Segment
    start: np.ndarray
    goal: np.ndarray

    @property
    def space_kind(self) -> str:
        return "R1" if isinstance(self.space, R1Segment) else self.space


@dataclass(frozen=True)
class Scene:
    name: str
    workspace: Workspace
    robots: tuple[RobotSpec, ...]

    def robot_index(self, name: str) -> int:
        for i, r in enumerate(self.robots):
            if r.name == name:
                return i
        raise KeyError(name)

    @property
    def composite_dimension(self) -> int:
        return sum(space_dimension(r.space) for r in self.robots)


def space_dimension(space: str | R1Segment) -> int:
    if isinstance(space, R1Segment):
        return 1
    return {"R2": 2, "SE2": 3}[space]


def workspace_pose(space: str | R1Segment, pose: np.ndarray) -> tuple[float, float, float]:
    """Map a component configuration to a workspace placement (x, y, theta)."""
    if isinstance(space, R1Segment):
        p = space.point_at(float(pose[0]))
        return float(p[0]), float(p[1]), 0.0
    if space == "R2":
        return float(pose[0]), float(pose[1]), 0.0
    return float(pose[0]), float(pose[1]), float(pose[2])


def placed_polygon(shape: PolygonShape, x: float, y: float, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return shape.points @ rot.T + np.array([x, y])


def shape_obstacle_collision(
    shape: DiskShape | PolygonShape,
    x: float,
    y: float,
    theta: float,
    workspace: Workspace,
) -> bool:
    """Placed shape against workspace bounds and every obstacle."""
    lo, hi = workspace.lo, workspace.hi
    if isinstance(shape, DiskShape):
        r = shape.radius
        if x < lo[0] + r or x > hi[0] - r or y < lo[1] + r or y > hi[1] - r:
            return True
        for ob in workspace.obstacles:
            if ob.kind == "disk":
                if geometry.disk_disk_collide((x, y), r, ob.center, ob.radius):
                    return True
            else:
                if geometry.disk_polygon_collide((x, y), r, ob.points):
                    return True
        return False
    verts = placed_polygon(shape, x, y, theta)
    if (verts[:, 0] < lo[0]).any() or (verts[:, 0] > hi[0]).any():
        return True
    if (verts[:, 1] < lo[1]).any() or (verts[:, 1] > hi[1]).any():
        return True
    for ob in workspace.obstacles:
        if ob.kind == "disk":
            if geometry.disk_polygon_collide(ob.center, ob.radius, verts):
                return True
        else:
            if geometry.polygons_collide(verts, ob.points):
                return True
    return False


def shapes_collide(
    shape_a: DiskShape | PolygonShape,
    pose_a: tuple[float, float, float],
    shape_b: DiskShape | PolygonShape,
    pose_b: tuple[float, float, float],
) -> bool:
    """Pairwise collision of two placed shapes; symmetric by construction."""
    if isinstance(shape_a, DiskShape) and isinstance(shape_b, DiskShape):
        return geometry.disk_disk_collide(pose_a[:2], shape_a.radius, pose_b[:2], shape_b.radius)
    if isinstance(shape_a, DiskShape):
        verts = placed_polygon(shape_b, *pose_b)
        return geometry.disk_polygon_collide(pose_a[:2], shape_a.radius, verts)
    if isinstance(shape_b, DiskShape):
        verts = placed_polygon(shape_a, *pose_a)
        return geometry.disk_polygon_collide(pose_b[:2], shape_b.radius, verts)
    return geometry.polygons_collide(placed_polygon(shape_a, *pose_a), placed_polygon(shape_b, *pose_b))


def robot_in_collision(scene: Scene, robot: int, pose: np.ndarray) -> bool:
    """True iff the placed robot intersects any obstacle or exits bounds."""
    spec = scene.robots[robot]
    x, y, theta = workspace_pose(spec.space, pose)
    return shape_obstacle_collision(spec.shape, x, y, theta, scene.workspace)


def robots_in_collision(scene: Scene, i: int, pose_i: np.ndarray, j: int, pose_j: np.ndarray) -> bool:
    """True iff robots i and j placed at the given poses intersect."""
    if i == j:
        raise ValueError("robot indices must differ")
    a, b = scene.robots[i], scene.robots[j]
    return shapes_collide(a.shape, workspace_pose(a.space, pose_i), b.shape, workspace_pose(b.space, pose_j))


def disk_centers_obstacle_mask(centers: np.ndarray, radius: float, workspace: Workspace) -> np.ndarray:
    """Vectorized collision mask for a disk robot at many centers."""
    lo, hi = workspace.lo, workspace.hi
    hit = (
        (centers[:, 0] < lo[0] + radius)
        | (centers[:, 0] > hi[0] - radius)
        | (centers[:, 1] < lo[1] + radius)
        | (centers[:, 1] > hi[1] - radius)
    )
    for ob in workspace.obstacles:
        if hit.all():
            break
        if ob.kind == "disk":
            d = np.hypot(centers[:, 0] - ob.center[0], centers[:, 1] - ob.center[1])
            hit |= d <= ob.radius + radius
        elif ob.aabb is not None:
            closest = np.clip(centers, ob.aabb[0], ob.aabb[1])
            d = np.hypot(centers[:, 0] - closest[:, 0], centers[:, 1] - closest[:, 1])
            hit |= d <= radius
        else:
            hit |= geometry.disks_polygon_collide(centers, radius, ob.points)
    return hit


# ---------------------------------------------------------------------------
# Scene document format
# ---------------------------------------------------------------------------


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"{where}.{key}: missing")
    return doc[key]


def _as_point(value, where: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: expected [x, y]") from None
    if arr.shape != (2,):
        raise SchemaError(f"{where}: expected [x, y]")
    return arr


def _parse_obstacle(doc: dict, where: str) -> Obstacle:
    kind = _require(doc, "type", where)
    if kind == "disk":
        center = _as_point(_require(doc, "center", where), f"{where}.center")
        radius = float(_require(doc, "radius", where))
        if radius <= 0:
            raise ValidationError(f"{where}.radius: must be positive")
        return Obstacle(kind="disk", center=center, radius=radius)
    if kind == "polygon":
        raw = _require(doc, "points", where)
        try:
            pts = np.asarray(raw, dtype=float)
        except (TypeError, ValueError):
            raise SchemaError(f"{where}.points: expected [[x, y], ...]") from None
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise SchemaError(f"{where}.points: expected [[x, y], ...]")
        if len(pts) < 3:
            raise ValidationError(f"{where}.points: polygon needs at least 3 vertices")
        if not geometry.polygon_is_simple(pts):
            raise ValidationError(f"{where}.points: polygon is self-intersecting")
        if geometry.polygon_signed_area(pts) < 0:
            pts = pts[::-1].copy()  # normalize to counterclockwise
        return Obstacle(kind="polygon", points=pts, aabb=_rect_aabb(pts))
    raise SchemaError(f"{where}.type: unknown obstacle type {kind!r}")


def _parse_shape(doc: dict, where: str) -> DiskShape | PolygonShape:
    kind = _require(doc, "type", where)
    if kind == "disk":
        radius = float(_require(doc, "radius", where))
        if radius <= 0:
            raise ValidationError(f"{where}.radius: must be positive")
        return DiskShape(radius=radius)
    if kind == "polygon":
        pts = np.asarray(_require(doc, "points", where), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise SchemaError(f"{where}.points: expected at least 3 [x, y] vertices")
        if geometry.polygon_signed_area(pts) < 0:
            pts = pts[::-1].copy()
        if not _is_convex(pts):
            raise ValidationError(f"{where}.points: robot polygons must be convex")
        return PolygonShape(points=pts)
    raise SchemaError(f"{where}.type: unknown shape type {kind!r}")


def _is_convex(pts: np.ndarray) -> bool:
    n = len(pts)
    for i in range(n):
        if geometry._orient(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) < 0:
            return False
    return True


def _parse_space(doc, where: str) -> str | R1Segment:
    if doc == "R2" or doc == "SE2":
        return doc
    if isinstance(doc, dict) and doc.get("type") == "R1":
        a = _as_point(_require(doc, "from", where), f"{where}.from")
        b = _as_point(_require(doc, "to", where), f"{where}.to")
        if np.array_equal(a, b):
            raise ValidationError(f"{where}: R1 segment endpoints must be distinct")
        return R1Segment(start=a, end=b)
    raise SchemaError(f"{where}: expected \"R2\", \"SE2\" or {{\"type\": \"R1\", ...}}")


def load_scene(document) -> Scene:
    """Parse and validate a scene document (dict or JSON text)."""
    if isinstance(document, (str, bytes)):
        import json

        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document: invalid JSON ({exc})") from None
    if not isinstance(document, dict):
        raise SchemaError("document: expected a JSON object")

    name = str(document.get("name", "unnamed"))
    ws_doc = _require(document, "workspace", "document")
    bounds_raw = _require(ws_doc, "bounds", "workspace")
    bounds = np.asarray(bounds_raw, dtype=float)
    if bounds.shape != (4,):
        raise SchemaError("workspace.bounds: expected [xmin, ymin, xmax, ymax]")
    if bounds[2] <= bounds[0] or bounds[3] <= bounds[1]:
        raise ValidationError("workspace.bounds: width and height must be positive")

    obstacles = []
    for i, ob_doc in enumerate(ws_doc.get("obstacles", [])):
        ob = _parse_obstacle(ob_doc, f"workspace.obstacles[{i}]")
        _check_obstacle_in_bounds(ob, bounds, f"workspace.obstacles[{i}]")
        obstacles.append(ob)
    workspace = Workspace(bounds=bounds, obstacles=tuple(obstacles))

    robots = []
    names = set()
    for i, r_doc in enumerate(_require(document, "robots", "document")):
        where = f"robots[{i}]"
        rname = str(_require(r_doc, "name", where))
        if rname in names:
            raise ValidationError(f"{where}.name: duplicate robot name {rname!r}")
        names.add(rname)
        shape = _parse_shape(_require(r_doc, "shape", where), f"{where}.shape")
        space = _parse_space(_require(r_doc, "space", where), f"{where}.space")
        dim = space_dimension(space)
        start = np.asarray(_require(r_doc, "start", where), dtype=float)
        goal = np.asarray(_require(r_doc, "goal", where), dtype=float)
        if start.shape != (dim,):
            raise SchemaError(f"{where}.start: expected {dim} coordinates")
        if goal.shape != (dim,):
            raise SchemaError(f"{where}.goal: expected {dim} coordinates")
        robots.append(RobotSpec(name=rname, shape=shape, space=space, start=start, goal=goal))

    scene = Scene(name=name, workspace=workspace, robots=tuple(robots))
    _validate_endpoints(scene)
    return scene


def _check_obstacle_in_bounds(ob: Obstacle, bounds: np.ndarray, where: str) -> None:
    lo, hi = bounds[:2], bounds[2:]
    if ob.kind == "disk":
        ok = (ob.center - ob.radius >= lo - 1e-12).all() and (ob.center + ob.radius <= hi + 1e-12).all()
    else:
        ok = (ob.points >= lo - 1e-12).all() and (ob.points <= hi + 1e-12).all()
    if not ok:
        raise ValidationError(f"{where}: obstacle extends outside workspace bounds")


def _validate_endpoints(scene: Scene) -> None:
    for i, r in enumerate(scene.robots):
        for label, pose in (("start", r.start), ("goal", r.goal)):
            if robot_in_collision(scene, i, pose):
                raise ValidationError(f"robots[{i}].{label}: configuration in collision")
    for i in range(len(scene.robots)):
        for j in range(i + 1, len(scene.robots)):
            if robots_in_collision(scene, i, scene.robots[i].start, j, scene.robots[j].start):
                raise ValidationError(f"robots[{j}].start: collides with robots[{i}].start")
            if robots_in_collision(scene, i, scene.robots[i].goal, j, scene.robots[j].goal):
                raise ValidationError(f"robots[{j}].goal: collides with robots[{i}].goal")


def save_scene(scene: Scene) -> dict:
    """Inverse of load_scene (up to float formatting)."""

    def shape_doc(shape):
        if isinstance(shape, DiskShape):
            return {"type": "disk", "radius": shape.radius}
        return {"type": "polygon", "points": shape.points.tolist()}

    def space_doc(space):
        if isinstance(space, R1Segment):
            return {"type": "R1", "from": space.start.tolist(), "to": space.end.tolist()}
        return space

    def obstacle_doc(ob):
        if ob.kind == "disk":
            return {"type": "disk", "center": ob.center.tolist(), "radius": ob.radius}
        return {"type": "polygon", "points": ob.points.tolist()}

    return {
        "name": scene.name,
        "workspace": {
            "bounds": scene.workspace.bounds.tolist(),
            "obstacles": [obstacle_doc(ob) for ob in scene.workspace.obstacles],
        },
        "robots": [
            {
                "name": r.name,
                "shape": shape_doc(r.shape),
                "space": space_doc(r.space),
                "start": r.start.tolist(),
                "goal": r.goal.tolist(),
            }
            for r in scene.robots
        ],
    }
