"""Piecewise-linear paths, the length functional and the local optimizer.

The optimizer combines random shortcutting with a vertex-pull pass and
densification to a fixed resolution; it is the equivalence relation of
the whole workbench: two paths are considered equivalent when their
optimized forms are straight-line deformable (feasible straight rungs
between arc-length-matched points).  An independent multi-start oracle
enumerates minima without roadmaps for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cspace import CompositeSpace


class InfeasibleInput(ValueError):
    """Path violates feasibility and cannot be optimized."""


class EndpointMismatch(ValueError):
    """Deformability is only defined for paths sharing both endpoints."""


class OracleIncomplete(RuntimeError):
    """Too few feasible multi-start seeds could be generated."""


@dataclass(frozen=True)
class Path:
    """Piecewise-linear path in one level's composite space."""

    level: int
    waypoints: np.ndarray  # (n >= 2, dim)

    def __post_init__(self):
        w = np.asarray(self.waypoints, dtype=float)
        if w.ndim != 2 or len(w) < 2:
            raise ValueError("path needs a (n>=2, dim) waypoint array")
        object.__setattr__(self, "waypoints", w)


def path_cost(space: CompositeSpace, path: Path | np.ndarray) -> float:
    """Total length under the space metric (discrete length functional)."""
    w = path.waypoints if isinstance(path, Path) else path
    return float(np.sum(space.consecutive_lengths(w)))


def cumulative_lengths(space: CompositeSpace, w: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(space.consecutive_lengths(w))])


def validate_path(space: CompositeSpace, path: Path, check_segments: bool = True) -> None:
    w = path.waypoints
    if w.shape[1] != space.dimension:
        raise InfeasibleInput(f"waypoint dimension {w.shape[1]} != space dimension {space.dimension}")
    if not space.configs_feasible(w).all():
        raise InfeasibleInput("path has an infeasible waypoint")
    if check_segments:
        for i in range(len(w) - 1):
            if not space.segment_feasible(w[i], w[i + 1]):
                raise InfeasibleInput(f"segment {i} is infeasible")


def resample(space: CompositeSpace, w: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Positions at normalized arc-length parameters ts in [0, 1]."""
    cum = cumulative_lengths(space, w)
    total = cum[-1]
    if total == 0.0:
        return np.tile(w[0], (len(ts), 1))
    targets = np.asarray(ts) * total
    seg = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(w) - 2)
    seg_len = cum[seg + 1] - cum[seg]
    local = np.where(seg_len > 0, (targets - cum[seg]) / np.where(seg_len > 0, seg_len, 1.0), 0.0)
    out = np.empty((len(ts), w.shape[1]))
    for k in range(len(ts)):
        out[k] = space.interpolate(w[seg[k]], w[seg[k] + 1], float(local[k]))
    return out


def point_at(space: CompositeSpace, w: np.ndarray, cum: np.ndarray, s: float) -> tuple[np.ndarray, int]:
    """Config at arc length s plus the index of its segment."""
    if cum[-1] == 0.0:
        return w[0].copy(), 0
    s = min(max(s, 0.0), float(cum[-1]))
    seg = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(w) - 2))
    seg_len = cum[seg + 1] - cum[seg]
    t = 0.0 if seg_len == 0 else (s - cum[seg]) / seg_len
    return space.interpolate(w[seg], w[seg + 1], float(t)), seg


def densify(space: CompositeSpace, w: np.ndarray, h: float) -> np.ndarray:
    """Subdivide segments so none is longer than h."""
    if h <= 0:
        return w
    lens = space.consecutive_lengths(w)
    if not (lens > h).any():
        return w
    pieces = [w[:1]]
    for i, d in enumerate(lens):
        if d > h:
            k = int(math.ceil(d / h))
            ts = np.arange(1, k + 1) / k
            pieces.append(space.interpolate_many(w[i], w[i + 1], ts))
        else:
            pieces.append(w[i + 1: i + 2])
    return np.vstack(pieces)


def _dedup(space: CompositeSpace, w: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = [0]
    for i in range(1, len(w)):
        if space.distance(w[i], w[keep[-1]]) > tol:
            keep.append(i)
    if len(keep) == 1:
        keep.append(0)
    return w[keep]


@dataclass(frozen=True)
class Optimizer:
    """Shortcut + vertex-pull optimizer under the length functional."""

    shortcut_attempts: int = 30
    tol_cost: float = 1e-4  # relative improvement per round
    max_rounds: int = 100
    margin_frac: float = 0.1  # safety margin as a fraction of the check resolution

    def __post_init__(self):
        if self.tol_cost <= 0:
            raise ValueError("tol_cost must be positive")


def optimize(opt: Optimizer, space: CompositeSpace, path: Path, rng: np.random.Generator) -> Path:
    """Drive a feasible path to a fixed point of the optimizer.

    Cost never increases.  All accepted moves keep a small clearance
    margin so the fixed point stays strictly feasible under resampling;
    the result is re-validated before returning.
    """
    validate_path(space, path)
    h = space.resolution
    margin = opt.margin_frac * h
    w = densify(space, path.waypoints.copy(), h)
    prev = path_cost(space, w)
    if prev == 0.0:
        return replace(path, waypoints=w)
    stalled = 0
    for _ in range(opt.max_rounds):
        w = _shortcut_pass(opt, space, w, rng, margin)
        w = _pull_pass(space, w, margin)
        w = densify(space, w, h)
        cur = path_cost(space, w)
        # two consecutive stalled rounds end the descent; the per-round
        # threshold sits well below tol_cost so a single slow round
        # (plateau) cannot stop it and fixed points have headroom
        stalled = stalled + 1 if prev - cur < 0.25 * opt.tol_cost * max(prev, 1e-12) else 0
        prev = cur
        if stalled >= 2:
            break
    out = replace(path, waypoints=w)
    validate_path(space, out)
    return out


def _shortcut_pass(
    opt: Optimizer, space: CompositeSpace, w: np.ndarray, rng: np.random.Generator, margin: float
) -> np.ndarray:
    for _ in range(opt.shortcut_attempts):
        cum = cumulative_lengths(space, w)
        total = float(cum[-1])
        if total <= 0:
            break
        u, v = rng.uniform(0.0, total, size=2)
        if u > v:
            u, v = v, u
        if v - u < 1e-9 * total:
            continue
        a, seg_a = point_at(space, w, cum, u)
        b, seg_b = point_at(space, w, cum, v)
        if seg_b <= seg_a:
            continue
        direct = space.distance(a, b)
        if (v - u) - direct < 1e-12:
            continue  # portion already straight
        if space.segment_feasible(a, b, margin):
            w = _dedup(space, np.vstack([w[: seg_a + 1], a[None], b[None], w[seg_b + 1:]]))
    return w


def _pull_pass(space: CompositeSpace, w: np.ndarray, margin: float) -> np.ndarray:
    w = w.copy()
    for i in range(1, len(w) - 1):
        mid = space.interpolate(w[i - 1], w[i + 1], 0.5)
        if space.distance(w[i], mid) < 1e-12:
            continue
        for alpha in (1.0, 0.5, 0.25):
            cand = space.interpolate(w[i], mid, alpha)
            if space.segment_feasible(w[i - 1], cand, margin) and space.segment_feasible(cand, w[i + 1], margin):
                w[i] = cand
                break
    return w


def is_deformable(
    space: CompositeSpace,
    p1: Path | np.ndarray,
    p2: Path | np.ndarray,
    n_rungs: int = 100,
) -> bool:
    """Sufficient homotopy test: feasible straight rungs between the two
    paths at matched normalized arc-length parameters."""
    w1 = p1.waypoints if isinstance(p1, Path) else np.asarray(p1, dtype=float)
    w2 = p2.waypoints if isinstance(p2, Path) else np.asarray(p2, dtype=float)
    if space.distance(w1[0], w2[0]) > 1e-9 or space.distance(w1[-1], w2[-1]) > 1e-9:
        raise EndpointMismatch("paths must share start and goal")
    ts = np.linspace(0.0, 1.0, n_rungs + 1)
    r1 = resample(space, w1, ts)
    r2 = resample(space, w2, ts)
    # Rungs below the segment-check resolution separate nothing the
    # checker could resolve; optimized paths hug obstacle boundaries
    # within discretization noise, so such rungs count as coincident.
    skip = 0.5 * space.resolution
    for i in range(len(ts)):
        if space.distance(r1[i], r2[i]) <= skip:
            continue
        if not space.segment_feasible(r1[i], r2[i]):
            return False
    return True


def paths_equivalent(
    opt: Optimizer,
    space: CompositeSpace,
    p1: Path,
    p2: Path,
    rng: np.random.Generator,
    n_rungs: int = 100,
) -> bool:
    """Optimize both paths and test deformability of the fixed points."""
    q1 = optimize(opt, space, p1, rng)
    q2 = optimize(opt, space, p2, rng)
    return is_deformable(space, q1, q2, n_rungs)


# ---------------------------------------------------------------------------
# Independent multi-start verification oracle
# ---------------------------------------------------------------------------


def _sample_feasible(space: CompositeSpace, rng: np.random.Generator, tries: int = 200) -> np.ndarray | None:
    for _ in range(tries):
        x = space.sample_uniform(rng)
        if space.config_feasible(x):
            return x
    return None


def _repair_segment(space, a, b, rng, depth: int = 4, tries: int = 20) -> list[np.ndarray] | None:
    """Feasible via-chain between a and b, built by randomized subdivision."""
    if space.segment_feasible(a, b):
        return []
    if depth == 0:
        return None
    radius = 0.5 * space.distance(a, b)
    mid = space.interpolate(a, b, 0.5)
    for _ in range(tries):
        offset = rng.normal(size=space.dimension)
        norm = np.linalg.norm(offset)
        if norm == 0:
            continue
        cand = space.clamp(mid + offset / norm * radius * rng.random())
        if not space.config_feasible(cand):
            continue
        left = _repair_segment(space, a, cand, rng, depth - 1, tries)
        if left is None:
            continue
        right = _repair_segment(space, cand, b, rng, depth - 1, tries)
        if right is None:
            continue
        return left + [cand] + right
    return None


def _random_feasible_path(
    space: CompositeSpace,
    start: np.ndarray,
    goal: np.ndarray,
    n_via: int,
    rng: np.random.Generator,
    attempts: int = 10,
) -> np.ndarray | None:
    for _ in range(attempts):
        vias = []
        ok = True
        for _ in range(n_via):
            v = _sample_feasible(space, rng)
            if v is None:
                ok = False
                break
            vias.append(v)
        if not ok:
            continue
        pts = [start] + vias + [goal]
        repaired: list[np.ndarray] = [start]
        for i in range(len(pts) - 1):
            chain = _repair_segment(space, pts[i], pts[i + 1], rng)
            if chain is None:
                repaired = []
                break
            repaired.extend(chain)
            repaired.append(pts[i + 1])
        if repaired:
            return np.array(repaired)
    return None


def ensure_feasible_waypoints(
    space: CompositeSpace,
    w: np.ndarray,
    rng: np.random.Generator,
    nudge_tries: int = 20,
) -> np.ndarray | None:
    """Repair a nearly-feasible polyline (sub-resolution nudges plus
    segment subdivision) so it satisfies the discretized checks.

    Paths produced by projecting between levels are feasible pointwise
    but can fail re-validation at the lower level's finer resolution;
    the repairs stay local (within the check resolution), so the
    deformation class is preserved.  Returns None when unrepairable."""
    if not space.config_feasible(w[0]) or not space.config_feasible(w[-1]):
        return None
    h = space.resolution
    kept = [w[0]]
    for x in w[1:-1]:
        if space.config_feasible(x):
            kept.append(x)
            continue
        for _ in range(nudge_tries):
            step = rng.normal(size=space.dimension)
            norm = np.linalg.norm(step)
            if norm == 0:
                continue
            cand = space.clamp(x + step / norm * h * rng.random() / space.weights)
            if space.config_feasible(cand):
                kept.append(cand)
                break
        # unrepairable waypoints are dropped; the segment repair below
        # restores connectivity
    kept.append(w[-1])
    out = [kept[0]]
    for i in range(len(kept) - 1):
        a, b = kept[i], kept[i + 1]
        if not space.segment_feasible(a, b):
            chain = _repair_segment(space, a, b, rng)
            if chain is None:
                return None
            out.extend(chain)
        out.append(b)
    return np.array(out)


def multistart_oracle(
    space: CompositeSpace,
    start: np.ndarray,
    goal: np.ndarray,
    n_starts: int,
    n_via: int,
    rng: np.random.Generator,
    opt: Optimizer | None = None,
    n_rungs: int = 100,
    level: int = 0,
) -> list[Path]:
    """Cluster optimized random restarts by deformability; returns one
    minimal-cost representative per cluster, sorted by cost.

    Independent of roadmaps and bundles by construction."""
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    opt = opt or Optimizer()
    reps: list[Path] = []
    made = 0
    for _ in range(n_starts):
        w = _random_feasible_path(space, start, goal, n_via, rng)
        if w is None:
            continue
        made += 1
        candidate = optimize(opt, space, Path(level=level, waypoints=w), rng)
        placed = False
        for i, rep in enumerate(reps):
            if is_deformable(space, rep, candidate, n_rungs):
                if path_cost(space, candidate) < path_cost(space, rep):
                    reps[i] = candidate
                placed = True
                break
        if not placed:
            reps.append(candidate)
    if made < n_starts / 2:
        raise OracleIncomplete(f"only {made}/{n_starts} feasible seeds generated")
    return sorted(reps, key=lambda p: path_cost(space, p))


# ---------------------------------------------------------------------------
# Trajectory sampling and analysis
# ---------------------------------------------------------------------------


def sample_trajectory(space: CompositeSpace, path: Path, n_steps: int = 200) -> np.ndarray:
    """Configurations at n_steps uniform time steps (time = arc length)."""
    ts = np.linspace(0.0, 1.0, n_steps)
    return resample(space, path.waypoints, ts)


def robot_trajectories(space: CompositeSpace, path: Path, n_steps: int = 200) -> dict[int, np.ndarray]:
    """Per-robot workspace poses [x, y, theta] along the animated path."""
    configs = sample_trajectory(space, path, n_steps)
    out: dict[int, list] = {r: [] for r in space.active_robots}
    for x in configs:
        for robot, px, py, theta in space.robot_poses(x):
            out[robot].append((px, py, theta))
    return {r: np.array(v) for r, v in out.items()}


def relative_winding(space: CompositeSpace, path: Path, robot_a: int, robot_b: int, n_steps: int = 400) -> float:
    """Total rotation (radians) of the vector from robot_a to robot_b
    along the animated path; its sign is the pairwise crossing invariant."""
    traj = robot_trajectories(space, path, n_steps)
    rel = traj[robot_b][:, :2] - traj[robot_a][:, :2]
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    steps = np.diff(ang)
    steps = (steps + math.pi) % TWO_PI - math.pi
    return float(np.sum(steps))


TWO_PI = 2.0 * math.pi


def crossing_order(space: CompositeSpace, path: Path, robot_a: int, robot_b: int, n_steps: int = 400) -> int:
    """Which robot clears the shared crossing first, read off the
    relative winding of the animated trajectory: -1 when robot_a goes
    first, +1 when robot_b does, 0 when the pair never really interacts
    (total winding below a quarter turn)."""
    w = relative_winding(space, path, robot_a, robot_b, n_steps)
    if abs(w) < math.pi / 2:
        return 0
    return -1 if w < 0 else 1
