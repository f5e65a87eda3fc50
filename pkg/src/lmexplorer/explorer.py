"""Top-level exploration sessions.

A session owns one roadmap pair per bundle level and the minima tree.
Expanding a node grows the level above it under a termination condition,
cleans reducible faces, and updates the tree below that node.  All
randomness derives from (master seed, iteration), and every expansion is
appended to an event log from which a session can be replayed exactly.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from . import minimatree
from .bundle import BundleSequence, load_bundle
from .minimatree import MinimaTree
from .pathopt import Optimizer
from .roadmap import (
    DenseGraph,
    GrowStats,
    NoPathFound,
    RoadmapPair,
    SamplerParams,
    SparseGraph,
    grow,
    remove_reducible_faces,
)
from .scene import Scene, ValidationError, load_scene, save_scene


class NodeUnknown(KeyError):
    """Expansion request names a node that is not in the tree."""


class LevelExhausted(ValueError):
    """Node already sits at the top level; there is nothing above to grow."""


@dataclass(frozen=True)
class Params:
    """Session parameters; radii are fractions of the level measure."""

    n_paths: int = 5
    delta_frac: float = 0.15
    rho_frac: float = 0.05
    epsilon_frac: float = 1e-3
    p_path: float = 0.5
    k_near: int = 10
    resolution_frac: float = 0.01
    n_rungs: int = 100
    tol_cost: float = 1e-4
    shortcut_attempts: int = 30
    max_rounds: int = 100

    def __post_init__(self):
        if self.n_paths < 1 or self.k_near < 1 or self.n_rungs < 1:
            raise ValidationError("params: counts must be positive")
        for name in ("delta_frac", "rho_frac", "epsilon_frac", "resolution_frac", "tol_cost"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"params.{name}: must be positive")

    def optimizer(self) -> Optimizer:
        return Optimizer(
            shortcut_attempts=self.shortcut_attempts,
            tol_cost=self.tol_cost,
            max_rounds=self.max_rounds,
        )


class SampleBudget:
    """Terminate growth after a fixed number of drawn samples."""

    kind = "samples"

    def __init__(self, budget: int):
        if budget < 0:
            raise ValueError("sample budget must be non-negative")
        self.budget = int(budget)

    def begin(self) -> None:
        pass

    def should_stop(self, stats: GrowStats) -> bool:
        return stats.samples >= self.budget


class TimeBudget:
    """Terminate growth once the wall-clock budget is spent."""

    kind = "seconds"

    def __init__(self, seconds: float):
        if seconds <= 0:
            raise ValueError("time budget must be positive")
        self.seconds = float(seconds)
        self._deadline = 0.0

    def begin(self) -> None:
        self._deadline = time.monotonic() + self.seconds

    def should_stop(self, stats: GrowStats) -> bool:
        return time.monotonic() >= self._deadline


@dataclass
class ExpansionReport:
    node_id: str
    iteration: int
    new_nodes: list[str]
    samples: int
    accepted: int
    sparse_inserted: int
    faces_removed: int
    no_path: bool
    wall_time: float

    def to_dict(self) -> dict:
        return asdict(self)


class Session:
    def __init__(self, scene_doc: dict, bundle_doc, params: Params, seed: int):
        self.scene_doc = scene_doc
        self.bundle_doc = bundle_doc
        self.params = params
        self.seed = int(seed)
        self.scene: Scene = load_scene(scene_doc)
        self.seq: BundleSequence = load_bundle(bundle_doc, self.scene, params.resolution_frac)
        self.pairs: list[RoadmapPair] = []
        for space in self.seq.levels:
            dense = DenseGraph(space, k_near=params.k_near)
            sparse = SparseGraph(space, delta=params.delta_frac * space.measure)
            self.pairs.append(RoadmapPair(space=space, dense=dense, sparse=sparse))
        for level, pair in enumerate(self.pairs):
            start, goal = self.seq.start_goal(level)
            if not pair.space.config_feasible(start):
                raise ValidationError(f"level {level + 1}: start configuration infeasible")
            if not pair.space.config_feasible(goal):
                raise ValidationError(f"level {level + 1}: goal configuration infeasible")
            pair.dense.add(start)
            pair.dense.add(goal)
            pair.sparse.init_endpoints(start, goal)
        self.tree = MinimaTree()
        self.iteration = 0
        self.events: list[dict] = []

    @property
    def depth(self) -> int:
        return self.seq.depth

    def snapshot(self) -> dict:
        return minimatree.snapshot(self.tree)

    def document(self) -> dict:
        """Replay record: inputs plus the event log."""
        return {
            "format": "explorer-session/1",
            "scene": save_scene(self.scene),
            "bundle": self.bundle_doc,
            "params": asdict(self.params),
            "seed": self.seed,
            "events": list(self.events),
        }


def new_session(scene_doc: dict, bundle_doc, params: Params | None = None, seed: int = 0) -> Session:
    return Session(scene_doc, bundle_doc, params or Params(), seed)


def _expansion_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, iteration]))


def expand(session: Session, node_id: str, ptc) -> ExpansionReport:
    """Grow the level above the selected node, clean up the sparse graph
    and update the minima tree under it."""
    tree = session.tree
    if node_id not in tree.nodes:
        raise NodeUnknown(node_id)
    node = tree.nodes[node_id]
    level_idx = node.level  # bundle index of the level to grow
    if level_idx >= session.depth:
        raise LevelExhausted(f"node {node_id} is at the top level")
    rng = _expansion_rng(session.seed, session.iteration)
    pair = session.pairs[level_idx]
    lower_dense = session.pairs[level_idx - 1].dense if level_idx >= 1 else None
    lower_measure = session.seq.levels[level_idx - 1].measure if level_idx >= 1 else 0.0
    sampler = SamplerParams(
        epsilon=session.params.epsilon_frac * lower_measure,
        rho=session.params.rho_frac * lower_measure,
        p_path=session.params.p_path,
    )
    q = node.path.waypoints if node.path is not None else None

    t0 = time.monotonic()
    stats = grow(session.seq, level_idx, pair, lower_dense, q, sampler, ptc, rng)
    faces_removed = remove_reducible_faces(pair.sparse)
    no_path = False
    try:
        new_ids = minimatree.update_tree(
            tree, session.seq, pair, node,
            session.params.optimizer(), session.params.n_paths,
            rng, session.params.n_rungs, session.iteration,
        )
    except NoPathFound:
        new_ids = []
        no_path = True
    node.status = "expanded"
    report = ExpansionReport(
        node_id=node_id,
        iteration=session.iteration,
        new_nodes=new_ids,
        samples=stats.samples,
        accepted=stats.accepted,
        sparse_inserted=stats.sparse_inserted,
        faces_removed=faces_removed,
        no_path=no_path,
        wall_time=time.monotonic() - t0,
    )
    session.events.append(
        {"iteration": session.iteration, "node": node_id, "samples": stats.samples}
    )
    session.iteration += 1
    return report


def run_batch(
    session: Session,
    policy: str = "breadth_first",
    ptc=None,
    max_nodes: int = 16,
) -> dict:
    """Drive expansion without a user: pick the next unexpanded node per
    policy until none remain below the top level or max_nodes expansions
    ran; returns the final tree snapshot."""
    if policy not in ("breadth_first", "best_first"):
        raise ValueError(f"unknown policy {policy!r}")
    ptc = ptc or SampleBudget(2000)
    expansions = 0
    while expansions < max_nodes:
        fresh = [
            n for n in session.tree.nodes.values()
            if n.status == "fresh" and n.level < session.depth
        ]
        if not fresh:
            break
        if policy == "breadth_first":
            nxt = min(fresh, key=lambda n: int(n.id[1:]))
        else:
            nxt = min(fresh, key=lambda n: (n.cost, int(n.id[1:])))
        expand(session, nxt.id, ptc)
        expansions += 1
    return session.snapshot()


def replay(scene_doc: dict, bundle_doc, params: Params, seed: int, events: list[dict]) -> Session:
    """Rebuild a session from its replay record; deterministic given the
    recorded per-expansion sample counts."""
    session = new_session(scene_doc, bundle_doc, params, seed)
    for event in sorted(events, key=lambda e: e["iteration"]):
        expand(session, event["node"], SampleBudget(event["samples"]))
    return session


def replay_document(doc: dict) -> Session:
    params = Params(**doc["params"])
    return replay(doc["scene"], doc["bundle"], params, doc["seed"], doc["events"])
