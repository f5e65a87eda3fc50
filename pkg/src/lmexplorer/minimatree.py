"""Tree of local minima across bundle levels.

Tree levels are 1-based: the root sits at level 0 with no path, nodes at
tree level k hold minima of bundle level index k-1.  A node's parent is
the lower-level node its optimized projection is deformable into;
level-1 nodes hang under the root.  Sibling sets stay pairwise
non-deformable by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import BundleSequence, project_path
from .pathopt import (
    Optimizer,
    Path,
    ensure_feasible_waypoints,
    is_deformable,
    optimize,
    path_cost,
)
from .roadmap import RoadmapPair, enumerate_shortest_paths, path_waypoints

ENUM_OVERSAMPLE = 8  # enumerate this many times n_paths before raw dedup
RAW_DEDUP_RUNGS = 16  # rung count for deduplicating raw vertex paths


def optimized_projection(
    seq: BundleSequence,
    candidate: Path,
    optimizer: Optimizer,
    rng: np.random.Generator,
) -> Path | None:
    """Project a path one level down, repair discretization damage and
    optimize it; None when the projection cannot be made feasible."""
    level_idx = candidate.level
    lower_space = seq.levels[level_idx - 1]
    w = project_path(seq, level_idx, candidate.waypoints)
    w = ensure_feasible_waypoints(lower_space, w, rng)
    if w is None:
        return None
    return optimize(optimizer, lower_space, Path(level=level_idx - 1, waypoints=w), rng)


@dataclass
class MinimaNode:
    id: str
    level: int  # tree level; 0 = root
    path: Path | None
    cost: float
    parent: str | None
    children: list[str] = field(default_factory=list)
    status: str = "fresh"  # "fresh" | "expanded"
    created_iteration: int = 0


class MinimaTree:
    def __init__(self):
        self.nodes: dict[str, MinimaNode] = {}
        self._counter = 0
        self.root = self._make_node(level=0, path=None, cost=0.0, parent=None, iteration=0)

    def _make_node(self, level: int, path: Path | None, cost: float, parent: str | None, iteration: int) -> MinimaNode:
        node_id = f"n{self._counter}"
        self._counter += 1
        node = MinimaNode(
            id=node_id, level=level, path=path, cost=cost,
            parent=parent, created_iteration=iteration,
        )
        self.nodes[node_id] = node
        if parent is not None:
            self.nodes[parent].children.append(node_id)
        return node

    def add_node(self, level: int, path: Path, cost: float, parent: str, iteration: int) -> MinimaNode:
        return self._make_node(level, path, cost, parent, iteration)

    def node(self, node_id: str) -> MinimaNode:
        return self.nodes[node_id]

    def nodes_at_level(self, level: int) -> list[MinimaNode]:
        return [n for n in self.nodes.values() if n.level == level]

    def sort_children(self, node_id: str) -> None:
        node = self.nodes[node_id]
        node.children.sort(key=lambda cid: (self.nodes[cid].cost, int(cid[1:])))


def assign_parent(
    tree: MinimaTree,
    seq: BundleSequence,
    candidate: Path,
    optimizer: Optimizer,
    rng: np.random.Generator,
    n_rungs: int = 100,
    iteration: int = 0,
    _projected: Path | None = None,
) -> MinimaNode:
    """Node the candidate hangs under: the lower-level minimum its
    optimized projection is deformable into, created recursively (with
    its own parent) when no existing node matches."""
    level_idx = candidate.level  # bundle level index
    if level_idx == 0:
        return tree.root
    lower_space = seq.levels[level_idx - 1]
    if _projected is None:
        _projected = optimized_projection(seq, candidate, optimizer, rng)
    peers = [n for n in tree.nodes_at_level(level_idx) if n.path is not None]
    if _projected is None:
        # projection unrepairable at discretization fidelity (rare);
        # fall back to the cheapest existing peer, deterministically
        if peers:
            return min(peers, key=lambda n: (n.cost, int(n.id[1:])))
        return tree.root  # pragma: no cover - peers exist below any real node
    for node in peers:
        if is_deformable(lower_space, node.path, _projected, n_rungs):
            return node
    parent = assign_parent(tree, seq, _projected, optimizer, rng, n_rungs, iteration)
    node = tree.add_node(
        level=level_idx, path=_projected,
        cost=path_cost(lower_space, _projected),
        parent=parent.id, iteration=iteration,
    )
    tree.sort_children(parent.id)
    return node


def update_tree(
    tree: MinimaTree,
    seq: BundleSequence,
    pair: RoadmapPair,
    parent: MinimaNode,
    optimizer: Optimizer,
    n_paths: int,
    rng: np.random.Generator,
    n_rungs: int = 100,
    iteration: int = 0,
) -> list[str]:
    """Enumerate shortest sparse-graph paths one level above the parent,
    optimize them, drop candidates deformable into existing minima and
    insert the survivors.  Raises NoPathFound when the sparse graph does
    not connect start and goal (tree unchanged)."""
    level_idx = parent.level  # bundle index of the level being updated
    space = seq.levels[level_idx]
    enumerated = enumerate_shortest_paths(pair.sparse, n_paths * ENUM_OVERSAMPLE)
    # The sparse graph carries redundant detour variants of each class;
    # optimizing is costly, so dedup the raw vertex paths first and only
    # optimize up to n_paths distinct representatives.
    raw_reps: list[np.ndarray] = []
    for _, vertex_ids in enumerated:
        w = path_waypoints(pair.sparse, vertex_ids)
        if any(is_deformable(space, rep, w, RAW_DEDUP_RUNGS) for rep in raw_reps):
            continue
        raw_reps.append(w)
        if len(raw_reps) >= n_paths:
            break
    new_ids: list[str] = []
    for waypoints in raw_reps:
        candidate = Path(level=level_idx, waypoints=waypoints)
        candidate = optimize(optimizer, space, candidate, rng)
        target = parent
        if parent.level >= 1:
            projected = optimized_projection(seq, candidate, optimizer, rng)
            if projected is not None and not is_deformable(
                seq.levels[level_idx - 1], parent.path, projected, n_rungs
            ):
                # grew under this parent but converged into another basin
                target = assign_parent(
                    tree, seq, candidate, optimizer, rng, n_rungs, iteration, _projected=projected,
                )
        duplicate = False
        for sibling_id in target.children:
            sibling = tree.nodes[sibling_id]
            if is_deformable(space, sibling.path, candidate, n_rungs):
                duplicate = True
                break
        if duplicate:
            continue
        node = tree.add_node(
            level=parent.level + 1, path=candidate,
            cost=path_cost(space, candidate),
            parent=target.id, iteration=iteration,
        )
        new_ids.append(node.id)
        if target is not parent:
            tree.sort_children(target.id)
    tree.sort_children(parent.id)
    return new_ids


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def snapshot(tree: MinimaTree) -> dict:
    """Serializable tree document; ids are stable within a session and
    snapshots of equal trees are byte-identical once JSON-encoded with
    sorted keys."""
    nodes = []
    for node in tree.nodes.values():
        nodes.append(
            {
                "id": node.id,
                "level": node.level,
                "parent": node.parent,
                "children": list(node.children),
                "status": node.status,
                "cost": node.cost if node.path is not None else None,
                "created_iteration": node.created_iteration,
                "path": node.path.waypoints.tolist() if node.path is not None else None,
            }
        )
    return {"format": "minima-tree/1", "root": tree.root.id, "nodes": nodes}


def load_snapshot(doc: dict) -> MinimaTree:
    tree = MinimaTree()
    tree.nodes.clear()
    max_id = -1
    for nd in doc["nodes"]:
        path = None
        if nd["path"] is not None:
            path = Path(level=nd["level"] - 1, waypoints=np.asarray(nd["path"], dtype=float))
        node = MinimaNode(
            id=nd["id"], level=nd["level"], path=path,
            cost=nd["cost"] if nd["cost"] is not None else 0.0,
            parent=nd["parent"], children=list(nd["children"]),
            status=nd["status"], created_iteration=nd["created_iteration"],
        )
        tree.nodes[node.id] = node
        max_id = max(max_id, int(node.id[1:]))
    tree.root = tree.nodes[doc["root"]]
    tree._counter = max_id + 1
    return tree
