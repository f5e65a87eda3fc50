"""Per-level roadmaps: dense exploration graph and sparse visibility graph.

Growth draws component-restricted samples (uniform at the base level,
biased near the selected lower-level minimum above it), inserts feasible
ones into the dense graph via k-nearest wiring and into the sparse graph
under coverage/connectivity/interface criteria with visibility radius
delta.  The sparse graph feeds deterministic bounded best-first
enumeration of simple paths.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .bundle import BundleSequence, lift_config, sample_fibers
from .cspace import CompositeSpace
from .pathopt import cumulative_lengths, is_deformable, point_at


class NoPathFound(RuntimeError):
    """Start and goal are in different sparse-graph components."""


@dataclass(frozen=True)
class SamplerParams:
    """Absolute sampling radii for one level (already scaled by the
    level measure) and the path-bias probability."""

    epsilon: float
    rho: float
    p_path: float = 0.5

    def __post_init__(self):
        if self.epsilon < 0 or self.rho < 0:
            raise ValueError("radii must be non-negative")
        if not 0.0 <= self.p_path <= 1.0:
            raise ValueError("p_path must be in [0, 1]")


class _PointStore:
    def __init__(self, dim: int):
        self._buf = np.empty((64, max(dim, 1)))
        self._dim = dim
        self.n = 0

    def append(self, x: np.ndarray) -> int:
        if self.n == len(self._buf):
            self._buf = np.vstack([self._buf, np.empty_like(self._buf)])
        self._buf[self.n, : self._dim] = x
        self.n += 1
        return self.n - 1

    @property
    def coords(self) -> np.ndarray:
        return self._buf[: self.n, : self._dim]

    def __getitem__(self, i: int) -> np.ndarray:
        return self._buf[i, : self._dim]


class DenseGraph:
    """Exploration graph: every sample kept, wired to nearest neighbors."""

    def __init__(self, space: CompositeSpace, k_near: int = 10):
        self.space = space
        self.k_near = k_near
        self._store = _PointStore(space.dimension)
        self.edges: list[tuple[int, int, float]] = []

    @property
    def n_vertices(self) -> int:
        return self._store.n

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def coords(self) -> np.ndarray:
        return self._store.coords

    def add(self, x: np.ndarray) -> int:
        """Insert a feasible config, wiring feasible segments to up to
        k_near nearest existing vertices."""
        n = self._store.n
        if n:
            dists = self.space.distances_to(x, self.coords)
            order = np.argsort(dists, kind="stable")[: self.k_near]
        idx = self._store.append(x)
        if n:
            for j in order:
                j = int(j)
                if self.space.segment_feasible(x, self._store[j]):
                    self.edges.append((j, idx, float(dists[j])))
        return idx


class SparseGraph:
    """Visibility-sparse graph used for path enumeration.

    A sample mutates the graph when (coverage) no existing vertex within
    delta is visible from it, kept edge-free; (connectivity) it sees
    vertices of at least two distinct connected components within delta,
    wired to every visible vertex; or (interface) its two nearest
    visible vertices lack a direct edge, in which case that edge is
    added when feasible and otherwise the sample joins as a bridge
    between them.  The interface rule is what lets alternative routes
    around obstacles appear as cycles; without it the graph stays a
    forest and only a single path could ever be enumerated.
    """

    def __init__(self, space: CompositeSpace, delta: float):
        self.space = space
        self.delta = delta
        self._store = _PointStore(space.dimension)
        self.graph = nx.Graph()
        self.start: int | None = None
        self.goal: int | None = None

    @property
    def n_vertices(self) -> int:
        return self._store.n

    @property
    def coords(self) -> np.ndarray:
        return self._store.coords

    def vertex(self, i: int) -> np.ndarray:
        return self._store[i]

    def add_guard(self, x: np.ndarray) -> int:
        idx = self._store.append(x)
        self.graph.add_node(idx)
        return idx

    def init_endpoints(self, start: np.ndarray, goal: np.ndarray) -> None:
        self.start = self.add_guard(start)
        self.goal = self.add_guard(goal)

    def try_add(self, x: np.ndarray) -> bool:
        if self._store.n == 0:
            self.add_guard(x)
            return True
        dists = self.space.distances_to(x, self.coords)
        near = [int(i) for i in np.argsort(dists, kind="stable") if dists[i] <= self.delta]
        visible = [i for i in near if i in self.graph and self.space.segment_feasible(x, self._store[i])]
        if not visible:
            self.add_guard(x)
            return True
        comp_of = self._component_map()
        if len({comp_of[i] for i in visible}) >= 2:
            idx = self.add_guard(x)
            for i in visible:
                self.graph.add_edge(idx, i, length=self.space.distance(x, self._store[i]))
            return True
        if len(visible) >= 2:
            u, v = visible[0], visible[1]  # nearest two, distance order
            if not self.graph.has_edge(u, v):
                if self.space.segment_feasible(self._store[u], self._store[v]):
                    self.graph.add_edge(u, v, length=self.space.distance(self._store[u], self._store[v]))
                else:
                    idx = self.add_guard(x)
                    for i in (u, v):
                        self.graph.add_edge(idx, i, length=self.space.distance(x, self._store[i]))
                return True
        return False

    def _component_map(self) -> dict[int, int]:
        comp_of = {}
        for cid, comp in enumerate(sorted(nx.connected_components(self.graph), key=min)):
            for v in comp:
                comp_of[v] = cid
        return comp_of

    def connected(self) -> bool:
        return (
            self.start is not None
            and self.goal is not None
            and nx.has_path(self.graph, self.start, self.goal)
        )

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.graph.edges())


@dataclass
class RoadmapPair:
    space: CompositeSpace
    dense: DenseGraph
    sparse: SparseGraph


@dataclass
class GrowStats:
    samples: int = 0
    accepted: int = 0
    sparse_inserted: int = 0


# ---------------------------------------------------------------------------
# Component restriction sampling
# ---------------------------------------------------------------------------


def _perturb(space: CompositeSpace, x: np.ndarray, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the metric ball of the given radius around x."""
    d = space.dimension
    if radius <= 0 or d == 0:
        return x
    v = rng.normal(size=d)
    norm = np.linalg.norm(v)
    r = radius * rng.random() ** (1.0 / d)
    if norm == 0:
        return x
    step = (v / norm * r) / space.weights  # back to native units
    return space.clamp(x + step)


def sample_base(
    lower_space: CompositeSpace,
    lower_dense: DenseGraph,
    q_waypoints: np.ndarray,
    params: SamplerParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Biased base-level sample: along the selected minimum (probability
    p_path, rho-perturbed) or on a uniformly chosen dense edge; either
    branch epsilon-perturbed and clamped to bounds."""
    use_path = True
    if lower_dense is not None and lower_dense.n_edges > 0:
        use_path = rng.random() < params.p_path
    if use_path:
        cum = cumulative_lengths(lower_space, q_waypoints)
        s = rng.uniform(0.0, float(cum[-1])) if cum[-1] > 0 else 0.0
        x, _ = point_at(lower_space, q_waypoints, cum, s)
        x = _perturb(lower_space, x, params.rho, rng)
    else:
        i = int(rng.integers(lower_dense.n_edges))
        a, b, _ = lower_dense.edges[i]
        t = float(rng.random())
        x = lower_space.interpolate(lower_dense._store[a], lower_dense._store[b], t)
    return lower_space.clamp(_perturb(lower_space, x, params.epsilon, rng))


def component_restriction_sampling(
    seq: BundleSequence,
    level: int,
    lower_dense: DenseGraph | None,
    q_waypoints: np.ndarray | None,
    params: SamplerParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample levels[level]: uniform at the base level, otherwise a biased
    base sample lifted with uniform per-component fiber draws.  The
    result may be infeasible; the caller filters."""
    space = seq.levels[level]
    if level == 0:
        return space.sample_uniform(rng)
    if q_waypoints is None:
        raise ValueError("levels above the base need a selected lower minimum")
    xb = sample_base(seq.levels[level - 1], lower_dense, q_waypoints, params, rng)
    fibers = sample_fibers(seq, level, rng)
    return lift_config(seq, level, xb, fibers)


def grow(
    seq: BundleSequence,
    level: int,
    pair: RoadmapPair,
    lower_dense: DenseGraph | None,
    q_waypoints: np.ndarray | None,
    params: SamplerParams,
    ptc,
    rng: np.random.Generator,
) -> GrowStats:
    """Repeat {sample, filter, insert dense, insert sparse} until the
    termination condition fires.  Infeasible samples are discarded
    silently but still counted against the budget."""
    stats = GrowStats()
    ptc.begin()
    while not ptc.should_stop(stats):
        x = component_restriction_sampling(seq, level, lower_dense, q_waypoints, params, rng)
        stats.samples += 1
        if not pair.space.config_feasible(x):
            continue
        stats.accepted += 1
        pair.dense.add(x)
        if pair.sparse.try_add(x):
            stats.sparse_inserted += 1
    return stats


# ---------------------------------------------------------------------------
# Sparse-graph cleanup and path enumeration
# ---------------------------------------------------------------------------


def _vertex_reducible(sparse: SparseGraph, w: int, n_rungs: int) -> bool:
    """True when every 2-hop route through w has a direct edge between
    its endpoints that the detour is straight-line deformable into, so
    removing w cannot lose a path class."""
    g = sparse.graph
    nbrs = sorted(g.neighbors(w))
    for i in range(len(nbrs)):
        for j in range(i + 1, len(nbrs)):
            a, b = nbrs[i], nbrs[j]
            if not g.has_edge(a, b):
                return False
            direct = np.vstack([sparse.vertex(a), sparse.vertex(b)])
            detour = np.vstack([sparse.vertex(a), sparse.vertex(w), sparse.vertex(b)])
            if not is_deformable(sparse.space, direct, detour, n_rungs):
                return False
    return True


def remove_reducible_faces(sparse: SparseGraph, n_rungs: int = 16) -> int:
    """Drop common neighbors of edges whose detours are straight-line
    deformable to the direct edges.  Start/goal are never removed, no
    removal may disconnect them, and a vertex only goes when all its
    2-hop routes have deformable bypasses (so alternative path classes
    survive the cleanup).  Returns the number of removed vertices."""
    space = sparse.space
    g = sparse.graph
    protected = {sparse.start, sparse.goal}
    removed_total = 0
    while True:
        removed = False
        for u, v in sparse.edge_list():
            if u not in g or v not in g or not g.has_edge(u, v):
                continue
            for w in sorted(set(g.neighbors(u)) & set(g.neighbors(v))):
                if w in protected or w not in g:
                    continue
                if not _vertex_reducible(sparse, w, n_rungs):
                    continue
                was_connected = sparse.connected()
                saved = [(w, nb, g.edges[w, nb]["length"]) for nb in g.neighbors(w)]
                g.remove_node(w)
                if was_connected and not sparse.connected():
                    g.add_node(w)
                    for a, b, length in saved:
                        g.add_edge(a, b, length=length)
                    continue
                removed = True
                removed_total += 1
        if not removed:
            return removed_total


def enumerate_shortest_paths(
    sparse: SparseGraph,
    n_paths: int,
    cost_factor: float = 3.0,
    max_expansions: int = 10_000,
) -> list[tuple[float, list[int]]]:
    """Up to n_paths loop-free start-goal vertex paths, cheapest first.

    Best-first enumeration of simple paths ordered by cost plus an
    admissible metric lower bound, pruned at cost_factor times the
    shortest path cost and capped at max_expansions expanded partial
    paths.  The heap order guarantees the returned paths are the true
    cheapest ones even when the cap fires; ties break on lexicographic
    vertex order, so the result is deterministic given the graph.
    """
    g = sparse.graph
    start, goal = sparse.start, sparse.goal
    if start is None or goal is None or not nx.has_path(g, start, goal):
        raise NoPathFound("start and goal are not connected in the sparse graph")
    shortest = nx.dijkstra_path_length(g, start, goal, weight="length")
    bound = cost_factor * shortest + 1e-12
    lb = sparse.space.distances_to(sparse.vertex(goal), sparse.coords)

    results: list[tuple[float, tuple[int, ...]]] = []
    heap: list[tuple[float, float, tuple[int, ...]]] = [(float(lb[start]), 0.0, (start,))]
    expansions = 0
    while heap and expansions < max_expansions and len(results) < n_paths:
        _, cost, trail = heapq.heappop(heap)
        expansions += 1
        v = trail[-1]
        if v == goal:
            results.append((cost, trail))
            continue
        for nb in sorted(g.neighbors(v)):
            if nb in trail:
                continue
            ncost = cost + g.edges[v, nb]["length"]
            bound_est = ncost + lb[nb]
            if bound_est > bound:
                continue
            heapq.heappush(heap, (bound_est, ncost, trail + (nb,)))
    return [(cost, list(trail)) for cost, trail in results]


def path_waypoints(sparse: SparseGraph, vertex_ids: list[int]) -> np.ndarray:
    return np.array([sparse.vertex(i) for i in vertex_ids])
