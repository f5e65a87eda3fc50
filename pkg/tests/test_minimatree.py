import json

import numpy as np
import pytest

from lmexplorer import explorer, minimatree, pathopt
from lmexplorer.minimatree import MinimaTree, load_snapshot, snapshot, update_tree
from lmexplorer.pathopt import Path
from lmexplorer.roadmap import NoPathFound


def test_fresh_tree_root_only():
    tree = MinimaTree()
    doc = snapshot(tree)
    assert doc["root"] == "n0"
    assert len(doc["nodes"]) == 1
    assert doc["nodes"][0]["level"] == 0
    assert doc["nodes"][0]["path"] is None


def test_snapshot_round_trip_bytes():
    tree = MinimaTree()
    tree.add_node(
        level=1,
        path=Path(level=0, waypoints=np.array([[0.0], [1.0]])),
        cost=1.0,
        parent="n0",
        iteration=0,
    )
    doc = snapshot(tree)
    again = snapshot(load_snapshot(doc))
    assert json.dumps(doc, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_ids_stable_and_unique():
    tree = MinimaTree()
    p = Path(level=0, waypoints=np.array([[0.0], [1.0]]))
    ids = [tree.add_node(1, p, float(i), "n0", 0).id for i in range(5)]
    assert ids == ["n1", "n2", "n3", "n4", "n5"]
    assert len(set(ids)) == 5


def test_children_sorted_by_cost():
    tree = MinimaTree()
    p = Path(level=0, waypoints=np.array([[0.0], [1.0]]))
    tree.add_node(1, p, 3.0, "n0", 0)
    tree.add_node(1, p, 1.0, "n0", 0)
    tree.add_node(1, p, 2.0, "n0", 0)
    tree.sort_children("n0")
    costs = [tree.nodes[c].cost for c in tree.root.children]
    assert costs == sorted(costs)


def test_crossing_tree_shape(crossing_session):
    # 1 root + 1 level-1 node + 2 level-2 nodes
    tree = crossing_session.tree
    assert len(tree.nodes_at_level(0)) == 1
    assert len(tree.nodes_at_level(1)) == 1
    assert len(tree.nodes_at_level(2)) == 2
    l1 = tree.nodes_at_level(1)[0]
    for node in tree.nodes_at_level(2):
        assert node.parent == l1.id  # both minima project to the same parent


def test_level1_parent_is_root(crossing_session):
    for node in crossing_session.tree.nodes_at_level(1):
        assert node.parent == crossing_session.tree.root.id


def test_sibling_sets_non_deformable(crossing_session):
    tree = crossing_session.tree
    space = crossing_session.seq.levels[1]
    siblings = tree.nodes_at_level(2)
    for i in range(len(siblings)):
        for j in range(i + 1, len(siblings)):
            assert not pathopt.is_deformable(space, siblings[i].path, siblings[j].path)


def test_edge_rule_holds(crossing_session):
    # optimized projection of each level-2 node deforms into its parent
    tree = crossing_session.tree
    seq = crossing_session.seq
    opt = crossing_session.params.optimizer()
    rng = np.random.default_rng(0)
    for node in tree.nodes_at_level(2):
        projected = minimatree.optimized_projection(seq, node.path, opt, rng)
        parent = tree.nodes[node.parent]
        assert projected is not None
        assert pathopt.is_deformable(seq.levels[0], parent.path, projected.waypoints)


def test_update_tree_n1_caps_children(crossing_scene_doc, crossing_bundle_doc):
    params = explorer.Params(n_paths=1)
    session = explorer.new_session(crossing_scene_doc, crossing_bundle_doc, params, seed=7)
    report = explorer.expand(session, "n0", explorer.SampleBudget(1500))
    assert len(report.new_nodes) <= 1


def test_update_tree_idempotent_on_unchanged_graph(crossing_scene_doc, crossing_bundle_doc):
    session = explorer.new_session(crossing_scene_doc, crossing_bundle_doc, seed=7)
    explorer.expand(session, "n0", explorer.SampleBudget(1500))
    parent = session.tree.nodes["n0"]
    rng = np.random.default_rng(11)
    new_ids = update_tree(
        session.tree, session.seq, session.pairs[0], parent,
        session.params.optimizer(), session.params.n_paths, rng,
    )
    assert new_ids == []  # all candidates deformable into existing children


def test_update_tree_no_path_propagates(crossing_scene_doc, crossing_bundle_doc):
    session = explorer.new_session(crossing_scene_doc, crossing_bundle_doc, seed=7)
    parent = session.tree.nodes["n0"]
    before = len(session.tree.nodes)
    with pytest.raises(NoPathFound):
        update_tree(
            session.tree, session.seq, session.pairs[0], parent,
            session.params.optimizer(), 5, np.random.default_rng(0),
        )
    assert len(session.tree.nodes) == before  # tree unchanged


def test_projected_minimum_monotone(crossing_session):
    # a crossing-disks composite minimum projects to a monotone 1-dof
    # path for the surviving robot
    from lmexplorer.bundle import project_path

    for node in crossing_session.tree.nodes_at_level(2):
        w = project_path(crossing_session.seq, 1, node.path.waypoints)
        steps = np.diff(w[:, 0])
        assert (steps >= -1e-9).all()


def test_assign_parent_k1_root(crossing_scene_doc):
    # single-level bundle: every minimum hangs under the root
    session = explorer.new_session(
        crossing_scene_doc, {"levels": [["disk1", "disk2"]]}, seed=7
    )
    explorer.run_batch(session, "breadth_first", explorer.SampleBudget(2000), max_nodes=2)
    minima = session.tree.nodes_at_level(1)
    assert len(minima) >= 1
    assert all(n.parent == "n0" for n in minima)
