import itertools

import numpy as np
import pytest

import contsid as cs
from contsid.errors import CycleError, OverlapError, SizeMismatchError

import oracles


def intro_graphs():
    g1, g2, g3, _ = cs.intro_example()
    return g1, g2, g3


# ---------------------------------------------------------------- build_dag

def test_build_intro_graph():
    g = cs.build_dag(3, [(0, 2), (1, 2)])
    assert g.num_nodes == 3
    assert g.edges == frozenset({(0, 2), (1, 2)})
    assert g.parents(2) == {0, 1}
    assert g.children(0) == {2}


def test_build_edgeless():
    g = cs.build_dag(3, [])
    assert g.edges == frozenset()
    assert len(g.topological_order) == 3


def test_two_cycle_rejected():
    with pytest.raises(CycleError):
        cs.build_dag(2, [(0, 1), (1, 0)])


def test_self_loop_rejected():
    with pytest.raises(CycleError):
        cs.build_dag(2, [(1, 1)])


def test_out_of_range_edge():
    with pytest.raises(IndexError):
        cs.build_dag(2, [(0, 2)])


def test_duplicate_edges_collapse():
    g = cs.build_dag(2, [(0, 1), (0, 1)])
    assert g.edges == frozenset({(0, 1)})


def test_random_cyclic_edge_sets_always_raise():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = int(rng.integers(3, 8))
        g = cs.erdos_renyi_dag(p, 0.4, int(rng.integers(10_000)))
        order = g.topological_order
        # close a cycle against the topological order
        tail = order[int(rng.integers(1, p))]
        anc = [v for v in order[:order.index(tail)]]
        head = anc[int(rng.integers(len(anc)))]
        edges = set(g.edges) | {(head, tail), (tail, head)}
        with pytest.raises(CycleError):
            cs.build_dag(p, edges)


def test_dag_immutable():
    g = cs.build_dag(2, [(0, 1)])
    with pytest.raises(AttributeError):
        g.num_nodes = 5


# ----------------------------------------------------------- directed paths

def test_path_intro_edge():
    g1, _, _ = intro_graphs()
    assert cs.has_directed_path(g1, 0, 2)


def test_path_from_sink_absent():
    g1, _, _ = intro_graphs()
    assert not cs.has_directed_path(g1, 2, 0)


def test_path_chain_transitive():
    chain = cs.build_dag(4, [(0, 1), (1, 2), (2, 3)])
    closure = oracles.reachability_closure(chain)
    assert closure[0, 3]
    assert cs.has_directed_path(chain, 0, 3)


def test_path_matches_closure_on_random_graphs():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = int(rng.integers(2, 7))
        g = cs.erdos_renyi_dag(p, 0.4, int(rng.integers(100_000)))
        closure = oracles.reachability_closure(g)
        for i in range(p):
            for j in range(p):
                if i != j:
                    assert cs.has_directed_path(g, i, j) == bool(closure[i, j])


def test_path_out_of_range():
    g = cs.build_dag(2, [(0, 1)])
    with pytest.raises(IndexError):
        cs.has_directed_path(g, 0, 5)


# ------------------------------------------------------------- causal nodes

def test_causal_nodes_single_edge():
    g1, _, _ = intro_graphs()
    assert cs.causal_nodes(g1, 0, 2) == {0, 2}


def test_causal_nodes_no_path():
    g1, _, _ = intro_graphs()
    assert cs.causal_nodes(g1, 1, 0) == frozenset()


def test_causal_nodes_diamond():
    diamond = cs.build_dag(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    on_paths = set()
    for path in oracles.all_directed_paths(diamond, 0, 3):
        on_paths.update(path)
    assert on_paths == {0, 1, 2, 3}
    assert cs.causal_nodes(diamond, 0, 3) == on_paths


def test_causal_nodes_matches_path_enumeration():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = int(rng.integers(3, 6))
        g = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        for i in range(p):
            for j in range(p):
                if i == j:
                    continue
                expected = set()
                for path in oracles.all_directed_paths(g, i, j):
                    expected.update(path)
                assert cs.causal_nodes(g, i, j) == expected


# ------------------------------------------------------- adjustment validity

def test_intro_empty_set_valid():
    g1, _, _ = intro_graphs()
    assert cs.is_valid_adjustment(g1, 0, 2, frozenset())


def test_parent_adjustment_always_valid():
    rng = np.random.default_rng(3)
    for _ in range(60):
        p = int(rng.integers(2, 8))
        g = cs.erdos_renyi_dag(p, 0.4, int(rng.integers(100_000)))
        for i in range(p):
            for j in range(p):
                if i == j or j in g.parents(i):
                    continue
                assert cs.is_valid_adjustment(g, i, j, g.parents(i))


def test_confounded_triple():
    # z -> x, z -> y, x -> y with nodes (z, x, y) = (0, 1, 2)
    g = cs.build_dag(3, [(0, 1), (0, 2), (1, 2)])
    assert not cs.is_valid_adjustment(g, 1, 2, frozenset())
    assert cs.is_valid_adjustment(g, 1, 2, {0})
    # the closed-form laws say the same
    scm = oracles.random_gaussian_scm(g, np.random.default_rng(4))
    law_true = cs.interventional_gaussian(scm, 1, 0.8, 2)
    assert cs.gaussian_rbf_mmd(law_true, cs.adjusted_gaussian(scm, 1, 0.8, 2, []), 1.0) > 1e-6
    assert cs.gaussian_rbf_mmd(law_true, cs.adjusted_gaussian(scm, 1, 0.8, 2, [0]), 1.0) < 1e-12


def test_adjustment_overlap_error():
    g = cs.build_dag(3, [(0, 1)])
    with pytest.raises(OverlapError):
        cs.is_valid_adjustment(g, 0, 1, {0})


def test_adjustment_matches_path_enumeration_oracle():
    rng = np.random.default_rng(5)
    for _ in range(40):
        p = int(rng.integers(3, 6))
        g = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        i, j = (int(v) for v in rng.choice(p, size=2, replace=False))
        rest = [v for v in range(p) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                assert (cs.is_valid_adjustment(g, i, j, z)
                        == oracles.valid_adjustment_by_enumeration(g, i, j, z))


def test_adjustment_matches_closed_form_laws():
    rng = np.random.default_rng(6)
    for trial in range(40):
        p = int(rng.integers(3, 6))
        g = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        i, j = (int(v) for v in rng.choice(p, size=2, replace=False))
        rest = [v for v in range(p) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                assert (cs.is_valid_adjustment(g, i, j, z)
                        == oracles.semantically_valid_adjustment(
                            g, i, j, z, seed=177 + trial))


# --------------------------------------------------------------------- shd

def test_shd_intro_values():
    g1, g2, g3 = intro_graphs()
    assert cs.shd(g1, g2) == 1
    assert cs.shd(g1, g3) == 1


def test_shd_identity():
    g1, _, _ = intro_graphs()
    assert cs.shd(g1, g1) == 0


def test_shd_reversal_plus_deletion():
    a = cs.build_dag(3, [(0, 1), (1, 2)])
    b = cs.build_dag(3, [(1, 0)])
    # direct count over the three unordered pairs: {0,1} reversed, {1,2} deleted
    assert cs.shd(a, b) == 2


def test_shd_is_a_metric():
    rng = np.random.default_rng(7)
    graphs = [cs.erdos_renyi_dag(4, 0.5, s) for s in range(12)]
    for a, b, c in itertools.combinations(graphs, 3):
        assert cs.shd(a, b) == cs.shd(b, a)
        assert cs.shd(a, b) >= 0
        assert (cs.shd(a, b) == 0) == (a.edges == b.edges)
        assert cs.shd(a, c) <= cs.shd(a, b) + cs.shd(b, c)
    del rng


def test_shd_size_mismatch():
    with pytest.raises(SizeMismatchError):
        cs.shd(cs.build_dag(2, []), cs.build_dag(3, []))


# --------------------------------------------------------------------- sid

def test_sid_intro_values():
    g1, g2, g3 = intro_graphs()
    assert cs.sid(g1, g2) == 1
    assert cs.sid(g1, g3) == 1


def test_sid_identity_on_random_graphs():
    for s in range(20):
        g = cs.erdos_renyi_dag(int(2 + s % 5), 0.5, s)
        assert cs.sid(g, g) == 0


def test_sid_is_asymmetric():
    chain = cs.build_dag(3, [(0, 1), (1, 2)])
    empty = cs.build_dag(3, [])
    assert cs.sid(chain, empty) == 3
    assert cs.sid(empty, chain) == 0


def test_sid_range():
    rng = np.random.default_rng(8)
    for _ in range(20):
        p = int(rng.integers(2, 6))
        a = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        b = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        assert 0 <= cs.sid(a, b) <= p * (p - 1)


def test_sid_size_mismatch():
    with pytest.raises(SizeMismatchError):
        cs.sid(cs.build_dag(2, []), cs.build_dag(3, []))


# -------------------------------------------------------------- d-separation

def test_d_separation_chain_fork_collider():
    chain = cs.build_dag(3, [(0, 1), (1, 2)])
    assert not cs.d_separated(chain, 0, 2, frozenset())
    assert cs.d_separated(chain, 0, 2, {1})
    fork = cs.build_dag(3, [(1, 0), (1, 2)])
    assert not cs.d_separated(fork, 0, 2, frozenset())
    assert cs.d_separated(fork, 0, 2, {1})
    collider = cs.build_dag(3, [(0, 1), (2, 1)])
    assert cs.d_separated(collider, 0, 2, frozenset())
    assert not cs.d_separated(collider, 0, 2, {1})


def test_d_separation_collider_descendant_opens():
    g = cs.build_dag(4, [(0, 1), (2, 1), (1, 3)])
    assert cs.d_separated(g, 0, 2, frozenset())
    assert not cs.d_separated(g, 0, 2, {3})


def test_d_separation_matches_path_blocking():
    rng = np.random.default_rng(9)
    for _ in range(60):
        p = int(rng.integers(3, 6))
        g = cs.erdos_renyi_dag(p, 0.5, int(rng.integers(100_000)))
        i, j = (int(v) for v in rng.choice(p, size=2, replace=False))
        rest = [v for v in range(p) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                blocked = all(
                    oracles.path_blocked(g, path, frozenset(z))
                    for path in oracles.all_skeleton_paths(g, i, j)
                )
                assert cs.d_separated(g, i, j, z) == blocked
