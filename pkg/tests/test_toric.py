from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaincodes.chain import cell_distance, graph_complex, power
from chaincodes.graphs import Graph, girth, named_graph
from chaincodes.pauli import product
from chaincodes.toric import (all_plaquette_operators, all_vertex_operators, anticommuting_plaquettes,
                              coboundary_inverse_ratio, cocycle_basis, cycle_basis, defect_ops,
                              plaquette_operator, vertex_operator, wilson_distance, wilson_loop,
                              wilson_vector)


def test_vertex_weights(torus, petersen_sq):
    assert all(A.weight == 4 and A.is_identity_up_to_phase() is False for A in all_vertex_operators(torus))
    assert {A.weight for A in all_vertex_operators(petersen_sq)} == {6}


def test_isolated_vertex_identity():
    C = graph_complex(Graph.from_edges(3, [(0, 1)]), 2)
    assert vertex_operator(C, 2).is_identity_up_to_phase()


def test_plaquettes(torus, petersen_sq):
    assert {B.weight for B in all_plaquette_operators(petersen_sq)} == {4}
    assert product(all_plaquette_operators(torus)).is_identity_up_to_phase()


def test_vertex_plaquette_commute(torus, petersen_sq, k4sq):
    for C in (torus, k4sq, petersen_sq):
        A, B = all_vertex_operators(C), all_plaquette_operators(C)
        assert all(a.commutes(b) for a in A for b in B)


def test_qutrit_vertex_plaquette_commute():
    C = power(graph_complex(named_graph("k4"), 3), 2)
    assert all(a.commutes(b) for a in all_vertex_operators(C) for b in all_plaquette_operators(C))


def test_label_and_position_agree(torus):
    lab = torus.labels[2][4]
    assert plaquette_operator(torus, lab) == plaquette_operator(torus, 4)


def test_defect_ops_sizes(petersen_sq):
    ops = defect_ops(petersen_sq, 0)
    assert ops.radius == 2
    # the ball around i contains i plus (d-1) + (d-1)^2 further vertices
    assert len([r for r in ops.R if r != ops.i]) == 6
    assert ops.D.weight == len(ops.R) == 7


@pytest.mark.parametrize("k", [0, 17, 101, 224])
def test_defect_product_and_pattern(petersen_sq, k):
    ops = defect_ops(petersen_sq, k)
    As = product([vertex_operator(petersen_sq, s) for s in ops.S])
    assert ops.C * ops.D == As
    pc = anticommuting_plaquettes(petersen_sq, ops.C)
    pd = anticommuting_plaquettes(petersen_sq, ops.D)
    assert pc == pd and k in pd


def test_defect_support_near_plaquette(petersen_sq):
    G = named_graph("petersen")
    bound = int(girth(G)) // 2 + 1
    for k in (0, 50, 150):
        ops = defect_ops(petersen_sq, k)
        lab = petersen_sq.labels[2][k]
        for e in set(ops.D.support) | set(ops.C.support):
            assert cell_distance(petersen_sq, lab, petersen_sq.labels[1][e]) <= bound


def test_defect_other_plaquettes_at_tree_distance(petersen_sq):
    """Each other anticommuting plaquette sits on an edge leaving the ball of
    radius floor(g/2) around i in G minus b."""
    ops = defect_ops(petersen_sq, 0)
    pd = anticommuting_plaquettes(petersen_sq, ops.D)
    G = named_graph("petersen")
    dist = G.bfs(ops.i, banned_edge=ops.edge_b)
    for p in pd:
        (d1, e1), (d2, e2) = petersen_sq.labels[2][p]
        if p == 0:
            continue
        assert e1 == ops.edge_a and e2 in ops.dR
        assert max(dist[v] for v in G.edges[e2]) == ops.radius + 1


def test_cycle_basis_and_wilson_loops(torus):
    G = named_graph("petersen")
    B = cycle_basis(G)
    assert len(B) == G.num_edges - G.n + 1
    M = np.zeros((G.n, G.num_edges), dtype=np.int64)
    for k, (u, v) in enumerate(G.edges):
        M[u, k] = M[v, k] = 1
    assert all(not np.any(M @ c % 2) for c in B)
    c = np.zeros(18, dtype=np.int64)
    c[[0, 1, 2]] = 1
    with pytest.raises(ValueError):
        wilson_loop(torus, np.eye(18, dtype=np.int64)[0])


def test_wilson_vector_examples(torus):
    G = named_graph("cycle(3)")
    basis = cycle_basis(G)
    zero = np.zeros(18, dtype=np.int64)
    assert all(wilson_vector(torus, zero, v, basis) == [1] * len(basis) for v in range(3))
    x = zero.copy()
    x[torus.cell_index(((0, 1), (1, 0)))[1]] = 1
    assert wilson_vector(torus, x, 1, basis) == [-1]
    assert wilson_vector(torus, x, 0, basis) == [1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_wilson_vector_coboundary_invariance(seed):
    CC = power(graph_complex(named_graph("petersen"), 2), 2)
    rng = np.random.default_rng(seed)
    basis = cycle_basis(named_graph("petersen"))
    x = rng.integers(0, 2, CC.dims[1])
    f = rng.integers(0, 2, CC.dims[0])
    dx = CC.boundaries[0].T.to_scipy() @ f % 2
    v = int(rng.integers(10))
    assert wilson_vector(CC, x, v, basis) == wilson_vector(CC, (x + dx) % 2, v, basis)


def test_wilson_distance_examples():
    C5 = named_graph("cycle(5)")
    assert wilson_distance([1], [1], C5) == 0
    assert wilson_distance([1], [-1], C5) == 1
    P = named_graph("petersen")
    B = cycle_basis(P)
    Cyc = np.array(B)
    # oracle: enumerate edge sets by weight
    s = [1] * len(B)
    for flip in range(len(B)):
        s2 = list(s)
        s2[flip] = -1
        target = np.array([int(a != b) for a, b in zip(s, s2)])
        want = next(w for w in range(P.num_edges + 1)
                    for E in itertools.combinations(range(P.num_edges), w)
                    if np.array_equal(Cyc[:, list(E)].sum(axis=1) % 2, target))
        assert wilson_distance(s, s2, P, B) == want


def test_ratio_examples(torus):
    x = np.zeros(18, dtype=np.int64)
    x[0] = 1
    r = coboundary_inverse_ratio(torus, x)
    assert (r.coboundary_weight, r.residual_weight, r.ratio) == (2, 1, 2.0)
    y = np.array(cocycle_basis(torus)[0])
    assert coboundary_inverse_ratio(torus, y).ratio == float("inf")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_ratio_exact_is_global_optimum(seed):
    C = power(graph_complex(named_graph("cycle(3)"), 2), 2)
    K = np.array(cocycle_basis(C))
    assert K.shape[0] == 10
    span = np.array([np.array(c) @ K % 2 for c in itertools.product((0, 1), repeat=10)])
    x = np.random.default_rng(seed).integers(0, 2, 18)
    r = coboundary_inverse_ratio(C, x, "exact")
    assert r.residual_weight == int(((x + span) % 2).sum(axis=1).min())
    a = coboundary_inverse_ratio(C, x, "anneal", seed=seed)
    assert a.residual_weight >= r.residual_weight
