from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaincodes.chain import (ChainComplex, betti, betti_rational, cell_distance, complex_from_matrices,
                              delete_cells, deletion_b2_bound_check, graph_complex, hypergraph_complex,
                              kunneth, point_complex, power, random_complex, random_integral_complex,
                              tensor_product)
from chaincodes.graphs import Graph, named_graph, random_regular
from chaincodes.ringlin import SparseMat

from conftest import dense_rank


def betti_oracle(C: ChainComplex, p: int) -> list[int]:
    ranks = [dense_rank(B.to_dense(), p) if B.rows and B.cols else 0 for B in C.boundaries]
    return [C.dims[i] - (ranks[i - 1] if i >= 1 else 0) - (ranks[i] if i < C.L else 0)
            for i in range(C.L + 1)]


def test_graph_complex_cycle4():
    C = graph_complex(named_graph("cycle(4)"), 2)
    assert list(C.dims) == [4, 4]
    assert betti(C, 2) == [1, 1] == betti_oracle(C, 2)


@pytest.mark.parametrize("name,b1", [("k4", 3), ("petersen", 6)])
def test_graph_b1_matches_degree_formula(name, b1):
    G = named_graph(name)
    d = G.regular_degree()
    assert betti(graph_complex(G, 2), 2) == [1, b1]
    assert b1 == (d - 2) * G.n // 2 + 1 == G.num_edges - G.n + 1


def test_oriented_incidence():
    C = graph_complex(named_graph("path(2)"), 0)
    assert C.boundaries[0].to_dense().tolist() == [[-1], [1]]


def test_hypergraph_complex_examples():
    B = named_graph("complete_bipartite(2,2)")
    C = hypergraph_complex(B, 2)
    assert C.boundaries[0].to_dense().tolist() == [[1, 1], [1, 1]]
    assert betti(C, 2)[1] == 1
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)], left=[0], right=[1, 2, 3])
    assert betti(hypergraph_complex(star, 2), 2) == [2, 0]
    empty = Graph.from_edges(4, [], left=[0, 1], right=[2, 3])
    C = hypergraph_complex(empty, 2)
    assert C.boundaries[0].is_zero() and betti(C, 2)[1] == C.dims[1]


def test_torus_product():
    C = power(graph_complex(named_graph("cycle(3)"), 2), 2)
    assert list(C.dims) == [9, 18, 9]
    assert betti(C, 2) == [1, 2, 1] == betti_oracle(C, 2)
    C3 = power(graph_complex(named_graph("cycle(3)"), 3), 2)
    assert betti(C3, 3) == [1, 2, 1]


def test_k4_powers():
    C = graph_complex(named_graph("k4"), 2)
    assert betti(power(C, 2), 2)[2] == 9
    assert betti(power(C, 3), 2) == [1, 9, 27, 27]
    assert power(C, 1) is C or list(power(C, 1).dims) == list(C.dims)


def test_point_is_unit():
    C = graph_complex(named_graph("petersen"), 2)
    for P in (tensor_product(C, point_complex(2)), tensor_product(point_complex(2), C)):
        assert list(P.dims) == list(C.dims) and betti(P, 2) == betti(C, 2)


def test_betti_rational_lift_must_be_a_complex(k4sq):
    # mod-2 signs are lost, so the lifted square fails ∂∂ = 0 over Z
    with pytest.raises(ArithmeticError):
        betti_rational(k4sq)
    assert betti_rational(power(graph_complex(named_graph("k4"), 0), 2)) == [1, 6, 9]


def test_delete_vertex_from_triangle_gives_path():
    C = graph_complex(named_graph("cycle(3)"), 2)
    D = delete_cells(C, [((0, 0),)])
    assert betti(D, 2) == [1, 0]


def test_delete_vertex_of_k4_square(k4sq):
    lab = k4sq.labels[0][5]
    D = delete_cells(k4sq, [lab])
    assert list(D.dims) == [15, 48 - 6, 36 - 9]
    assert delete_cells(k4sq, []).dims == k4sq.dims


def test_delete_is_idempotent(k4sq):
    lab = k4sq.labels[0][0]
    once = delete_cells(k4sq, [lab])
    assert delete_cells(once, [lab]).dims == once.dims if lab in once.labels[0] else True
    cells = [k4sq.labels[1][3], k4sq.labels[2][7]]
    a = delete_cells(k4sq, cells)
    b = delete_cells(delete_cells(k4sq, cells), [c for c in cells if c in sum(map(list, a.labels), [])])
    assert a.dims == b.dims


def test_deletion_fraction_bound(k4sq):
    rng = np.random.default_rng(0)
    N, d = 4, 3
    for frac in (0.1, 0.25, 0.5):
        m = int(frac * N * N)
        idx = rng.choice(16, m, replace=False)
        D = delete_cells(k4sq, [k4sq.labels[0][i] for i in idx])
        assert k4sq.dims[2] - D.dims[2] <= d * d * m


def test_deletion_check_examples(torus, k4sq):
    rep = deletion_b2_bound_check(torus, [torus.labels[2][0]])
    assert (rep.b2_before, rep.b2_after, rep.holds) == (1, 0, True)
    rng = np.random.default_rng(1)
    for _ in range(10):
        cells = [k4sq.labels[2][i] for i in rng.choice(36, 5, replace=False)]
        rep = deletion_b2_bound_check(k4sq, cells)
        assert rep.holds and rep.b2_after >= 4
    assert deletion_b2_bound_check(k4sq, []).b2_after == 9


def test_cell_distance_examples():
    G = named_graph("cycle(7)")
    CC = power(graph_complex(G, 2), 2)
    a = ((1, 0), (0, 0))
    assert cell_distance(CC, a, a) == 0
    # edges 0 = (0,1) and 1 = (1,2) share vertex 1
    assert cell_distance(CC, ((1, 0), (0, 2)), ((1, 1), (0, 2))) == 1
    assert cell_distance(CC, ((1, 0), (0, 0)), ((1, 0), (0, 3))) == 3


def test_json_round_trip(k4sq):
    C = ChainComplex.from_json(k4sq.to_json())
    assert C.dims == k4sq.dims and C.labels == k4sq.labels
    assert all(a == b for a, b in zip(C.boundaries, k4sq.boundaries))


def test_bad_boundary_rejected():
    d1 = SparseMat.from_dense([[1, 1]], 2)
    d2 = SparseMat.from_dense([[1], [0]], 2)
    with pytest.raises(ArithmeticError):
        complex_from_matrices([d1, d2])


@pytest.mark.parametrize("q", [2, 3, 4, 6])
@pytest.mark.parametrize("name", ["k4", "petersen"])
def test_boundary_squared_zero_for_powers(name, q):
    C = graph_complex(named_graph(name), q)
    for k in (2, 3):
        power(C, k).check_boundary_squared()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_kunneth(seed, p):
    G1 = random_regular(6, 3, seed=seed)
    G2 = named_graph(["k4", "cycle(4)", "petersen"][seed % 3])
    A, B = graph_complex(G1, p), graph_complex(G2, p)
    assert betti(tensor_product(A, B), p) == kunneth(betti(A, p), betti(B, p))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_associativity(seed):
    Gs = [random_regular(4 + 2 * (seed % 2), 3, seed=seed + i) for i in range(3)]
    A, B, C = (graph_complex(G, 2) for G in Gs)
    L = tensor_product(tensor_product(A, B), C)
    R = tensor_product(A, tensor_product(B, C))
    assert L.dims == R.dims and betti(L, 2) == betti(R, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_field_betti_bounds_rational(seed):
    C = random_integral_complex(seed)
    bq = betti_rational(C)
    for p in (2, 3, 5):
        bp = betti(C.reduce(p), p)
        assert all(x >= y for x, y in zip(bp, bq))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_random_complex_is_redundancy_free(seed, q):
    C = random_complex([2, 7, 3], q, seed=seed)
    b = betti(C, q)
    assert b[0] == 0 and b[2] == 0
    assert b == betti_oracle(C, q)
