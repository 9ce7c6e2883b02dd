from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaincodes.chain import graph_complex, power, random_complex
from chaincodes.codes import extract_code
from chaincodes.graphs import named_graph
from chaincodes.pauli import PauliOp
from chaincodes.stabsim import (CX, CliffordCircuit, Hadamard, Mul, PauliExp, RedundancyError,
                                StabilizerGroup, Swap, canonical_form, conjugate, dense_expectation,
                                dense_reduced_density, dense_stabilizer_state, disentangle_circuit,
                                expectation, gate_from_json, ground_stabilizers, local_subgroup,
                                reduced_state_equal, zero_state)
from chaincodes.toric import all_plaquette_operators, all_vertex_operators, vertex_operator


def dense_unitary(gate, n):
    return np.column_stack([gate.apply(e) for e in np.eye(1 << n, dtype=complex)])


def anti_hermitian(x, z):
    return PauliOp(2, x, z, 1 + int(np.dot(x, z)))


def test_conjugation_identity_removes_vertex_term():
    C = graph_complex(named_graph("path(3)"), 2)
    A = vertex_operator(C, 1)
    Ze = PauliOp.from_support(C.dims[1], z=[0])
    g = PauliExp(Ze * A)
    assert g.conjugate(A) == Ze


def test_commuting_pauli_unchanged():
    Q = anti_hermitian(np.array([1, 0]), np.array([1, 0]))
    P = PauliOp.from_support(2, z=[1])
    assert conjugate(PauliExp(Q), P) == P


def test_iy_conjugation_matches_dense():
    Q = PauliOp(2, [1], [1], 2)  # Z X = iY up to the sign convention; Q^2 = -1
    g = PauliExp(Q)
    P = PauliOp.from_support(1, z=[0])
    U = dense_unitary(g, 1)
    assert np.allclose(U @ P.dense() @ U.conj().T, g.conjugate(P).dense())


def test_pauliexp_rejects_bad_q():
    with pytest.raises(ValueError):
        PauliExp(PauliOp.from_support(2, z=[0]))


ONE_QUBIT = [PauliOp(2, [a], [b], ph) for a in (0, 1) for b in (0, 1) for ph in (0,)]


def two_qubit_gates():
    yield CX(0, 1)
    yield CX(1, 0)
    yield Hadamard(0)
    yield Hadamard(1, 3)
    yield Swap(0, 1)
    for x in itertools.product((0, 1), repeat=2):
        for z in itertools.product((0, 1), repeat=2):
            if any(x) or any(z):
                yield PauliExp(anti_hermitian(np.array(x), np.array(z)))


def test_all_two_qubit_cases_match_dense():
    for g in two_qubit_gates():
        U = dense_unitary(g, 2)
        for x in itertools.product((0, 1), repeat=2):
            for z in itertools.product((0, 1), repeat=2):
                P = PauliOp(2, x, z, int(np.dot(x, z)))
                assert np.allclose(U @ P.dense() @ U.conj().T, g.conjugate(P).dense()), (g, P)
                assert g.inverse().conjugate(g.conjugate(P)) == P


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_conjugation_preserves_commutation(seed):
    rng = np.random.default_rng(seed)
    n = 5
    P1 = PauliOp(2, rng.integers(0, 2, n), rng.integers(0, 2, n))
    P2 = PauliOp(2, rng.integers(0, 2, n), rng.integers(0, 2, n))
    i, j = (int(v) for v in rng.choice(n, 2, replace=False))
    for g in (CX(i, j), Hadamard(i), Swap(i, j)):
        assert P1.commutes(P2) == g.conjugate(P1).commutes(g.conjugate(P2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 5]))
def test_qudit_gates_preserve_symplectic_form(seed, q):
    rng = np.random.default_rng(seed)
    P1 = PauliOp(q, rng.integers(0, q, 4), rng.integers(0, q, 4))
    P2 = PauliOp(q, rng.integers(0, q, 4), rng.integers(0, q, 4))
    a = int(rng.integers(1, q))
    for g in (CX(0, 2, a), Hadamard(1), Mul(3, a, q), Swap(0, 3)):
        assert P1.symplectic(P2) == g.conjugate(P1).symplectic(g.conjugate(P2))
        assert g.inverse().conjugate(g.conjugate(P1)) == P1


def test_gate_json_round_trip():
    for g in list(two_qubit_gates()) + [Mul(0, 2, 5)]:
        h = gate_from_json(g.to_json())
        P = PauliOp(g.q if isinstance(g, Mul) else 2, [1, 0], [1, 1])
        assert h.conjugate(P) == g.conjugate(P)


def test_circuit_rejects_overlapping_layer():
    with pytest.raises(ValueError):
        CliffordCircuit(3, 2, ((CX(0, 1), CX(1, 2)),), 1)


def test_disentangle_torus(torus):
    res = disentangle_circuit(torus, [0])
    assert all(P.is_diagonal() for P in res.final_terms)
    for layer in res.circuit.rounds:
        sup = [q for g in layer for q in g.support]
        assert len(sup) == len(set(sup))
    assert res.circuit.range == res.circuit.depth * res.circuit.max_gate_range
    assert res.rounds_used <= res.n_colors * res.max_distance
    assert len(res.final_terms) == 8 + 9


def test_disentangle_all_seeds_is_empty(torus):
    res = disentangle_circuit(torus, range(9))
    assert res.circuit.depth == 0
    assert len(res.final_terms) == 9


def test_disentangle_path():
    C = graph_complex(named_graph("path(6)"), 2)
    res = disentangle_circuit(C, [0])
    assert all(P.is_diagonal() for P in res.final_terms)
    # one gate per absorbed vertex, each on the edge it came through and the next one
    assert len(res.circuit.gates) == 5
    assert all(len(g.support) <= 2 for g in res.circuit.gates)


def test_disentangle_needs_seed(torus):
    with pytest.raises(ValueError):
        disentangle_circuit(torus, [])


def test_ground_state_expectations(torus):
    g = ground_stabilizers(torus, [0])
    assert all(expectation(g, B) == 1 for B in all_plaquette_operators(torus))
    assert all(expectation(g, A) == 1 for A in all_vertex_operators(torus)[1:])
    # the product of all vertex terms is the identity on a closed surface,
    # so the seed's term is fixed by the other eight
    assert expectation(g, vertex_operator(torus, 0)) == 1
    assert expectation(g, g.generators[0]) == 1


def test_expectation_zero_cases():
    g = StabilizerGroup(2, (PauliOp.from_support(2, x=[0]), PauliOp.from_support(2, x=[1])))
    assert expectation(g, PauliOp.from_support(2, z=[0])) == 0
    h = StabilizerGroup(2, (PauliOp.from_support(2, z=[0]),))
    assert expectation(h, PauliOp.from_support(2, z=[1])) == 0
    assert expectation(h, -PauliOp.from_support(2, z=[0])) == -1


def test_ground_state_dense_agreement(torus):
    res = disentangle_circuit(torus, [0])
    g = ground_stabilizers(torus, [0], res)
    psi = res.circuit.apply_inverse(zero_state(18))
    for P in all_plaquette_operators(torus) + all_vertex_operators(torus):
        assert abs(dense_expectation(psi, P) - expectation(g, P)) < 1e-9


def random_group(rng, n):
    """Random stabilizer group: Z_j conjugated by a random Clifford circuit."""
    gens = [PauliOp.from_support(n, z=[j]) for j in range(n)]
    gens = [-P if rng.random() < 0.5 else P for P in gens]
    gates = []
    for _ in range(20):
        k = rng.integers(3)
        i, j = (int(v) for v in rng.choice(n, 2, replace=False))
        if k == 0:
            gates.append(CX(i, j))
        elif k == 1:
            gates.append(Hadamard(i))
        else:
            Q = anti_hermitian(rng.integers(0, 2, n), rng.integers(0, 2, n))
            if Q.weight:
                gates.append(PauliExp(Q))
    for g in gates:
        gens = [g.conjugate(P) for P in gens]
    return StabilizerGroup(n, tuple(gens))


def test_expectation_vs_dense_random_groups():
    rng = np.random.default_rng(0)
    done = 0
    while done < 50:
        try:
            g = random_group(rng, 6)
        except ValueError:
            continue
        psi = dense_stabilizer_state(g, seed=done)
        for _ in range(10):
            x, z = rng.integers(0, 2, 6), rng.integers(0, 2, 6)
            P = PauliOp(2, x, z, int(x @ z))
            assert abs(dense_expectation(psi, P) - expectation(g, P)) < 1e-9
        done += 1


def test_group_validation():
    with pytest.raises(ValueError):
        StabilizerGroup(1, (PauliOp.from_support(1, x=[0]), PauliOp.from_support(1, z=[0])))
    with pytest.raises(ValueError):
        StabilizerGroup(1, (PauliOp.from_support(1, z=[0]), PauliOp.from_support(1, z=[0])))


def test_reduced_state_examples(torus):
    g = ground_stabilizers(torus, [0])
    far = PauliOp.from_support(18, z=[17])
    region = [0, 1, 2]
    assert reduced_state_equal(g, g.conjugated(far), region) == (not any(
        not P.commutes(far) for P in local_subgroup(g, region)))
    zx = StabilizerGroup(1, (PauliOp.from_support(1, z=[0]),))
    xx = StabilizerGroup(1, (PauliOp.from_support(1, x=[0]),))
    assert not reduced_state_equal(zx, xx, [0])


def test_reduced_state_vs_partial_trace(torus):
    res = disentangle_circuit(torus, [0])
    g = ground_stabilizers(torus, [0], res)
    psi = res.circuit.apply_inverse(zero_state(18))
    rng = np.random.default_rng(1)
    for trial in range(12):
        O = PauliOp.from_support(18, x=[int(rng.integers(18))])
        g2 = g.conjugated(O)
        psi2 = O.apply(psi)
        region = sorted(int(v) for v in rng.choice(18, int(rng.integers(2, 7)), replace=False))
        dense_same = np.allclose(dense_reduced_density(psi, region), dense_reduced_density(psi2, region))
        assert reduced_state_equal(g, g2, region) == dense_same


@pytest.mark.parametrize("q,dims", [(2, [3, 8, 3]), (3, [2, 7, 3]), (5, [3, 8, 2])])
def test_canonical_form(q, dims):
    code = extract_code(random_complex(dims, q, seed=4), 1)
    cf = canonical_form(code)
    hx, hz = cf.H_X.to_dense(), cf.H_Z.to_dense()
    cols = [int(np.flatnonzero(r)[0]) for r in np.vstack([hx, hz])]
    assert all(np.count_nonzero(r) == 1 for r in np.vstack([hx, hz]))
    assert len(set(cols)) == len(cols) == dims[0] + dims[2] <= code.n
    assert not np.any(hx @ hz.T % q)


def test_canonical_form_identity_block():
    from chaincodes.codes import CssCode
    from chaincodes.ringlin import SparseMat
    code = CssCode(2, 3, SparseMat.from_dense([[1, 0, 0]], 2), SparseMat.zeros(0, 3, 2), 1)
    assert canonical_form(code).column_ops == []


def test_canonical_form_refuses_torus(torus_code):
    with pytest.raises(RedundancyError) as e:
        canonical_form(torus_code)
    assert e.value.side == "X" and e.value.witness.tolist() == [1] * 9


def test_statevector_limit():
    with pytest.raises(ValueError):
        zero_state(19)
