from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from chaincodes.ringlin import (SparseMat, from_alist, kernel_basis_mod_p, kernel_count_mod_q,
                                rank_mod_p, rational_rank, rref_mod_p, smith_normal_form,
                                solve_mod_p, to_alist)

from conftest import dense_rank

C4 = SparseMat.from_dense([[1, 0, 0, 1], [1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]], 2)
C4_SIGNED = SparseMat.from_dense([[-1, 0, 0, -1], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, 1]], 0)


@st.composite
def matrices(draw, max_dim=12, primes=(2, 3, 5, 7, 11, 13)):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c), p


# --- SparseMat basics -------------------------------------------------------

def test_construction_reduces_and_sums_duplicates():
    M = SparseMat.from_entries(2, 2, 3, [(0, 0, 2), (0, 0, 2), (1, 1, 3)])
    assert M.entries == ((0, 0, 1),)
    assert M.nnz == 1


def test_strict_constructor_rejects_out_of_range():
    with pytest.raises((ValueError, IndexError)):
        SparseMat(2, 2, 2, [(2, 0, 1)])


def test_transpose_and_product_match_dense():
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 5, (4, 6)), rng.integers(0, 5, (6, 3))
    A, B = SparseMat.from_dense(a, 5), SparseMat.from_dense(b, 5)
    assert np.array_equal((A @ B).to_dense(), a @ b % 5)
    assert np.array_equal(A.T.to_dense(), a.T)


def test_text_and_json_round_trip():
    M = SparseMat.from_dense([[1, 2], [0, 4]], 5)
    assert SparseMat.from_text(M.to_text()) == M
    assert SparseMat.from_json(M.to_json(), 5) == M


def test_reduce_requires_divisibility():
    M = SparseMat.from_dense([[3, 1]], 6)
    assert M.reduce(2).to_dense().tolist() == [[1, 1]]
    assert M.reduce(3).to_dense().tolist() == [[0, 1]]
    with pytest.raises(ValueError):
        M.reduce(5)


def test_signed_lift():
    M = SparseMat.from_dense([[2, 1]], 3)
    assert M.lift("signed").to_dense().tolist() == [[-1, 1]]
    assert M.lift("standard").to_dense().tolist() == [[2, 1]]


# --- rank / kernel / solve --------------------------------------------------

def test_rank_examples():
    assert rank_mod_p(SparseMat.zeros(3, 3, 2), 2) == 0
    assert rank_mod_p(SparseMat.identity(4, 3), 3) == 4
    assert rank_mod_p(C4, 2) == 3


def test_rank_requires_prime():
    with pytest.raises(ValueError):
        rank_mod_p(SparseMat.identity(2, 4), 4)


def test_kernel_examples():
    assert kernel_basis_mod_p(SparseMat.identity(3, 2), 2) == []
    (k,) = kernel_basis_mod_p(C4, 2)
    assert k.tolist() == [1, 1, 1, 1]
    (k,) = kernel_basis_mod_p(SparseMat.from_dense([[1, 1]], 2), 2)
    assert k.tolist() == [1, 1]


def test_solve_examples():
    x = solve_mod_p(SparseMat.identity(3, 5), [1, 4, 2], 5)
    assert x.tolist() == [1, 4, 2]
    # lexicographically smallest of (1,0), (0,1)
    assert solve_mod_p(SparseMat.from_dense([[1, 1]], 2), [1], 2).tolist() == [0, 1]
    # C4^T has column space of even-weight vectors: odd weight is unreachable
    assert solve_mod_p(C4.T, [1, 0, 0, 0], 2) is None


def test_snf_examples():
    assert smith_normal_form(SparseMat.identity(2, 0)) == [1, 1]
    assert smith_normal_form(SparseMat.from_dense([[2]], 0)) == [2]
    assert smith_normal_form(C4_SIGNED) == [1, 1, 1]


def test_snf_matches_sympy_oracle():
    rng = np.random.default_rng(3)
    for _ in range(25):
        a = rng.integers(-3, 4, (rng.integers(1, 6), rng.integers(1, 6)))
        ours = smith_normal_form(SparseMat.from_dense(a, 0))
        want = [abs(int(d)) for d in invariant_factors(Matrix(a), domain=ZZ) if d != 0]
        assert ours == want


def test_rational_rank_and_kernel_count():
    # [[2]] over Z: rank 1, but mod 2 the kernel has 2 elements
    assert rational_rank(SparseMat.from_dense([[2]], 0)) == 1
    assert kernel_count_mod_q(SparseMat.from_dense([[2, 0], [0, 3]], 6)) == 2 * 3


def test_alist_round_trip():
    M = SparseMat.from_dense([[1, 1, 0], [0, 1, 1]], 2)
    assert from_alist(to_alist(M)) == M


# --- properties ---------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity(mp):
    a, p = mp
    M = SparseMat.from_dense(a, p)
    K = kernel_basis_mod_p(M, p)
    assert rank_mod_p(M, p) + len(K) == a.shape[1]
    for k in K:
        assert not np.any(a @ k % p)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_matches_dense_oracle(mp):
    a, p = mp
    assert rank_mod_p(SparseMat.from_dense(a, p), p) == dense_rank(a, p)


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=8, primes=(2, 3, 5)))
def test_rref_pivots_and_solve(mp):
    a, p = mp
    R, piv = rref_mod_p(a, p)
    assert len(piv) == dense_rank(a, p)
    b = a @ np.arange(a.shape[1]) % p
    x = solve_mod_p(SparseMat.from_dense(a, p), b, p)
    assert x is not None and np.array_equal(a @ x % p, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_solve_is_lexicographically_smallest(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, (2, 4))
    b = a @ rng.integers(0, 2, 4) % 2
    x = solve_mod_p(SparseMat.from_dense(a, 2), b, 2)
    sols = [v for v in itertools.product((0, 1), repeat=4) if np.array_equal(a @ v % 2, b)]
    assert tuple(x.tolist()) == min(sols)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_rank_bounded_by_snf(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(-2, 3, (rng.integers(1, 6), rng.integers(1, 6)))
    d = smith_normal_form(SparseMat.from_dense(a, 0))
    for p in (2, 3, 5, 7, 11, 13):
        r = dense_rank(a, p)
        assert r <= len(d)
        if all(x % p for x in d):
            assert r == len(d)
