"""CSS codes extracted from chain complexes, and syndrome-space arguments.

At degree ``q_deg`` the qudits are the q_deg-cells.  X-type checks (vertex
side) are the rows of ∂_{q_deg}; Z-type checks (plaquette side) are the
columns of ∂_{q_deg+1}.  Plaquette syndromes of X errors therefore live in
the column space of ``H_Z``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import mpmath
import numpy as np
from sympy import isprime

from .chain import ChainComplex, betti
from .ringlin import (
    SparseMat,
    kernel_basis_mod_p,
    kernel_count_mod_q,
    rank_mod_p,
    to_alist,
)

DEFAULT_BUDGET = 1 << 24


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the allowed budget."""

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what} needs {required} steps, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True, eq=False)
class CssCode:
    q: int
    n: int
    H_X: SparseMat
    H_Z: SparseMat
    q_deg: int
    source: ChainComplex | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.H_X.cols != self.n or self.H_Z.cols != self.n:
            raise ValueError("check matrices must have n columns")
        prod = (self.H_X.to_scipy() @ self.H_Z.to_scipy().T).tocoo().data % self.q
        if np.any(prod):
            raise ArithmeticError("H_X H_Z^T != 0: checks do not commute")

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "q_deg": self.q_deg,
                "H_X": self.H_X.to_json(), "H_Z": self.H_Z.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> CssCode:
        q = obj["q"]
        return cls(q, obj["n"], SparseMat.from_json(obj["H_X"], q),
                   SparseMat.from_json(obj["H_Z"], q), obj["q_deg"])

    def to_alist(self) -> dict[str, str]:
        return {"H_X": to_alist(self.H_X), "H_Z": to_alist(self.H_Z)}


def extract_code(C: ChainComplex, q_deg: int) -> CssCode:
    """Code on the q_deg-cells; a missing neighbour degree gives an empty check matrix."""
    if not 0 <= q_deg <= C.L:
        raise ValueError(f"degree {q_deg} outside 0..{C.L}")
    H_X = C.boundary(q_deg)
    H_Z = C.boundary(q_deg + 1).T
    return CssCode(C.q, C.dims[q_deg], H_X, H_Z, q_deg, C)


# ---------------------------------------------------------------------------
# parameters


@dataclass
class CodeParams:
    q: int
    n: int
    k: int | None
    rank_X: int | None
    rank_Z: int | None
    redundancy_X: int | None
    redundancy_Z: int | None
    redundancy_X_count: int
    redundancy_Z_count: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def code_params(code: CssCode) -> CodeParams:
    """n, k and the redundancies of both check families.

    For composite q only n and the sizes of the relation modules (via the
    Smith form) are available; k is reported as None.
    """
    q = code.q
    cnt_X = kernel_count_mod_q(code.H_X.T)
    cnt_Z = kernel_count_mod_q(code.H_Z.T)
    if not isprime(q):
        return CodeParams(q, code.n, None, None, None, None, None, cnt_X, cnt_Z)
    rX, rZ = rank_mod_p(code.H_X, q), rank_mod_p(code.H_Z, q)
    k = code.n - rX - rZ
    if code.source is not None:
        b = betti(code.source, q)[code.q_deg]
        if b != k:
            raise ArithmeticError(f"k = {k} disagrees with Betti number {b}")
    return CodeParams(q, code.n, k, rX, rZ, code.H_X.rows - rX, code.H_Z.rows - rZ, cnt_X, cnt_Z)


# ---------------------------------------------------------------------------
# distance


def _bits(v) -> int:
    return int(sum(1 << int(i) for i in np.nonzero(np.asarray(v) % 2)[0]))


def _reduce(v: int, piv: dict[int, int]) -> int:
    while v:
        h = v.bit_length() - 1
        p = piv.get(h)
        if p is None:
            return v
        v ^= p
    return 0


def _insert(v: int, piv: dict[int, int]) -> bool:
    v = _reduce(v, piv)
    if v:
        piv[v.bit_length() - 1] = v
        return True
    return False


def distance_brute(code: CssCode, side: str = "Z", budget: int = DEFAULT_BUDGET) -> int:
    """Minimum weight of a nontrivial logical operator, by full enumeration.

    Side "Z": vectors in ker H_X outside the row space of H_Z; side "X"
    swaps the roles.  The kernel is walked in Gray-code order with the
    basis split into stabilizer and logical parts, so triviality is read
    off from the logical coefficients.
    """
    if code.q != 2:
        raise ValueError("brute-force distance is implemented for q = 2")
    if side == "Z":
        opp, same = code.H_X, code.H_Z
    elif side == "X":
        opp, same = code.H_Z, code.H_X
    else:
        raise ValueError("side must be 'X' or 'Z'")
    kern = kernel_basis_mod_p(opp, 2)
    dim = len(kern)
    if (1 << dim) > budget:
        raise BudgetExceeded("kernel enumeration", 1 << dim, budget)
    piv: dict[int, int] = {}
    basis: list[int] = []
    for r in range(same.rows):
        v = sum(1 << c for c in same.row_support(r))
        if _insert(v, piv):
            basis.append(v)
    n_stab = len(basis)
    for v in kern:
        b = _bits(v)
        if _insert(b, piv):
            basis.append(b)
    if len(basis) != dim:
        raise ArithmeticError("stabilizers do not lie in the opposite kernel")
    if n_stab == dim:
        raise ValueError("code encodes no logical qudits")
    best = None
    v, coef = 0, 0
    logical_mask = ((1 << dim) - 1) ^ ((1 << n_stab) - 1)
    for i in range(1, 1 << dim):
        j = (i & -i).bit_length() - 1
        v ^= basis[j]
        coef ^= 1 << j
        if coef & logical_mask:
            w = v.bit_count()
            if best is None or w < best:
                best = w
    return best


# ---------------------------------------------------------------------------
# syndromes


@dataclass
class SyndromeReport:
    N_p: int
    b2: int
    rank_H_Z: int
    achievable_count: int
    gap_vector: list[int] | None = None
    gap_distance: int | None = None
    min_eig_bprime: int | None = None
    mode: str | None = None
    exact: bool | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _check_census_pre(code: CssCode) -> None:
    if code.q != 2:
        raise ValueError("syndrome counting is implemented for q = 2")
    C = code.source
    if C is None:
        raise ValueError("syndrome census needs the source complex")
    if code.q_deg + 2 <= C.L and C.dims[code.q_deg + 2] > 0:
        raise ValueError(
            f"the complex has {C.dims[code.q_deg + 2]} cells of degree {code.q_deg + 2}; "
            "the count 2^(N_p - b2) assumes there are none")


def syndrome_census(code: CssCode) -> SyndromeReport:
    """Count the achievable plaquette syndromes, 2^rank(H_Z) = 2^(N_p - b2)."""
    _check_census_pre(code)
    N_p = code.H_Z.rows
    r = rank_mod_p(code.H_Z, 2)
    b2 = betti(code.source, 2)[code.q_deg + 1]
    if r != N_p - b2:
        raise ArithmeticError(f"rank H_Z = {r} but N_p - b2 = {N_p - b2}")
    return SyndromeReport(N_p, b2, r, 1 << r)


def syndrome_parity(code: CssCode) -> np.ndarray:
    """Rows spanning the plaquette relations: P with P·H_Z = 0, shape (b2, N_p)."""
    K = kernel_basis_mod_p(code.H_Z.T, 2)
    return np.array(K, dtype=np.int64).reshape(len(K), code.H_Z.rows)


def coset_leader_table(P: np.ndarray, budget: int = DEFAULT_BUDGET):
    """BFS over syndromes of P; returns (dist, parent_bit) arrays indexed by syndrome int."""
    b, N = P.shape
    size = 1 << b
    if size > budget:
        raise BudgetExceeded("coset enumeration", size, budget)
    cols = [_bits(P[:, i]) for i in range(N)]
    dist = np.full(size, -1, dtype=np.int64)
    parent = np.full(size, -1, dtype=np.int64)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        nxt = []
        for i, c in enumerate(cols):
            cand = frontier ^ c
            new = cand[dist[cand] < 0]
            if new.size:
                new = np.unique(new)
                dist[new] = d
                parent[new] = i
                nxt.append(new)
        frontier = np.concatenate(nxt) if nxt else np.zeros(0, dtype=np.int64)
    return dist, parent, cols


def _leader(s: int, parent, cols, N: int) -> np.ndarray:
    v = np.zeros(N, dtype=np.int64)
    while s:
        i = int(parent[s])
        v[i] ^= 1
        s ^= cols[i]
    return v


def _coset_weight(cols: list[int], s: int, max_w: int) -> int | None:
    """Smallest number of columns summing to s, or None if above max_w."""
    if s == 0:
        return 0
    for w in range(1, max_w + 1):
        for combo in itertools.combinations(cols, w):
            acc = 0
            for c in combo:
                acc ^= c
            if acc == s:
                return w
    return None


def syndrome_gap(code: CssCode, mode: str = "exact", seed: int = 0,
                 budget: int = DEFAULT_BUDGET, iterations: int = 200) -> SyndromeReport:
    """A plaquette sign pattern far from every achievable syndrome.

    Exact mode computes the covering radius of the achievable-syndrome code
    by BFS over its 2^b2 cosets and returns a coset leader attaining it.
    Search mode runs a seeded local search and reports a lower bound whose
    per-candidate distances are exact.
    """
    rep = syndrome_census(code)
    N_p = rep.N_p
    P = syndrome_parity(code)
    if rep.b2 == 0:
        v = [0] * N_p
        return SyndromeReport(N_p, 0, rep.rank_H_Z, rep.achievable_count, v, 0, -N_p, mode, True)
    if mode == "exact":
        try:
            dist, parent, cols = coset_leader_table(P, budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded("exact covering radius (use mode='search')", exc.required, budget) from None
        gap = int(dist.max())
        s = int(np.argmax(dist == gap))
        v = _leader(s, parent, cols, N_p)
        return SyndromeReport(N_p, rep.b2, rep.rank_H_Z, rep.achievable_count,
                              v.tolist(), gap, -N_p + 2 * gap, mode, True)
    if mode != "search":
        raise ValueError("mode must be 'exact' or 'search'")
    rng = np.random.default_rng(seed)
    cols = [_bits(P[:, i]) for i in range(N_p)]
    max_w = min(N_p, 8)

    def score(v):
        w = _coset_weight(cols, _bits(P @ v % 2), max_w)
        return -1 if w is None else w

    best_v = rng.integers(0, 2, N_p)
    best = score(best_v)
    cur_v, cur = best_v.copy(), best
    for _ in range(iterations):
        cand = cur_v.copy()
        cand[rng.integers(N_p)] ^= 1
        sc = score(cand)
        if sc >= cur:
            cur_v, cur = cand, sc
            if sc > best:
                best_v, best = cand.copy(), sc
    if best < 0:
        raise ArithmeticError("candidate distance above search limit; raise max weight")
    return SyndromeReport(N_p, rep.b2, rep.rank_H_Z, rep.achievable_count,
                          best_v.tolist(), best, -N_p + 2 * best, mode, False)


def bprime_diagonal(code: CssCode, v_p, x) -> int:
    """<x| B' |x> for B' = -sum_p (-1)^{v_p(p)} B_p and a Z-basis configuration x."""
    s = code.H_Z.to_dense() @ np.asarray(x) % 2
    signs = (-1) ** ((s + np.asarray(v_p)) % 2)
    return int(-signs.sum())


# ---------------------------------------------------------------------------
# entropy bound


@dataclass
class EntropyBound:
    H: float
    lhs: float
    rhs: float
    holds: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def binary_entropy(x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    if x == 0 or x == 1:
        return mpmath.mpf(0)
    return -x * mpmath.log(x) - (1 - x) * mpmath.log(1 - x)


def entropy_bound(N_p: int, b2: int, eps: float, dps: int = 50) -> EntropyBound:
    """Compare N_p·H(eps/2) with b2·ln 2 in extended precision."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    with mpmath.workdps(dps):
        h = binary_entropy(mpmath.mpf(eps) / 2)
        lhs = N_p * h
        rhs = b2 * mpmath.log(2)
        return EntropyBound(float(h), float(lhs), float(rhs), bool(lhs < rhs))
