"""Toric-code operators on complexes, defect operators on G×G, Wilson loops
and the coboundary-inverse ratio.

Qudits are the 1-cells.  A vertex term A_s is X-type on the 1-cells whose
boundary contains s (exponents from ∂_1); a plaquette term B_p is Z-type on
the boundary of the 2-cell p (exponents from ∂_2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainComplex, Label, cell_distance, graph_complex
from .codes import DEFAULT_BUDGET, BudgetExceeded, _bits, coset_leader_table, _leader
from .graphs import Graph, girth
from .pauli import PauliOp, product
from .ringlin import SparseMat, kernel_basis_mod_p, rank_mod_p, rref_mod_p


def _position(C: ChainComplex, cell, degree: int) -> int:
    if isinstance(cell, (int, np.integer)):
        if not 0 <= cell < C.dims[degree]:
            raise IndexError(f"no {degree}-cell {cell}")
        return int(cell)
    d, k = C.cell_index(cell)
    if d != degree:
        raise ValueError(f"{cell} is a {d}-cell, expected degree {degree}")
    return k


def vertex_operator(C: ChainComplex, s) -> PauliOp:
    """A_s: X-type on the 1-cells incident to the 0-cell s."""
    if C.L < 1:
        raise ValueError("complex has no 1-cells")
    k = _position(C, s, 0)
    return PauliOp.from_support(C.dims[1], x=C.boundaries[0].row_dicts[k], q=C.q)


def plaquette_operator(C: ChainComplex, p) -> PauliOp:
    """B_p: Z-type on the boundary 1-cells of the 2-cell p."""
    if C.L < 2:
        raise ValueError("complex has no 2-cells")
    k = _position(C, p, 2)
    return PauliOp.from_support(C.dims[1], z=C.boundaries[1].col_dicts[k], q=C.q)


def all_vertex_operators(C: ChainComplex) -> list[PauliOp]:
    return [vertex_operator(C, s) for s in range(C.dims[0])]


def all_plaquette_operators(C: ChainComplex) -> list[PauliOp]:
    return [plaquette_operator(C, p) for p in range(C.dims[2])]


# ---------------------------------------------------------------------------
# defect operators on G×G


@dataclass
class DefectOps:
    plaquette: Label
    D: PauliOp
    C: PauliOp
    edge_a: int
    edge_b: int
    i: int
    j: int
    radius: int
    R: list[int]
    T: list[int]
    dR: list[int]
    dT: list[int]
    S: list[Label]
    one_cells: dict[str, Label]

    def to_json(self) -> dict:
        return {
            "plaquette": [list(x) for x in self.plaquette],
            "D": self.D.to_json(), "C": self.C.to_json(),
            "a": self.edge_a, "b": self.edge_b, "i": self.i, "j": self.j,
            "radius": self.radius, "R": self.R, "T": self.T, "dR": self.dR, "dT": self.dT,
            "S": [[list(x) for x in s] for s in self.S],
            "one_cells": {k: [list(x) for x in v] for k, v in self.one_cells.items()},
        }


def _ball(G: Graph, src: int, radius: int, banned_edge: int) -> list[int]:
    dist = G.bfs(src, banned_edge=banned_edge)
    return [v for v in range(G.n) if dist[v] <= radius]


def _edge_boundary(G: Graph, verts: list[int], exclude: int) -> list[int]:
    inside = set(verts)
    return [e for e, (u, v) in enumerate(G.edges) if (u in inside) != (v in inside) and e != exclude]


def defect_ops(CC: ChainComplex, p) -> DefectOps:
    """Operators D and C attached to the square p = a × b of G×G.

    The 1-cells (a, i) and (j, b) of p are chosen with i the smaller
    endpoint of b and j the smaller endpoint of a.  R is the ball of radius
    floor(g/2) around i in G minus the edge b (it contains i), T the ball
    around j in G minus a.  D is X on (a, k) for k in R; C is X on (k, b)
    for k in T, on (c, k) for c in ∂T \\ {a}, k in R, and on (k, c) for
    k in T, c in ∂R \\ {b}.  Then C·D is the product of A_s over S = T×R.
    """
    if CC.factors is None or len(CC.factors) != 2:
        raise ValueError("defect operators need a product of two graphs")
    G1, G2 = CC.factors
    if CC.L != 2:
        raise ValueError("expected a 2-complex")
    k = _position(CC, p, 2)
    lab = CC.labels[2][k]
    (d1, a), (d2, b) = lab
    g = min(girth(G1), girth(G2))
    if math.isinf(g):
        radius = max(G1.n, G2.n)
    else:
        radius = int(g) // 2
    if radius < 1:
        raise ValueError("girth too small to separate the defect supports")
    i = min(G2.edges[b])
    j = min(G1.edges[a])
    R = _ball(G2, i, radius, b)
    T = _ball(G1, j, radius, a)
    dR = _edge_boundary(G2, R, b)
    dT = _edge_boundary(G1, T, a)

    n = CC.dims[1]
    idx = CC._index[1]
    D = PauliOp.from_support(n, x=[idx[((1, a), (0, r))] for r in R])
    cx = [idx[((0, t), (1, b))] for t in T]
    cx += [idx[((1, c), (0, r))] for c in dT for r in R]
    cx += [idx[((0, t), (1, c))] for t in T for c in dR]
    Cop = PauliOp.from_support(n, x=cx)
    S = [((0, t), (0, r)) for t in T for r in R]
    return DefectOps(lab, D, Cop, a, b, i, j, radius, R, T, dR, dT, S,
                     {"(a,i)": ((1, a), (0, i)), "(j,b)": ((0, j), (1, b))})


def anticommuting_plaquettes(CC: ChainComplex, P: PauliOp) -> list[int]:
    return [k for k in range(CC.dims[2]) if not P.commutes(plaquette_operator(CC, k))]


# ---------------------------------------------------------------------------
# Wilson loops


def cycle_basis(G: Graph) -> list[np.ndarray]:
    """Fundamental cycles of a BFS spanning forest, one per non-tree edge.

    Each non-tree edge lies on exactly one basis cycle.
    """
    parent_edge = [-1] * G.n
    seen = [False] * G.n
    tree = set()
    for root in range(G.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        for u in queue:
            for v, e in zip(G.adj[u], G.incident[u]):
                if not seen[v]:
                    seen[v] = True
                    parent_edge[v] = e
                    tree.add(e)
                    queue.append(v)

    def path_to_root(v):
        out = []
        while parent_edge[v] >= 0:
            e = parent_edge[v]
            out.append(e)
            u, w = G.edges[e]
            v = u if w == v else w
        return out

    basis = []
    for e, (u, v) in enumerate(G.edges):
        if e in tree:
            continue
        c = np.zeros(G.num_edges, dtype=np.int64)
        c[e] = 1
        for f in path_to_root(u) + path_to_root(v):
            c[f] ^= 1
        basis.append(c)
    return basis


def wilson_loop(C: ChainComplex, cycle) -> PauliOp:
    """Z-type operator on the support of a 1-cycle."""
    c = np.asarray(cycle, dtype=np.int64)
    if c.shape != (C.dims[1],):
        raise ValueError("cycle has the wrong length")
    if np.any(C.boundaries[0].to_scipy() @ c % C.q):
        raise ValueError("not a cycle: nonzero boundary")
    return PauliOp(C.q, np.zeros_like(c), c)


def wilson_vector(CC: ChainComplex, x, v: int, basis: list[np.ndarray]) -> list[int]:
    """Signs (-1)^{<x, v × c>} for the basis cycles c of the second factor."""
    if CC.factors is None or len(CC.factors) != 2:
        raise ValueError("Wilson vectors need a product of two graphs")
    x = np.asarray(x, dtype=np.int64) % 2
    idx = CC._index[1]
    out = []
    for c in basis:
        par = sum(int(x[idx[((0, v), (1, e))]]) for e in np.nonzero(c)[0])
        out.append(-1 if par % 2 else 1)
    return out


def wilson_distance(s, s2, G: Graph, basis: list[np.ndarray] | None = None,
                    budget: int = DEFAULT_BUDGET) -> int:
    """Fewest edges whose pairings with the basis cycles turn s into s2.

    Edge sets with prescribed pairings form a coset of the cut space, so
    this is a coset-leader weight, found by BFS over the 2^{b1} pairings.
    """
    basis = cycle_basis(G) if basis is None else basis
    if len(s) != len(basis) or len(s2) != len(basis):
        raise ValueError(f"sign vectors need {len(basis)} entries")
    if not basis:
        return 0
    Cyc = np.array(basis, dtype=np.int64)
    dist, _, _ = coset_leader_table(Cyc, budget)
    t = sum(1 << i for i, (a, b) in enumerate(zip(s, s2)) if a != b)
    d = int(dist[t])
    if d < 0:
        raise ArithmeticError("pairing pattern unreachable")
    return d


# ---------------------------------------------------------------------------
# coboundary inverse ratio


@dataclass
class RatioReport:
    ratio: float
    y: list[int]
    coboundary_weight: int
    residual_weight: int
    mode: str
    exact: bool

    def to_json(self) -> dict:
        return {"ratio": "inf" if math.isinf(self.ratio) else self.ratio, "y": self.y,
                "coboundary_weight": self.coboundary_weight,
                "residual_weight": self.residual_weight, "mode": self.mode, "exact": self.exact}


def cocycle_basis(C: ChainComplex) -> list[np.ndarray]:
    """Basis of ker δ on 1-chains (δ = ∂_2^T), over F_2."""
    return kernel_basis_mod_p(C.boundaries[1].T, 2)


def _independent_rows(M: SparseMat) -> np.ndarray:
    R, piv = rref_mod_p(M.T.to_dense() % 2, 2)
    return M.to_dense()[piv] % 2


def min_residual(C: ChainComplex, x, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Lowest-weight element of x + ker δ, by coset-leader BFS over im δ."""
    dT = C.boundaries[1].T
    P = _independent_rows(dT)  # rows spanning δ, one per rank
    dist, parent, cols = coset_leader_table(P, budget)
    s = _bits(P @ np.asarray(x) % 2)
    return _leader(s, parent, cols, C.dims[1])


def coboundary_inverse_ratio(C: ChainComplex, x, mode: str = "exact", seed: int = 0,
                             budget: int = DEFAULT_BUDGET, sweeps: int = 2000) -> RatioReport:
    """|supp δx| / min_y |supp(x + y)| over cocycles y (report only)."""
    if C.q != 2 or C.L < 2:
        raise ValueError("needs a 2-complex over F_2")
    x = np.asarray(x, dtype=np.int64) % 2
    dx = C.boundaries[1].T.to_scipy() @ x % 2
    num = int(np.count_nonzero(dx))
    if mode == "exact":
        rank = rank_mod_p(C.boundaries[1], 2)
        if (1 << rank) > budget:
            raise BudgetExceeded("exact residual search (use mode='anneal')", 1 << rank, budget)
        res = min_residual(C, x, budget)
        exact = True
    elif mode == "anneal":
        res = _anneal(C, x, seed, sweeps)
        exact = False
    else:
        raise ValueError("mode must be 'exact' or 'anneal'")
    y = (x + res) % 2
    den = int(res.sum())
    ratio = math.inf if den == 0 else num / den
    return RatioReport(ratio, y.tolist(), num, den, mode, exact)


def _anneal(C: ChainComplex, x, seed: int, sweeps: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    K = np.array(cocycle_basis(C), dtype=np.int64).reshape(-1, C.dims[1])
    cur = x.copy()
    best = cur.copy()
    if K.shape[0] == 0:
        return best
    for t in range(sweeps):
        temp = max(0.05, 2.0 * (1 - t / sweeps))
        cand = (cur + K[rng.integers(K.shape[0])]) % 2
        delta = int(cand.sum()) - int(cur.sum())
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            cur = cand
            if cur.sum() < best.sum():
                best = cur.copy()
    return best
