"""Chain complexes over Z_q built from graphs, hypergraphs and tensor products.

A complex of length L stores dims D_0..D_L and boundaries ∂_1..∂_L with
``boundaries[i - 1] = ∂_i : C_i -> C_{i-1}``.  Every cell carries a label,
a tuple with one ``(degree, index)`` pair per product factor, so a 1-cell
of G×G is ``((1, e), (0, v))`` or ``((0, v), (1, e))``.

Product ordering: the degree-j cells of C×C' are grouped in blocks
C_i ⊗ C'_{j-i} for increasing i, and inside a block the cell (a, b) sits at
``a * D'_{j-i} + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .graphs import Graph
from .ringlin import (
    SparseMat,
    check_prime,
    kernel_basis_mod_p,
    rank_mod_p,
    rational_rank,
)

Label = tuple[tuple[int, int], ...]


def label_degree(label: Label) -> int:
    return sum(d for d, _ in label)


@dataclass(frozen=True, eq=False)
class ChainComplex:
    q: int
    dims: tuple[int, ...]
    boundaries: tuple[SparseMat, ...]
    labels: tuple[tuple[Label, ...], ...]
    factors: tuple[Graph, ...] | None = None
    _checked: bool = field(default=False, repr=False)

    def __post_init__(self):
        if len(self.boundaries) != len(self.dims) - 1:
            raise ValueError("need exactly one boundary map per positive degree")
        if len(self.labels) != len(self.dims):
            raise ValueError("need one label list per degree")
        for i, B in enumerate(self.boundaries, start=1):
            if B.shape != (self.dims[i - 1], self.dims[i]):
                raise ValueError(f"∂_{i} has shape {B.shape}, expected {(self.dims[i - 1], self.dims[i])}")
            if B.q != self.q:
                raise ValueError(f"∂_{i} has modulus {B.q}, complex has {self.q}")
        for i, labs in enumerate(self.labels):
            if len(labs) != self.dims[i]:
                raise ValueError(f"degree {i}: {len(labs)} labels for {self.dims[i]} cells")
            if len(set(labs)) != len(labs):
                raise ValueError(f"degree {i}: duplicate labels")
        if not self._checked:
            self.check_boundary_squared()

    # basic views ----------------------------------------------------------

    @property
    def L(self) -> int:
        return len(self.dims) - 1

    def boundary(self, i: int) -> SparseMat:
        """∂_i, with zero maps outside 1..L."""
        if 1 <= i <= self.L:
            return self.boundaries[i - 1]
        rows = self.dims[i - 1] if 1 <= i <= self.L + 1 else 0
        cols = self.dims[i] if 0 <= i <= self.L else 0
        return SparseMat.zeros(rows, cols, self.q)

    @cached_property
    def _index(self) -> list[dict[Label, int]]:
        return [{lab: k for k, lab in enumerate(labs)} for labs in self.labels]

    def cell_index(self, label: Label) -> tuple[int, int]:
        """(degree, position) of a labelled cell."""
        label = tuple(tuple(x) for x in label)
        deg = label_degree(label)
        if not 0 <= deg <= self.L or label not in self._index[deg]:
            raise KeyError(f"unknown cell {label}")
        return deg, self._index[deg][label]

    def check_boundary_squared(self) -> None:
        for i in range(2, self.L + 1):
            prod = self.boundaries[i - 2].to_scipy() @ self.boundaries[i - 1].to_scipy()
            data = prod.tocoo().data
            if self.q:
                data = data % self.q
            if np.any(data != 0):
                raise ArithmeticError(f"∂_{i - 1}∂_{i} != 0 mod {self.q}")

    def reduce(self, p: int) -> ChainComplex:
        """Reduce coefficients to Z_p (p must divide q, or q = 0)."""
        return ChainComplex(p, self.dims, tuple(B.reduce(p) for B in self.boundaries),
                            self.labels, self.factors)

    def lift(self, kind: str = "signed") -> ChainComplex:
        """Integer lift; raises if it is not a complex over Z."""
        return ChainComplex(0, self.dims, tuple(B.lift(kind) for B in self.boundaries),
                            self.labels, self.factors)

    # serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        obj = {
            "q": self.q,
            "dims": list(self.dims),
            "boundaries": [B.to_json() for B in self.boundaries],
            "labels": [[[list(p) for p in lab] for lab in labs] for labs in self.labels],
        }
        if self.factors is not None:
            obj["factors"] = [G.to_json() for G in self.factors]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> ChainComplex:
        q = int(obj["q"])
        bds = tuple(SparseMat.from_json(b, q) for b in obj["boundaries"])
        labels = tuple(tuple(tuple(tuple(p) for p in lab) for lab in labs) for labs in obj["labels"])
        factors = obj.get("factors")
        if factors is not None:
            factors = tuple(Graph.from_json(g) for g in factors)
        return cls(q, tuple(obj["dims"]), bds, labels, factors)


# ---------------------------------------------------------------------------
# constructors


def point_complex(q: int) -> ChainComplex:
    """One 0-cell and nothing else; the unit of the tensor product."""
    return ChainComplex(q, (1,), (), (((),),), factors=())


def graph_complex(G: Graph, q: int) -> ChainComplex:
    """Cellular complex of a graph: 0-cells are vertices, 1-cells are edges.

    Edge (u, v) with u < v has boundary v - u, reduced mod q (for q = 2 this
    is the unsigned incidence matrix).
    """
    m = G.num_edges
    cols = np.repeat(np.arange(m), 2)
    rows = np.array([x for e in G.edges for x in e], dtype=np.int64)
    vals = np.tile([-1, 1], m)
    d1 = SparseMat.from_arrays(G.n, m, q, rows, cols, vals)
    labels = (tuple(((0, v),) for v in range(G.n)), tuple(((1, e),) for e in range(m)))
    return ChainComplex(q, (G.n, m), (d1,), labels, factors=(G,))


def hypergraph_complex(B: Graph, q: int) -> ChainComplex:
    """Two-term complex of a hypergraph given as a bipartite graph.

    Left vertices become 1-cells and right vertices 0-cells; ∂_1 is the
    biadjacency matrix.
    """
    if not B.is_bipartite:
        raise ValueError("hypergraph complex needs a bipartite graph with a bipartition")
    lpos = {v: k for k, v in enumerate(B.left)}
    rpos = {v: k for k, v in enumerate(B.right)}
    entries = []
    for u, v in B.edges:
        l, r = (u, v) if u in lpos else (v, u)
        entries.append((rpos[r], lpos[l], 1))
    d1 = SparseMat.from_entries(len(B.right), len(B.left), q, entries)
    labels = (tuple(((0, k),) for k in range(len(B.right))),
              tuple(((1, k),) for k in range(len(B.left))))
    return ChainComplex(q, (len(B.right), len(B.left)), (d1,), labels, factors=None)


def complex_from_matrices(mats: Sequence[SparseMat]) -> ChainComplex:
    """Complex with the given boundaries ∂_1, ∂_2, ... and single-factor labels."""
    if not mats:
        raise ValueError("need at least one boundary")
    q = mats[0].q
    dims = (mats[0].rows,) + tuple(M.cols for M in mats)
    labels = tuple(tuple(((i, k),) for k in range(d)) for i, d in enumerate(dims))
    return ChainComplex(q, dims, tuple(mats), labels)


def tensor_product(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """Total complex of C ⊗ D with ∂ = ∂_i ⊗ 1 + (-1)^i 1 ⊗ ∂'."""
    if C.q != D.q:
        raise ValueError(f"modulus mismatch: {C.q} vs {D.q}")
    q, L1, L2 = C.q, C.L, D.L
    L = L1 + L2
    blocks = []  # per total degree: list of (i, offset)
    dims = []
    for j in range(L + 1):
        off, row = 0, {}
        for i in range(max(0, j - L2), min(j, L1) + 1):
            row[i] = off
            off += C.dims[i] * D.dims[j - i]
        blocks.append(row)
        dims.append(off)

    bds = []
    for j in range(1, L + 1):
        rs, cs, vs = [], [], []
        for i, coff in blocks[j].items():
            k = j - i
            if i >= 1:
                m = sp.kron(C.boundary(i).to_scipy(), sp.identity(D.dims[k], dtype=np.int64, format="csr"), format="coo")
                rs.append(m.row + blocks[j - 1][i - 1])
                cs.append(m.col + coff)
                vs.append(m.data)
            if k >= 1:
                m = sp.kron(sp.identity(C.dims[i], dtype=np.int64, format="csr"), D.boundary(k).to_scipy(), format="coo")
                rs.append(m.row + blocks[j - 1][i])
                cs.append(m.col + coff)
                vs.append(m.data * (-1) ** i)
        cat = (lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64))
        bds.append(SparseMat.from_arrays(dims[j - 1], dims[j], q, cat(rs), cat(cs), cat(vs)))

    labels = []
    for j in range(L + 1):
        labs = []
        for i in blocks[j]:
            for a in C.labels[i]:
                for b in D.labels[j - i]:
                    labs.append(a + b)
        labels.append(tuple(labs))
    factors = C.factors + D.factors if C.factors is not None and D.factors is not None else None
    return ChainComplex(q, tuple(dims), tuple(bds), tuple(labels), factors)


def power(C: ChainComplex, k: int) -> ChainComplex:
    """k-fold product C × ... × C, folded from the left."""
    if k < 1:
        raise ValueError("power needs k >= 1")
    out = C
    for _ in range(k - 1):
        out = tensor_product(out, C)
    return out


# ---------------------------------------------------------------------------
# homology


def betti(C: ChainComplex, p: int) -> list[int]:
    """Betti numbers over F_p: b_i = D_i - rank ∂_i - rank ∂_{i+1}."""
    check_prime(p)
    ranks = [0] + [rank_mod_p(B, p) for B in C.boundaries] + [0]
    return [C.dims[i] - ranks[i] - ranks[i + 1] for i in range(C.L + 1)]


def betti_rational(C: ChainComplex, lift: str = "signed") -> list[int]:
    """Betti numbers over Q.

    The complex must be integral: either built with q = 0, or its ``lift``
    must itself satisfy ∂∂ = 0 over Z (checked).
    """
    Z = C if C.q == 0 else C.lift(lift)
    ranks = [0] + [rational_rank(B) for B in Z.boundaries] + [0]
    return [C.dims[i] - ranks[i] - ranks[i + 1] for i in range(C.L + 1)]


def kunneth(b1: Sequence[int], b2: Sequence[int]) -> list[int]:
    """Betti numbers of a product over a field from those of the factors."""
    out = [0] * (len(b1) + len(b2) - 1)
    for i, x in enumerate(b1):
        for j, y in enumerate(b2):
            out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# deletion


def _restrict(C: ChainComplex, keep: list[np.ndarray]) -> ChainComplex:
    bds = tuple(C.boundaries[i - 1].submatrix(keep[i - 1], keep[i]) for i in range(1, C.L + 1))
    labels = tuple(tuple(C.labels[i][k] for k in keep[i]) for i in range(C.L + 1))
    return ChainComplex(C.q, tuple(len(k) for k in keep), bds, labels, C.factors)


def deletion_closure(C: ChainComplex, cells: Iterable[Label]) -> list[set[int]]:
    """Positions removed per degree: the given cells plus every higher cell
    whose boundary touches a removed cell, transitively."""
    gone: list[set[int]] = [set() for _ in range(C.L + 1)]
    for lab in cells:
        d, k = C.cell_index(lab)
        gone[d].add(k)
    for i in range(1, C.L + 1):
        if not gone[i - 1]:
            continue
        rows = C.boundaries[i - 1].row_dicts
        for r in gone[i - 1]:
            gone[i].update(rows[r])
    return gone


def delete_cells(C: ChainComplex, cells: Iterable[Label]) -> ChainComplex:
    """Remove cells together with every higher cell attached to them."""
    gone = deletion_closure(C, cells)
    keep = [np.array([k for k in range(C.dims[i]) if k not in gone[i]], dtype=np.int64)
            for i in range(C.L + 1)]
    return _restrict(C, keep)


@dataclass
class DeletionReport:
    b2_before: int
    b2_after: int
    steps: list[int]
    holds: bool

    def to_json(self) -> dict:
        return {"b2_before": self.b2_before, "b2_after": self.b2_after,
                "steps": self.steps, "holds": self.holds}


def deletion_b2_bound_check(C: ChainComplex, two_cells: Sequence[Label], p: int | None = None) -> DeletionReport:
    """Delete 2-cells one at a time and check that b_2 drops by 0 or 1 each step."""
    if C.L < 2:
        raise ValueError("complex has no 2-cells")
    p = p or (C.q if C.q else 2)
    for lab in two_cells:
        if label_degree(tuple(tuple(x) for x in lab)) != 2:
            raise ValueError(f"{lab} is not a 2-cell")
    cur = C
    b2 = betti(cur, p)[2]
    before, steps, holds = b2, [b2], True
    for lab in two_cells:
        cur = delete_cells(cur, [lab])
        nb = betti(cur, p)[2]
        holds &= (b2 - nb) in (0, 1)
        b2 = nb
        steps.append(b2)
    holds &= b2 >= before - len(two_cells)
    return DeletionReport(before, b2, steps, bool(holds))


# ---------------------------------------------------------------------------
# metric


def _footprint(G: Graph, cell: tuple[int, int]) -> tuple[int, ...]:
    deg, idx = cell
    return (idx,) if deg == 0 else tuple(G.edges[idx])


def cell_distance(C: ChainComplex, a: Label, b: Label) -> int:
    """L-infinity product distance between two cells of a graph power.

    Per factor, the distance is the smallest graph distance between the
    cells' footprints (a vertex or the endpoints of an edge); distinct cells
    are at least 1 apart.
    """
    if not C.factors:
        raise ValueError("complex has no factor graphs; distances undefined")
    a = tuple(tuple(x) for x in a)
    b = tuple(tuple(x) for x in b)
    C.cell_index(a)
    C.cell_index(b)
    if a == b:
        return 0
    best = 0
    for G, ca, cb in zip(C.factors, a, b):
        D = G.distances
        best = max(best, min(D[u, v] for u in _footprint(G, ca) for v in _footprint(G, cb)))
    if not np.isfinite(best):
        raise ValueError("cells lie in different components")
    return max(int(best), 1)


def cell_footprint(C: ChainComplex, label: Label) -> list[tuple[int, ...]]:
    """Per-factor vertex footprint of a cell."""
    return [_footprint(G, c) for G, c in zip(C.factors, label)]


# ---------------------------------------------------------------------------
# random complexes


def _full_rank_rows(rng, rows: int, cols: int, p: int) -> np.ndarray:
    while True:
        a = rng.integers(0, p, size=(rows, cols))
        if rank_mod_p(SparseMat.from_dense(a, p), p) == rows:
            return a


def random_complex(dims: Sequence[int], q: int, seed: int = 0) -> ChainComplex:
    """Random 2-complex over F_q with no redundancy.

    ∂_1 has full row rank D_0 and ∂_2 has full column rank D_2, so both
    stabilizer families of the middle-degree code are independent.
    """
    check_prime(q)
    d0, d1, d2 = dims
    if d0 + d2 > d1:
        raise ValueError("need D_0 + D_2 <= D_1")
    rng = np.random.default_rng(seed)
    a = _full_rank_rows(rng, d0, d1, q)
    K = np.array(kernel_basis_mod_p(SparseMat.from_dense(a, q), q)).reshape(-1, d1)
    r = _full_rank_rows(rng, d2, K.shape[0], q)
    b = (r @ K % q).T
    return complex_from_matrices([SparseMat.from_dense(a, q), SparseMat.from_dense(b, q)])


def random_integral_complex(seed: int = 0, max_dim: int = 4, max_entry: int = 2) -> ChainComplex:
    """Product of two random one-term integer complexes; may carry torsion."""
    rng = np.random.default_rng(seed)

    def one():
        r, c = rng.integers(1, max_dim + 1, size=2)
        return complex_from_matrices([SparseMat.from_dense(
            rng.integers(-max_entry, max_entry + 1, size=(r, c)), 0)])

    return tensor_product(one(), one())
