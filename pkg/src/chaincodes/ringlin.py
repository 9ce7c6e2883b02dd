"""Exact sparse linear algebra over Z_q.

A modulus of ``0`` denotes plain integer entries; this is how signed integer
lifts of boundary maps are carried around.


Ranks over F_p use sparse elimination with a Markowitz-style pivot choice
(fewest nonzeros in the pivot row, then in the pivot column, ties broken
lexicographically).  Over F_2 rows are packed into Python ints instead.
Kernels and solves use dense row reduction, which is plenty at desk scale.
"""

from __future__ import annotations

import io
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from sympy import isprime

RATIONAL_PRIMES = (2, 3, 5, 7, 11, 13, 10007)
SNF_CROSSCHECK_LIMIT = 200


class SparseMat:
    """Sparse matrix over Z_q (``q == 0`` means over Z).

    Entries are kept as parallel int64 arrays sorted by (row, col); the
    ``entries`` property exposes them as ``(row, col, value)`` triples.
    Instances are treated as immutable.
    """

    __slots__ = ("rows", "cols", "q", "_r", "_c", "_v", "__dict__")

    def __init__(self, rows: int, cols: int, q: int, entries: Iterable[Sequence[int]] = (), *, _arrays=None):
        if q == 1 or q < 0:
            raise ValueError(f"modulus must be 0 (integers) or >= 2, got {q}")
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.rows, self.cols, self.q = int(rows), int(cols), int(q)
        if _arrays is not None:
            self._r, self._c, self._v = _arrays
            return
        e = np.array(list(entries), dtype=np.int64).reshape(-1, 3)
        r, c, v = e[:, 0], e[:, 1], e[:, 2]
        bad = (r < 0) | (r >= rows) | (c < 0) | (c >= cols)
        if bad.any():
            k = int(np.argmax(bad))
            raise ValueError(f"entry ({r[k]}, {c[k]}) outside {rows}x{cols}")
        bad = (v == 0) | ((v < 0) | (v >= q) if q else False)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise ValueError(f"entry ({r[k]}, {c[k]}) = {v[k]} is not a reduced nonzero value")
        key = r * max(cols, 1) + c
        order = np.argsort(key, kind="stable")
        key = key[order]
        if key.size > 1 and np.any(key[1:] == key[:-1]):
            k = int(np.argmax(key[1:] == key[:-1]))
            raise ValueError(f"duplicate entry ({key[k] // max(cols, 1)}, {key[k] % max(cols, 1)})")
        self._r, self._c, self._v = r[order], c[order], v[order]

    # construction -----------------------------------------------------

    @classmethod
    def from_entries(cls, rows: int, cols: int, q: int, entries: Iterable[Sequence[int]]) -> SparseMat:
        """Build a matrix, summing duplicate positions and reducing mod q."""
        e = np.array(list(entries), dtype=np.int64).reshape(-1, 3)
        return cls.from_arrays(rows, cols, q, e[:, 0], e[:, 1], e[:, 2])

    @classmethod
    def from_arrays(cls, rows: int, cols: int, q: int, r, c, v) -> SparseMat:
        """Like :meth:`from_entries` but from index/value arrays."""
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if r.size and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise ValueError(f"entry outside {rows}x{cols}")
        key = r * max(cols, 1) + c
        uk, inv = np.unique(key, return_inverse=True)
        vals = np.zeros(uk.shape, dtype=np.int64)
        np.add.at(vals, inv, v)
        if q:
            vals %= q
        keep = vals != 0
        uk, vals = uk[keep], vals[keep]
        w = max(cols, 1)
        return cls(rows, cols, q, _arrays=(uk // w, uk % w, vals))

    @classmethod
    def from_dense(cls, a, q: int) -> SparseMat:
        a = np.asarray(a, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rr, cc = np.nonzero(a)
        return cls.from_arrays(a.shape[0], a.shape[1], q, rr, cc, a[rr, cc])

    @classmethod
    def from_scipy(cls, m, q: int) -> SparseMat:
        m = m.tocoo()
        return cls.from_arrays(m.shape[0], m.shape[1], q, m.row, m.col, m.data)

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> SparseMat:
        return cls(rows, cols, q)

    @classmethod
    def identity(cls, n: int, q: int) -> SparseMat:
        i = np.arange(n)
        return cls(n, n, q, _arrays=(i, i.copy(), np.ones(n, dtype=np.int64)))

    # views --------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self._v.size)

    @cached_property
    def entries(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(zip(self._r.tolist(), self._c.tolist(), self._v.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMat):
            return NotImplemented
        return (self.shape == other.shape and self.q == other.q
                and np.array_equal(self._r, other._r) and np.array_equal(self._c, other._c)
                and np.array_equal(self._v, other._v))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseMat({self.rows}x{self.cols}, q={self.q}, nnz={self.nnz})"

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        a[self._r, self._c] = self._v
        return a

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self._v, (self._r, self._c)), shape=self.shape, dtype=np.int64)

    @cached_property
    def row_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    @cached_property
    def col_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for r, c, v in self.entries:
            out[c][r] = v
        return out

    def row_support(self, r: int) -> list[int]:
        return sorted(self.row_dicts[r])

    def col_support(self, c: int) -> list[int]:
        return sorted(self.col_dicts[c])

    def is_zero(self) -> bool:
        return self.nnz == 0

    # algebra -------------------------------------------------------------

    @property
    def T(self) -> SparseMat:
        return SparseMat.from_arrays(self.cols, self.rows, self.q, self._c, self._r, self._v)

    def __matmul__(self, other: SparseMat) -> SparseMat:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.q != other.q:
            raise ValueError(f"modulus mismatch {self.q} vs {other.q}")
        return SparseMat.from_scipy(self.to_scipy() @ other.to_scipy(), self.q)

    def scale(self, s: int) -> SparseMat:
        return SparseMat.from_arrays(self.rows, self.cols, self.q, self._r, self._c, s * self._v)

    def reduce(self, p: int) -> SparseMat:
        """Reduce entries to Z_p.

        Only valid when this is an integer matrix or p divides the modulus,
        so that reduction is a ring homomorphism.
        """
        if self.q and self.q % p:
            raise ValueError(f"cannot reduce a Z_{self.q} matrix mod {p}")
        return SparseMat.from_arrays(self.rows, self.cols, p, self._r, self._c, self._v)

    def lift(self, kind: str = "standard") -> SparseMat:
        """Integer lift: representatives {0..q-1} or, with ``kind='signed'``, (-q/2, q/2]."""
        if self.q == 0:
            return self
        if kind == "standard":
            return SparseMat(self.rows, self.cols, 0, _arrays=(self._r, self._c, self._v))
        if kind == "signed":
            v = np.where(self._v > self.q // 2, self._v - self.q, self._v)
            return SparseMat(self.rows, self.cols, 0, _arrays=(self._r, self._c, v))
        raise ValueError(f"unknown lift {kind!r}")

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> SparseMat:
        rmap = np.full(self.rows, -1, dtype=np.int64)
        cmap = np.full(self.cols, -1, dtype=np.int64)
        rmap[np.asarray(row_idx, dtype=np.int64)] = np.arange(len(row_idx))
        cmap[np.asarray(col_idx, dtype=np.int64)] = np.arange(len(col_idx))
        nr, nc = rmap[self._r], cmap[self._c]
        keep = (nr >= 0) & (nc >= 0)
        return SparseMat.from_arrays(len(row_idx), len(col_idx), self.q, nr[keep], nc[keep], self._v[keep])

    # text exchange -----------------------------------------------------

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.rows} {self.cols} {self.q}\n")
        for r, c, v in self.entries:
            buf.write(f"{r} {c} {v}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> SparseMat:
        lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines or len(lines[0]) != 3:
            raise ValueError("missing 'rows cols q' header")
        rows, cols, q = map(int, lines[0])
        entries = []
        for ln in lines[1:]:
            if len(ln) != 3:
                raise ValueError(f"bad triple line: {' '.join(ln)!r}")
            entries.append(tuple(map(int, ln)))
        return cls.from_entries(rows, cols, q, entries)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [list(e) for e in self.entries]}

    @classmethod
    def from_json(cls, obj: dict, q: int) -> SparseMat:
        return cls.from_entries(obj["rows"], obj["cols"], q, obj["entries"])


# ---------------------------------------------------------------------------
# helpers


def check_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise ValueError(f"{p} is not prime")


def _entries_mod(M: SparseMat, p: int):
    if M.q and M.q != p and M.q % p:
        raise ValueError(f"entries of a Z_{M.q} matrix are not reducible mod {p}")
    for r, c, v in M.entries:
        v %= p
        if v:
            yield r, c, v


def dense_mod(M: SparseMat, p: int) -> np.ndarray:
    a = np.zeros(M.shape, dtype=np.int64)
    for r, c, v in _entries_mod(M, p):
        a[r, c] = v
    return a


def _rank_gf2(M: SparseMat) -> int:
    rows = [0] * M.rows
    for r, c, _ in _entries_mod(M, 2):
        rows[r] |= 1 << c
    pivots: dict[int, int] = {}
    for row in sorted(rows, key=lambda x: (bin(x).count("1"), x)):
        while row:
            low = row & -row
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = row
                break
            row ^= piv
    return len(pivots)


def _rank_sparse(M: SparseMat, p: int) -> int:
    rows: dict[int, dict[int, int]] = {}
    colmap: dict[int, set[int]] = {}
    for r, c, v in _entries_mod(M, p):
        rows.setdefault(r, {})[c] = v
        colmap.setdefault(c, set()).add(r)
    rank = 0
    while rows:
        # Markowitz: shortest row, then sparsest column in it, lexicographic ties
        r = min(rows, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(r)
        if not prow:
            continue
        c = min(prow, key=lambda j: (len(colmap[j]), j))
        inv = pow(prow[c], -1, p)
        for j in prow:
            colmap[j].discard(r)
        for r2 in sorted(colmap[c]):
            row2 = rows[r2]
            f = row2[c] * inv % p
            for j, v in prow.items():
                nv = (row2.get(j, 0) - f * v) % p
                if nv:
                    if j not in row2:
                        colmap[j].add(r2)
                    row2[j] = nv
                elif j in row2:
                    del row2[j]
                    colmap[j].discard(r2)
        rank += 1
    return rank


def rank_mod_p(M: SparseMat, p: int) -> int:
    """Rank of M over F_p."""
    check_prime(p)
    if M.nnz == 0:
        return 0
    if p == 2:
        return _rank_gf2(M)
    return _rank_sparse(M, p)


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a dense matrix over F_p; returns (R, pivot columns)."""
    R = np.array(a, dtype=np.int64) % p
    m, n = R.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = R[row] * pow(int(R[row, col]), -1, p) % p
        others = np.nonzero(R[:, col])[0]
        others = others[others != row]
        if others.size:
            R[others] = (R[others] - np.outer(R[others, col], R[row])) % p
        pivots.append(col)
        row += 1
    return R, pivots


def _kernel_from_rref(R: np.ndarray, pivots: list[int], n: int, p: int) -> list[np.ndarray]:
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-R[i, f]) % p
        basis.append(v)
    return basis


def kernel_basis_mod_p(M: SparseMat, p: int) -> list[np.ndarray]:
    """Basis of the right kernel of M over F_p, one vector per free column."""
    check_prime(p)
    R, pivots = rref_mod_p(dense_mod(M, p), p)
    return _kernel_from_rref(R, pivots, M.cols, p)


def solve_mod_p(M: SparseMat, b, p: int) -> np.ndarray | None:
    """Lexicographically smallest x with M x = b over F_p, or None."""
    check_prime(p)
    b = np.asarray(b, dtype=np.int64)
    if b.shape != (M.rows,):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({M.rows},)")
    aug = np.concatenate([dense_mod(M, p), (b % p)[:, None]], axis=1)
    R, pivots = rref_mod_p(aug, p)
    if M.cols in pivots:
        return None
    x = np.zeros(M.cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, M.cols]
    kern = _kernel_from_rref(R[:, : M.cols], pivots, M.cols, p)
    if not kern:
        return x
    # reduced echelon kernel basis in natural column order, then clear leads greedily
    K, leads = rref_mod_p(np.array(kern), p)
    for i, lead in enumerate(leads):
        x = (x - x[lead] * K[i]) % p
    return x


# ---------------------------------------------------------------------------
# Smith normal form over Z


def smith_normal_form(M: SparseMat, lift: str = "standard") -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of the integer lift of M."""
    L = M.lift(lift)
    a = [[0] * M.cols for _ in range(M.rows)]
    for r, c, v in L.entries:
        a[r][c] = int(v)
    return _snf_diagonal(a, M.rows, M.cols)


def _snf_diagonal(a: list[list[int]], m: int, n: int) -> list[int]:
    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero |entry| in the trailing block as pivot
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    f = a[i][t] // piv
                    if f:
                        ri, rt = a[i], a[t]
                        for j in range(t, n):
                            if rt[j]:
                                ri[j] -= f * rt[j]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    f = a[t][j] // piv
                    if f:
                        for i in range(t, m):
                            if a[i][t]:
                                a[i][j] -= f * a[i][t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # divisibility of the trailing block by the pivot
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                rt, rb = a[t], a[bad]
                for j in range(t, n):
                    rt[j] += rb[j]
                continue
            # move the smallest remaining entry of row/col t into the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def rational_rank(M: SparseMat, lift: str = "standard") -> int:
    """Rank over Q of the integer lift of M.

    Maximum of the F_p ranks over a fixed prime set; cross-checked against
    the Smith normal form when the matrix is at most 200x200.
    """
    L = M.lift(lift)
    r = max(rank_mod_p(L, p) for p in RATIONAL_PRIMES)
    if max(M.rows, M.cols) <= SNF_CROSSCHECK_LIMIT:
        snf = len(smith_normal_form(L))
        if snf != r:
            raise ArithmeticError(f"multi-prime rank {r} disagrees with Smith form rank {snf}")
    return r


def kernel_count_mod_q(M: SparseMat) -> int:
    """Number of vectors v over Z_q with M v = 0 (composite q allowed)."""
    q = M.q
    if q == 0:
        raise ValueError("kernel over Z is infinite")
    d = smith_normal_form(M)
    count = q ** (M.cols - len(d))
    for f in d:
        count *= np.gcd(f, q).item()
    return count


# ---------------------------------------------------------------------------
# alist interchange (binary parity-check matrices)


def to_alist(M: SparseMat) -> str:
    """MacKay alist text for a binary matrix (1-based indices, zero padded)."""
    if M.q != 2:
        raise ValueError("alist format is for binary matrices")
    cols = [M.col_support(c) for c in range(M.cols)]
    rows = [M.row_support(r) for r in range(M.rows)]
    cw = max((len(c) for c in cols), default=0)
    rw = max((len(r) for r in rows), default=0)
    out = [f"{M.cols} {M.rows}", f"{cw} {rw}",
           " ".join(str(len(c)) for c in cols), " ".join(str(len(r)) for r in rows)]
    out += [" ".join(str(i + 1) for i in c + [-1] * (cw - len(c))) for c in cols]
    out += [" ".join(str(i + 1) for i in r + [-1] * (rw - len(r))) for r in rows]
    return "\n".join(out) + "\n"


def from_alist(text: str) -> SparseMat:
    tok = [list(map(int, ln.split())) for ln in text.splitlines() if ln.strip()]
    ncols, nrows = tok[0]
    entries = []
    for c, line in enumerate(tok[4:4 + ncols]):
        entries += [(r - 1, c, 1) for r in line if r > 0]
    M = SparseMat.from_entries(nrows, ncols, 2, entries)
    check = [[x - 1 for x in line if x > 0] for line in tok[4 + ncols:4 + ncols + nrows]]
    if check and check != [M.row_support(r) for r in range(nrows)]:
        raise ValueError("alist row and column lists disagree")
    return M
