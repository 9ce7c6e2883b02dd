"""Generalized Pauli operators in exponent form.

An operator is ``i^phase * X^x Z^z`` (tensor product over qudits, X applied
after Z on each site).  For q = 2 the phase is tracked exactly; for q > 2
only the exponent vectors are kept and ``phase`` stays 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np
import scipy.sparse as sp

DENSE_MATRIX_LIMIT = 1 << 12
SPARSE_MATRIX_LIMIT = 1 << 20


@dataclass(frozen=True, eq=False)
class PauliOp:
    q: int
    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64) % self.q
        z = np.asarray(self.z, dtype=np.int64) % self.q
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z must be vectors of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", self.phase % 4 if self.q == 2 else 0)

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls, n: int, q: int = 2) -> PauliOp:
        return cls(q, np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))

    @classmethod
    def from_support(cls, n: int, x: Iterable = (), z: Iterable = (), q: int = 2, phase: int = 0) -> PauliOp:
        """Build from qudit lists or {qudit: exponent} maps."""
        xs, zs = np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)
        for arr, src in ((xs, x), (zs, z)):
            items = src.items() if isinstance(src, dict) else ((i, 1) for i in src)
            for i, e in items:
                arr[i] += e
        return cls(q, xs, zs, phase)

    # views ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def support(self) -> list[int]:
        return np.nonzero(self.x | self.z)[0].tolist()

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity_up_to_phase(self) -> bool:
        return not self.x.any() and not self.z.any()

    def is_diagonal(self) -> bool:
        return not self.x.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOp):
            return NotImplemented
        return (self.q == other.q and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    __hash__ = None

    def same_up_to_phase(self, other: PauliOp) -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __repr__(self) -> str:
        if self.q == 2:
            letters = "".join("IXZY"[a + 2 * b] for a, b in zip(self.x, self.z))
            return f"PauliOp(i^{self.phase} {letters})"
        return f"PauliOp(q={self.q}, x={self.x.tolist()}, z={self.z.tolist()})"

    # algebra ---------------------------------------------------------------

    def __mul__(self, other: PauliOp) -> PauliOp:
        if self.q != other.q or self.n != other.n:
            raise ValueError("incompatible Pauli operators")
        phase = 0
        if self.q == 2:
            # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
            phase = self.phase + other.phase + 2 * int(self.z @ other.x)
        return PauliOp(self.q, self.x + other.x, self.z + other.z, phase)

    def __neg__(self) -> PauliOp:
        if self.q != 2:
            raise ValueError("signs are not tracked for q > 2")
        return PauliOp(2, self.x, self.z, self.phase + 2)

    def symplectic(self, other: PauliOp) -> int:
        """<x1, z2> - <z1, x2> mod q; zero iff the operators commute."""
        return int(self.x @ other.z - self.z @ other.x) % self.q

    def commutes(self, other: PauliOp) -> bool:
        return self.symplectic(other) == 0

    def dagger(self) -> PauliOp:
        if self.q != 2:
            return PauliOp(self.q, -self.x, -self.z)
        return PauliOp(2, self.x, self.z, -self.phase + 2 * int(self.x @ self.z))

    def is_hermitian(self) -> bool:
        return self.q == 2 and (self.phase - int(self.x @ self.z)) % 2 == 0

    @property
    def sign(self) -> int:
        """For Hermitian q = 2 operators: +1 or -1 relative to the canonical
        Hermitian Pauli with the same exponents (Y = i X Z)."""
        if not self.is_hermitian():
            raise ValueError("sign is defined for Hermitian operators")
        return 1 if (self.phase - int(self.x @ self.z)) % 4 == 0 else -1

    def restrict(self, qudits) -> PauliOp:
        idx = np.asarray(list(qudits), dtype=np.int64)
        return PauliOp(self.q, self.x[idx], self.z[idx], self.phase)

    # exchange ------------------------------------------------------------

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n,
                "x": [[int(i), int(self.x[i])] for i in np.nonzero(self.x)[0]],
                "z": [[int(i), int(self.z[i])] for i in np.nonzero(self.z)[0]],
                "phase": self.phase}

    @classmethod
    def from_json(cls, obj: dict) -> PauliOp:
        return cls.from_support(obj["n"], dict(obj["x"]), dict(obj["z"]), obj["q"], obj.get("phase", 0))

    # dense oracle ----------------------------------------------------------

    def dense(self) -> np.ndarray:
        """Explicit matrix; qudit 0 is the most significant tensor factor."""
        if self.q ** self.n > DENSE_MATRIX_LIMIT:
            raise ValueError(f"{self.n} qudits is too large for a dense matrix")
        X, Z = shift_matrix(self.q), clock_matrix(self.q)
        mats = [np.linalg.matrix_power(X, int(a)) @ np.linalg.matrix_power(Z, int(b))
                for a, b in zip(self.x, self.z)]
        out = reduce(np.kron, mats, np.ones((1, 1), dtype=complex))
        return (1j ** self.phase) * out

    def sparse(self):
        """Matrix as scipy CSR: X^x Z^z |k> = w^{z.k} |k + x>, qudit 0 most significant."""
        if self.q ** self.n > SPARSE_MATRIX_LIMIT:
            raise ValueError(f"{self.n} qudits is too large for an explicit matrix")
        q, n = self.q, self.n
        k = np.arange(q ** n)
        digits = (k[:, None] // q ** np.arange(n - 1, -1, -1)[None, :]) % q
        zk = digits @ self.z % q
        tgt = ((digits + self.x[None, :]) % q) @ (q ** np.arange(n - 1, -1, -1))
        vals = (1j ** self.phase) * np.exp(2j * np.pi * zk / q)
        return sp.csr_matrix((vals, (tgt, k)), shape=(q ** n, q ** n))

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Action on a qubit statevector without forming the matrix."""
        if self.q != 2:
            raise ValueError("statevector action is implemented for qubits")
        n = self.n
        k = np.arange(1 << n)
        xm = sum(1 << (n - 1 - j) for j in np.nonzero(self.x)[0])
        zm = sum(1 << (n - 1 - j) for j in np.nonzero(self.z)[0])
        par = np.zeros(k.shape, dtype=np.int64)
        t = k & zm
        while np.any(t):
            par ^= t & 1
            t >>= 1
        out = np.empty(psi.shape, dtype=complex)
        out[k ^ xm] = (1j ** self.phase) * np.where(par, -1, 1) * psi
        return out


def shift_matrix(q: int) -> np.ndarray:
    """X|j> = |j+1 mod q>."""
    return np.roll(np.eye(q, dtype=complex), 1, axis=0)


def clock_matrix(q: int) -> np.ndarray:
    """Z|j> = w^j |j>, w = exp(2 pi i / q)."""
    return np.diag(np.exp(2j * np.pi * np.arange(q) / q))


def product(ops: Iterable[PauliOp], n: int | None = None, q: int = 2) -> PauliOp:
    ops = list(ops)
    if not ops:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliOp.identity(n, q)
    return reduce(lambda a, b: a * b, ops)
