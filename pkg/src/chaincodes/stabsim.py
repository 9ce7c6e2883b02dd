"""Stabilizer and Clifford machinery on exponent vectors.

Gates act on :class:`PauliOp` by conjugation ``P -> U P U^dagger``.  For
qubits phases are exact.  For q > 2 only the symplectic data is updated.

The disentangling circuit grows a set of "absorbed" vertices from a seed
set.  For a 1-cell e = (s, s') with s absorbed and s' not, the gate
exp(pi/4 Z_e A_{s'}) turns the term A_{s'} into Z_e and leaves every other
term of the Hamiltonian alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from .chain import ChainComplex, cell_distance
from .codes import CssCode
from .pauli import PauliOp, product
from .ringlin import SparseMat, check_prime, kernel_basis_mod_p, rank_mod_p
from .toric import all_plaquette_operators, vertex_operator

STATEVECTOR_LIMIT = 18


# ---------------------------------------------------------------------------
# gates


@dataclass(frozen=True, eq=False)
class PauliExp:
    """exp(sign * pi/4 * Q) for an anti-Hermitian Pauli product Q with Q^2 = -1."""

    Q: PauliOp
    sign: int = 1
    kind: str = field(default="pauli_exp", init=False)

    def __post_init__(self):
        if self.Q.q != 2:
            raise ValueError("Pauli exponentials need exact phases; only q = 2 is supported")
        sq = self.Q * self.Q
        if not (sq.is_identity_up_to_phase() and sq.phase == 2):
            raise ValueError("Q must square to -1")

    @property
    def support(self) -> list[int]:
        return self.Q.support

    def conjugate(self, P: PauliOp) -> PauliOp:
        if P.commutes(self.Q):
            return P
        out = self.Q * P
        return out if self.sign > 0 else -out

    def inverse(self) -> PauliExp:
        return PauliExp(self.Q, -self.sign)

    def to_json(self) -> dict:
        return {"kind": self.kind, "support": self.support,
                "parameters": {"Q": self.Q.to_json(), "sign": self.sign}}

    def apply(self, psi: np.ndarray) -> np.ndarray:
        c = math.cos(math.pi / 4)
        return c * psi + self.sign * c * self.Q.apply(psi)


@dataclass(frozen=True, eq=False)
class CX:
    """SUM gate: X_c -> X_c X_t^a, Z_t -> Z_c^{-a} Z_t (CNOT for q = 2, a = 1)."""

    control: int
    target: int
    a: int = 1
    kind: str = field(default="cx", init=False)

    @property
    def support(self) -> list[int]:
        return sorted((self.control, self.target))

    def conjugate(self, P: PauliOp) -> PauliOp:
        x, z = P.x.copy(), P.z.copy()
        x[self.target] += self.a * x[self.control]
        z[self.control] -= self.a * z[self.target]
        return PauliOp(P.q, x, z, P.phase)

    def inverse(self) -> CX:
        return CX(self.control, self.target, -self.a)

    def to_json(self) -> dict:
        return {"kind": self.kind, "support": [self.control, self.target],
                "parameters": {"a": self.a}}

    def apply(self, psi: np.ndarray) -> np.ndarray:
        n = _nqubits(psi)
        k = np.arange(psi.size)
        cbit = (k >> (n - 1 - self.control)) & 1
        out = np.empty_like(psi)
        out[k ^ (cbit << (n - 1 - self.target))] = psi
        return out


@dataclass(frozen=True, eq=False)
class Hadamard:
    """Fourier gate: (x, z) -> (-z, x); for qubits X <-> Z."""

    qudit: int
    power: int = 1
    kind: str = field(default="h", init=False)

    @property
    def support(self) -> list[int]:
        return [self.qudit]

    def conjugate(self, P: PauliOp) -> PauliOp:
        x, z = P.x.copy(), P.z.copy()
        ph = P.phase
        j = self.qudit
        for _ in range(self.power % 4):
            a, b = int(x[j]), int(z[j])
            if P.q == 2:
                ph += 2 * a * b  # Z^a X^b = (-1)^{ab} X^b Z^a
            x[j], z[j] = -b, a
        return PauliOp(P.q, x, z, ph)

    def inverse(self) -> Hadamard:
        return Hadamard(self.qudit, -self.power % 4)

    def to_json(self) -> dict:
        return {"kind": self.kind, "support": [self.qudit], "parameters": {"power": self.power}}

    def apply(self, psi: np.ndarray) -> np.ndarray:
        n = _nqubits(psi)
        t = psi.reshape((2,) * n)
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        for _ in range(self.power % 2):
            t = np.moveaxis(np.tensordot(h, t, axes=([1], [self.qudit])), 0, self.qudit)
        return t.reshape(-1)


@dataclass(frozen=True, eq=False)
class Swap:
    i: int
    j: int
    kind: str = field(default="swap", init=False)

    @property
    def support(self) -> list[int]:
        return sorted((self.i, self.j))

    def conjugate(self, P: PauliOp) -> PauliOp:
        x, z = P.x.copy(), P.z.copy()
        x[[self.i, self.j]] = x[[self.j, self.i]]
        z[[self.i, self.j]] = z[[self.j, self.i]]
        return PauliOp(P.q, x, z, P.phase)

    def inverse(self) -> Swap:
        return self

    def to_json(self) -> dict:
        return {"kind": self.kind, "support": [self.i, self.j], "parameters": {}}

    def apply(self, psi: np.ndarray) -> np.ndarray:
        n = _nqubits(psi)
        return np.swapaxes(psi.reshape((2,) * n), self.i, self.j).reshape(-1)


@dataclass(frozen=True, eq=False)
class Mul:
    """Scalar column operation for q > 2: x -> a x, z -> a^{-1} z."""

    qudit: int
    a: int
    q: int
    kind: str = field(default="mul", init=False)

    @property
    def support(self) -> list[int]:
        return [self.qudit]

    def conjugate(self, P: PauliOp) -> PauliOp:
        x, z = P.x.copy(), P.z.copy()
        x[self.qudit] *= self.a
        z[self.qudit] *= pow(self.a, -1, self.q)
        return PauliOp(P.q, x, z, P.phase)

    def inverse(self) -> Mul:
        return Mul(self.qudit, pow(self.a, -1, self.q), self.q)

    def to_json(self) -> dict:
        return {"kind": self.kind, "support": [self.qudit], "parameters": {"a": self.a, "q": self.q}}


def conjugate(gate, P: PauliOp) -> PauliOp:
    return gate.conjugate(P)


def _nqubits(psi: np.ndarray) -> int:
    n = int(psi.size).bit_length() - 1
    if 1 << n != psi.size:
        raise ValueError("statevector length is not a power of two")
    return n


def gate_from_json(obj: dict):
    kind, par = obj["kind"], obj.get("parameters", {})
    sup = obj["support"]
    if kind == "pauli_exp":
        return PauliExp(PauliOp.from_json(par["Q"]), par.get("sign", 1))
    if kind == "cx":
        return CX(sup[0], sup[1], par.get("a", 1))
    if kind == "h":
        return Hadamard(sup[0], par.get("power", 1))
    if kind == "swap":
        return Swap(sup[0], sup[1])
    if kind == "mul":
        return Mul(sup[0], par["a"], par["q"])
    raise ValueError(f"unknown gate kind {kind!r}")


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True, eq=False)
class CliffordCircuit:
    """Layers of gates with pairwise disjoint supports inside each layer."""

    n: int
    q: int
    rounds: tuple[tuple, ...]
    max_gate_range: int = 0

    def __post_init__(self):
        for t, layer in enumerate(self.rounds):
            seen: set[int] = set()
            for g in layer:
                s = set(g.support)
                if s & seen:
                    raise ValueError(f"layer {t}: overlapping gate supports")
                seen |= s

    @property
    def depth(self) -> int:
        return len(self.rounds)

    @property
    def range(self) -> int:
        return self.depth * self.max_gate_range

    @property
    def gates(self) -> list:
        return [g for layer in self.rounds for g in layer]

    def conjugate(self, P: PauliOp) -> PauliOp:
        """U P U^dagger with U the whole circuit (first layer applied first)."""
        for g in self.gates:
            P = g.conjugate(P)
        return P

    def conjugate_inverse(self, P: PauliOp) -> PauliOp:
        """U^dagger P U."""
        for g in reversed(self.gates):
            P = g.inverse().conjugate(P)
        return P

    def apply(self, psi: np.ndarray) -> np.ndarray:
        for g in self.gates:
            psi = g.apply(psi)
        return psi

    def apply_inverse(self, psi: np.ndarray) -> np.ndarray:
        for g in reversed(self.gates):
            psi = g.inverse().apply(psi)
        return psi

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "depth": self.depth,
                "max_gate_range": self.max_gate_range, "range": self.range,
                "rounds": [[g.to_json() for g in layer] for layer in self.rounds]}

    @classmethod
    def from_json(cls, obj: dict) -> CliffordCircuit:
        rounds = tuple(tuple(gate_from_json(g) for g in layer) for layer in obj["rounds"])
        return cls(obj["n"], obj["q"], rounds, obj.get("max_gate_range", 0))


def _pack_layers(gates: list) -> list[list]:
    """Greedy first-fit packing of mutually commuting gates into disjoint layers."""
    layers: list[tuple[list, set]] = []
    for g in gates:
        s = set(g.support)
        for layer, used in layers:
            if not s & used:
                layer.append(g)
                used |= s
                break
        else:
            layers.append(([g], set(s)))
    return [layer for layer, _ in layers]


def _vertex_graph(C: ChainComplex) -> list[list[tuple[int, int]]]:
    """Neighbours of each 0-cell as (vertex, 1-cell) pairs."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(C.dims[0])]
    for e, col in enumerate(C.boundaries[0].col_dicts):
        ends = sorted(col)
        if len(ends) != 2:
            raise ValueError(f"1-cell {e} does not have two endpoints")
        u, v = ends
        adj[u].append((v, e))
        adj[v].append((u, e))
    return [sorted(a) for a in adj]


def distance2_coloring(C: ChainComplex) -> list[int]:
    """First-fit coloring of 0-cells in label order; cells within distance 2 differ."""
    adj = _vertex_graph(C)
    order = sorted(range(C.dims[0]), key=lambda s: C.labels[0][s])
    color = [-1] * C.dims[0]
    for s in order:
        near = {v for v, _ in adj[s]}
        near |= {w for v in list(near) for w, _ in adj[v]}
        near.discard(s)
        used = {color[v] for v in near}
        c = 0
        while c in used:
            c += 1
        color[s] = c
    return color


@dataclass
class DisentangleResult:
    circuit: CliffordCircuit
    final_terms: list[PauliOp]
    rounds_used: int
    colors: list[int]
    n_colors: int
    max_distance: int
    seed_set: list[int]
    color_rounds: list[list]

    def to_json(self) -> dict:
        return {"circuit": self.circuit.to_json(),
                "final_terms": [t.to_json() for t in self.final_terms],
                "rounds_used": self.rounds_used, "n_colors": self.n_colors,
                "max_distance": self.max_distance, "seed_set": self.seed_set,
                "depth": self.circuit.depth, "range": self.circuit.range}


def _gate_diameter(C: ChainComplex, support: list[int]) -> int:
    if C.factors is None:
        return len(support)  # no metric: fall back to support size
    labs = [C.labels[1][e] for e in support]
    return max((cell_distance(C, a, b) for a, b in combinations(labs, 2)), default=0)


def _hamiltonian_terms(C: ChainComplex, absorbed: set[int]) -> list[PauliOp]:
    terms = [-vertex_operator(C, s) for s in range(C.dims[0]) if s not in absorbed]
    if C.L >= 2:
        terms += [-B for B in all_plaquette_operators(C)]
    return terms


def disentangle_circuit(C: ChainComplex, S0) -> DisentangleResult:
    """Circuit mapping H(S0) = -sum B_p - sum_{s not in S0} A_s to a Z-diagonal Hamiltonian."""
    if C.q != 2:
        raise ValueError("the disentangling circuit is implemented for q = 2")
    seeds = sorted({C.cell_index(s)[1] if not isinstance(s, (int, np.integer)) else int(s) for s in S0})
    if not seeds:
        raise ValueError("empty seed set: nothing to grow from")
    adj = _vertex_graph(C)
    colors = distance2_coloring(C)
    c = max(colors) + 1
    n = C.dims[1]

    # graph distance from the seed set, for the round bound
    dist = [-1] * C.dims[0]
    queue = list(seeds)
    for s in seeds:
        dist[s] = 0
    for u in queue:
        for v, _ in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    if min(dist) < 0:
        raise ValueError("some 0-cells are not connected to the seed set")
    maxdist = max(dist)

    absorbed = set(seeds)
    terms = _hamiltonian_terms(C, absorbed)
    layers: list[list] = []
    color_rounds: list[list] = []
    t = 0
    while len(absorbed) < C.dims[0]:
        col = t % c
        frontier = sorted((s for s in absorbed if colors[s] == col), key=lambda s: C.labels[0][s])
        round_gates, newly = [], set()
        for s in frontier:
            for s2, e in adj[s]:
                if s2 in absorbed:
                    continue
                if s2 in newly:
                    raise ArithmeticError("two frontier cells share a neighbour; coloring is invalid")
                Q = PauliOp.from_support(n, z=[e]) * vertex_operator(C, s2)
                round_gates.append(PauliExp(Q))
                newly.add(s2)
        for a, b in combinations(round_gates, 2):
            if not a.Q.commutes(b.Q):
                raise ArithmeticError("gates inside a round do not commute")
        for g in round_gates:
            terms = [g.conjugate(P) for P in terms]
        absorbed |= newly
        color_rounds.append(round_gates)
        layers += _pack_layers(round_gates)
        t += 1

    rng = max((_gate_diameter(C, g.support) for layer in layers for g in layer), default=0)
    circuit = CliffordCircuit(n, 2, tuple(tuple(layer) for layer in layers), rng)
    for P in terms:
        if not P.is_diagonal():
            raise ArithmeticError("final Hamiltonian is not diagonal")
    return DisentangleResult(circuit, terms, t, colors, c, maxdist, seeds, color_rounds)


# ---------------------------------------------------------------------------
# stabilizer groups


class RedundancyError(ValueError):
    """Check rows are linearly dependent; ``witness`` is a relation among them."""

    def __init__(self, msg: str, side: str, witness: np.ndarray):
        super().__init__(msg)
        self.side = side
        self.witness = witness


def _sym_bits(P: PauliOp) -> int:
    n = P.n
    b = 0
    for i in np.nonzero(P.x)[0]:
        b |= 1 << int(i)
    for i in np.nonzero(P.z)[0]:
        b |= 1 << (n + int(i))
    return b


@dataclass(frozen=True, eq=False)
class StabilizerGroup:
    n: int
    generators: tuple[PauliOp, ...]
    q: int = 2

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if g.n != self.n:
                raise ValueError("generator has the wrong length")
            if self.q == 2 and not g.is_hermitian():
                raise ValueError("generators must be Hermitian with sign +-1")
        for a, b in combinations(gens, 2):
            if not a.commutes(b):
                raise ValueError("generators do not commute")
        if self.q == 2:
            piv: dict[int, int] = {}
            for g in gens:
                v = _sym_bits(g)
                while v:
                    h = v.bit_length() - 1
                    if h not in piv:
                        piv[h] = v
                        break
                    v ^= piv[h]
                else:
                    raise ValueError("generators are dependent")
        else:
            M = SparseMat.from_dense(np.array([np.concatenate([g.x, g.z]) for g in gens]), self.q)
            if rank_mod_p(M, self.q) != len(gens):
                raise ValueError("generators are dependent")

    def __len__(self) -> int:
        return len(self.generators)

    @cached_property
    def _echelon(self):
        """Pivot table: leading bit -> (symplectic bits, generator mask)."""
        piv: dict[int, tuple[int, int]] = {}
        for k, g in enumerate(self.generators):
            v, m = _sym_bits(g), 1 << k
            while v:
                h = v.bit_length() - 1
                if h not in piv:
                    piv[h] = (v, m)
                    break
                pv, pm = piv[h]
                v ^= pv
                m ^= pm
        return piv

    def decompose(self, P: PauliOp) -> list[int] | None:
        """Generator indices whose product equals P up to phase, or None."""
        piv = self._echelon
        v, m = _sym_bits(P), 0
        while v:
            h = v.bit_length() - 1
            if h not in piv:
                return None
            pv, pm = piv[h]
            v ^= pv
            m ^= pm
        return [k for k in range(len(self.generators)) if m >> k & 1]

    def contains(self, P: PauliOp) -> bool:
        return self.expectation(P) == 1 and self.decompose(P) is not None

    def expectation(self, P: PauliOp) -> int:
        return expectation(self, P)

    def conjugated(self, gate_or_op) -> StabilizerGroup:
        """Group of O psi (for a Pauli O) or U psi (for a gate or circuit)."""
        if isinstance(gate_or_op, PauliOp):
            O = gate_or_op
            gens = [g if g.commutes(O) else -g for g in self.generators]
        else:
            gens = [gate_or_op.conjugate(g) for g in self.generators]
        return StabilizerGroup(self.n, tuple(gens), self.q)

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj: dict) -> StabilizerGroup:
        return cls(obj["n"], tuple(PauliOp.from_json(g) for g in obj["generators"]), obj.get("q", 2))


def expectation(g: StabilizerGroup, P: PauliOp) -> int:
    """+s if s·P is in the group, 0 if P anticommutes with a generator or is independent."""
    if g.q != 2:
        raise ValueError("expectations need q = 2")
    for h in g.generators:
        if not h.commutes(P):
            return 0
    idx = g.decompose(P)
    if idx is None:
        return 0
    prod = product([g.generators[k] for k in idx], n=g.n)
    if not prod.same_up_to_phase(P):
        raise ArithmeticError("decomposition failed")
    d = (prod.phase - P.phase) % 4
    if d == 0:
        return 1
    if d == 2:
        return -1
    raise ArithmeticError("non-Hermitian operator")


def ground_stabilizers(C: ChainComplex, S0, result: DisentangleResult | None = None) -> StabilizerGroup:
    """Stabilizers of U^dagger|0...0>, the ground state built by the disentangling circuit."""
    res = result or disentangle_circuit(C, S0)
    n = C.dims[1]
    gens = [res.circuit.conjugate_inverse(PauliOp.from_support(n, z=[j])) for j in range(n)]
    return StabilizerGroup(n, tuple(gens))


# ---------------------------------------------------------------------------
# reduced states


def local_subgroup(g: StabilizerGroup, region) -> list[PauliOp]:
    """Generators of the elements of g supported inside ``region`` (signed).

    Row reduction with the outside columns eliminated first: rows whose
    leading column lies inside the region are exactly supported there.
    """
    region = set(int(r) for r in region)
    n = g.n
    outside = [j for j in range(n) if j not in region]
    inside = sorted(region)
    # column priority: outside x, outside z, inside x, inside z
    order = [(0, j) for j in outside] + [(1, j) for j in outside] + \
            [(0, j) for j in inside] + [(1, j) for j in inside]
    rows = list(g.generators)
    pivots_out = []
    r = 0
    for kind, j in order:
        vec = lambda P: (P.x if kind == 0 else P.z)[j]
        hit = next((i for i in range(r, len(rows)) if vec(rows[i])), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        for i in range(len(rows)):
            if i != r and vec(rows[i]):
                rows[i] = rows[i] * rows[r]
        pivots_out.append(j not in region)
        r += 1
    return [rows[i] for i in range(r) if not pivots_out[i]]


def reduced_state_equal(g1: StabilizerGroup, g2: StabilizerGroup, region) -> bool:
    """Whether the two stabilizer states agree on the qubits in ``region``."""
    if g1.n != g2.n:
        raise ValueError("groups act on different numbers of qubits")
    L1, L2 = local_subgroup(g1, region), local_subgroup(g2, region)
    if len(L1) != len(L2):
        return False
    if not L1:
        return True
    G2 = StabilizerGroup(g2.n, tuple(L2))
    return all(expectation(G2, P) == 1 for P in L1)


# ---------------------------------------------------------------------------
# canonical form


@dataclass
class CanonicalForm:
    column_ops: list
    H_X: SparseMat
    H_Z: SparseMat

    def to_json(self) -> dict:
        return {"column_ops": [g.to_json() for g in self.column_ops],
                "H_X": self.H_X.to_json(), "H_Z": self.H_Z.to_json()}


def _apply_ops_to_checks(code: CssCode, ops: list) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    q, n = code.q, code.n
    X = [PauliOp(q, r, np.zeros(n, dtype=np.int64)) for r in code.H_X.to_dense()]
    Z = [PauliOp(q, np.zeros(n, dtype=np.int64), r) for r in code.H_Z.to_dense()]
    for g in ops:
        X = [g.conjugate(P) for P in X]
        Z = [g.conjugate(P) for P in Z]
    pack = lambda ops_, attr: np.array([getattr(P, attr) for P in ops_], dtype=np.int64).reshape(len(ops_), n)
    return pack(X, "x"), pack(X, "z"), pack(Z, "x"), pack(Z, "z")


def canonical_form(code: CssCode) -> CanonicalForm:
    """Column operations sending every X check to a single X and every Z check
    to a single Z, on distinct qudits (X checks first).

    Requires independent checks; otherwise raises RedundancyError carrying a
    relation among the rows.
    """
    q = code.q
    check_prime(q)
    for side, H in (("X", code.H_X), ("Z", code.H_Z)):
        if H.rows and rank_mod_p(H, q) < H.rows:
            w = kernel_basis_mod_p(H.T, q)[0]
            raise RedundancyError(f"{side} checks are redundant (relation {w.tolist()})", side, w)
    n, mx, mz = code.n, code.H_X.rows, code.H_Z.rows
    hx = code.H_X.to_dense() % q
    hz = code.H_Z.to_dense() % q
    ops: list = []

    def emit(g):
        nonlocal hx, hz
        ops.append(g)
        # track matrices directly: columns transform as in conjugate()
        if isinstance(g, Swap):
            hx[:, [g.i, g.j]] = hx[:, [g.j, g.i]]
            hz[:, [g.i, g.j]] = hz[:, [g.j, g.i]]
        elif isinstance(g, CX):
            hx[:, g.target] = (hx[:, g.target] + g.a * hx[:, g.control]) % q
            hz[:, g.control] = (hz[:, g.control] - g.a * hz[:, g.target]) % q
        elif isinstance(g, Mul):
            hx[:, g.qudit] = hx[:, g.qudit] * g.a % q
            hz[:, g.qudit] = hz[:, g.qudit] * pow(g.a, -1, q) % q

    # X checks: column-reduce H_X to [I | 0]
    for k in range(mx):
        j = next(j for j in range(k, n) if hx[k, j])
        if j != k:
            emit(Swap(k, j))
        if hx[k, k] != 1:
            emit(Mul(k, pow(int(hx[k, k]), -1, q), q))
        for t in range(n):
            if t != k and hx[k, t]:
                emit(CX(k, t, int(-hx[k, t] % q)))
    if np.any(hz[:, :mx]):
        raise ArithmeticError("Z checks overlap the X pivots; commutation violated")
    # Z checks: reduce the z-part on the remaining columns
    for k in range(mz):
        c0 = mx + k
        j = next(j for j in range(c0, n) if hz[k, j])
        if j != c0:
            emit(Swap(c0, j))
        if hz[k, c0] != 1:
            emit(Mul(c0, int(hz[k, c0]), q))
        for c in range(mx, n):
            if c != c0 and hz[k, c]:
                # CX(c -> c0) subtracts a·(column c0) from column c of the z-part
                emit(CX(c, c0, int(hz[k, c])))
    Xx, Xz, Zx, Zz = _apply_ops_to_checks(code, ops)
    expect_x = np.zeros((mx, n), dtype=np.int64)
    expect_x[np.arange(mx), np.arange(mx)] = 1
    expect_z = np.zeros((mz, n), dtype=np.int64)
    expect_z[np.arange(mz), mx + np.arange(mz)] = 1
    if not (np.array_equal(Xx, expect_x) and not Xz.any() and not Zx.any() and np.array_equal(Zz, expect_z)):
        raise ArithmeticError("canonical form verification failed")
    return CanonicalForm(ops, SparseMat.from_dense(Xx, q), SparseMat.from_dense(Zz, q))


# ---------------------------------------------------------------------------
# dense oracles (qubits)


def zero_state(n: int) -> np.ndarray:
    if n > STATEVECTOR_LIMIT:
        raise ValueError(f"{n} qubits exceeds the statevector limit")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1
    return psi


def dense_stabilizer_state(g: StabilizerGroup, seed: int = 0) -> np.ndarray:
    """Normalised vector in the joint +1 eigenspace (projected random start)."""
    if g.n > STATEVECTOR_LIMIT:
        raise ValueError(f"{g.n} qubits exceeds the statevector limit")
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=1 << g.n) + 1j * rng.normal(size=1 << g.n)
    for P in g.generators:
        psi = (psi + P.apply(psi)) / 2
    nrm = np.linalg.norm(psi)
    if nrm < 1e-9:
        raise ArithmeticError("stabilizer space is empty")
    return psi / nrm


def dense_expectation(psi: np.ndarray, P: PauliOp) -> complex:
    return complex(np.vdot(psi, P.apply(psi)))


def dense_reduced_density(psi: np.ndarray, region) -> np.ndarray:
    n = _nqubits(psi)
    region = sorted(region)
    rest = [j for j in range(n) if j not in region]
    t = np.transpose(psi.reshape((2,) * n), region + rest).reshape(1 << len(region), -1)
    return t @ t.conj().T


def dense_gate_matrix(gate, n: int) -> np.ndarray:
    """Explicit unitary of a gate on n qubits (columns are images of basis states)."""
    dim = 1 << n
    out = np.empty((dim, dim), dtype=complex)
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1
        out[:, k] = gate.apply(e)
    return out
