"""Ising order bounds on graphs, checkerboard mixtures, and thermal energies
of redundancy-free codes.

Thermal sign convention: the Hamiltonian is H = -sum A_k - sum B_k and a
term is averaged with the Gibbs weight of H, i.e. with weight e^{+beta A}
for the term A.  Energies then decrease to -2 per term (q = 2) as beta grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .codes import CssCode
from .graphs import Graph, edge_expansion, named_graph
from .pauli import PauliOp
from .ringlin import check_prime, rank_mod_p
from .stabsim import canonical_form

EXHAUSTIVE_LIMIT = 20
BRUTE_DIM_LIMIT = 1 << 12


# ---------------------------------------------------------------------------
# Ising


def _check_spins(G: Graph, sigma) -> np.ndarray:
    s = np.asarray(sigma, dtype=np.int64)
    if s.shape != (G.n,):
        raise ValueError(f"expected {G.n} spins, got shape {s.shape}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    return s


def ising_energy(G: Graph, sigma) -> int:
    """E = -sum over edges of s_i s_j."""
    s = _check_spins(G, sigma)
    if not G.edges:
        return 0
    e = np.asarray(G.edges)
    return int(-np.sum(s[e[:, 0]] * s[e[:, 1]]))


def ground_energy(G: Graph) -> int:
    return -G.num_edges


def m_squared(sigma=None, *, configs: Sequence | None = None, weights: Sequence | None = None) -> Fraction:
    """((N_up - N_down) / N)^2 for a configuration, or its weighted average."""
    if configs is None:
        s = np.asarray(sigma, dtype=np.int64)
        return Fraction(int(s.sum()) ** 2, s.size ** 2)
    ws = [Fraction(w) for w in weights]
    if len(ws) != len(configs):
        raise ValueError("one weight per configuration")
    if sum(ws) != 1:
        raise ValueError("weights must sum to 1")
    return sum((w * m_squared(c) for w, c in zip(ws, configs)), Fraction(0))


@dataclass
class M2BoundReport:
    c: Fraction
    n_configs: int
    violations: int
    min_slack: Fraction | None
    tightest: list[int]
    mode: str

    def to_json(self) -> dict:
        return {"c": str(self.c), "n_configs": self.n_configs, "violations": self.violations,
                "min_slack": None if self.min_slack is None else str(self.min_slack), "tightest": self.tightest, "mode": self.mode}


def verify_m2_bound(G: Graph, mode: str = "exhaustive", seed: int = 0, samples: int = 100_000,
                    c: Fraction | None = None) -> M2BoundReport:
    """Check M^2 >= 1 - 2(E - E0)/(cN) on every (or sampled) configuration.

    With c = a/b the inequality is tested as
    a m^2 >= a N^2 - 2 b N (E - E0), all in integers.
    """
    N = G.n
    c = Fraction(edge_expansion(G, "exact")) if c is None else Fraction(c)
    if mode == "exhaustive":
        if N > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive mode needs N <= {EXHAUSTIVE_LIMIT}")
        k = np.arange(1 << N, dtype=np.int64)
    elif mode == "sample":
        rng = np.random.default_rng(seed)
        k = rng.integers(0, 1 << N, size=samples, dtype=np.int64) if N < 63 else None
        if k is None:
            raise ValueError("sample mode supports N < 63")
    else:
        raise ValueError("mode must be 'exhaustive' or 'sample'")
    bits = lambda v: (k >> v) & 1  # 1 means spin down
    violated = np.zeros(k.shape, dtype=np.int64)
    for u, v in G.edges:
        violated += bits(u) ^ bits(v)
    down = np.zeros(k.shape, dtype=np.int64)
    for v in range(N):
        down += bits(v)
    m = N - 2 * down
    dE = 2 * violated  # E - E0
    a, b = c.numerator, c.denominator
    slack = a * m * m - a * N * N + 2 * b * N * dE
    viol = int(np.count_nonzero(slack < 0))
    i = int(np.argmin(slack))
    tight = [1 - 2 * int((k[i] >> v) & 1) for v in range(N)]
    # slack in units of the inequality; with c = 0 the bound is vacuous
    ms = Fraction(int(slack[i]), a * N * N) if a else None
    return M2BoundReport(c, int(k.size), viol, ms, tight, mode)


# ---------------------------------------------------------------------------
# checkerboard


def _segments(L: int, l: int) -> list[int]:
    m = max(1, L // l)
    base, extra = divmod(L, m)
    return [base + 1] * extra + [base] * (m - extra)


@dataclass
class CheckerboardReport:
    L: int
    l: int
    block_sizes: list[int]
    cross_edges: int
    expected_violated: Fraction
    m_squared: Fraction
    energy: Fraction
    ground_energy: int
    energy_density: Fraction
    mc_m_squared: float | None = None
    mc_m_squared_se: float | None = None
    mc_energy: float | None = None
    mc_energy_se: float | None = None
    samples: int = 0

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        for key in ("expected_violated", "m_squared", "energy", "energy_density"):
            out[key] = str(out[key])
        return out

    def agrees(self, sigmas: float = 5.0) -> bool:
        """Monte-Carlo means within ``sigmas`` standard errors of the closed forms."""
        ok = True
        for exact, mean, se in ((self.m_squared, self.mc_m_squared, self.mc_m_squared_se),
                                (self.energy, self.mc_energy, self.mc_energy_se)):
            diff = abs(float(exact) - mean)
            ok &= diff <= sigmas * se if se > 0 else diff < 1e-12
        return bool(ok)


def checkerboard_state(L: int, l: int, samples: int = 0, seed: int = 0) -> CheckerboardReport:
    """Mixture over independent all-up / all-down blocks on the L×L torus.

    Blocks are l×l, or of sides l and l+1 when l does not divide L.  The
    closed forms: M^2 = sum n_a^2 / N^2, and the energy is minus the number
    of edges inside blocks (edges between blocks average to zero).
    """
    if not 1 <= l <= L:
        raise ValueError("need 1 <= l <= L")
    if L < 3:
        raise ValueError("torus grids need L >= 3")
    G = named_graph(f"grid_torus({L})")
    seg = _segments(L, l)
    owner = np.repeat(np.arange(len(seg)), seg)
    nb = len(seg)
    block = lambda x, y: int(owner[x] * nb + owner[y])
    sizes = [a * b for a in seg for b in seg]
    N = L * L
    intra, cross = 0, []
    for u, v in G.edges:
        bu, bv = block(u // L, u % L), block(v // L, v % L)
        if bu == bv:
            intra += 1
        else:
            cross.append((bu, bv))
    m2 = Fraction(sum(s * s for s in sizes), N * N)
    energy = Fraction(-intra)
    rep = CheckerboardReport(L, l, sizes, len(cross), Fraction(len(cross), 2), m2, energy,
                             -G.num_edges, (energy + G.num_edges) / N)
    if samples:
        rng = np.random.default_rng(seed)
        signs = rng.choice(np.array([-1, 1]), size=(samples, len(sizes)))
        M = signs @ np.asarray(sizes) / N
        m2s = M * M
        if cross:
            cr = np.asarray(cross)
            E = -intra - np.sum(signs[:, cr[:, 0]] * signs[:, cr[:, 1]], axis=1)
        else:
            E = np.full(samples, -intra, dtype=float)
        se = lambda a: float(a.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
        rep.mc_m_squared, rep.mc_m_squared_se = float(m2s.mean()), se(m2s)
        rep.mc_energy, rep.mc_energy_se = float(E.mean()), se(E.astype(float))
        rep.samples = samples
    return rep


# ---------------------------------------------------------------------------
# thermal energies


@dataclass(frozen=True)
class ThermalTermSpectrum:
    q: int

    @property
    def eigenvalues(self) -> np.ndarray:
        """Spectrum of X + X^dagger on one qudit: 2 cos(2 pi j / q)."""
        return 2 * np.cos(2 * np.pi * np.arange(self.q) / self.q)

    def term_value(self, beta: float) -> float:
        """<A> under weight e^{beta A}."""
        lam = self.eigenvalues
        w = np.exp(beta * (lam - lam.max()))
        return float(np.sum(lam * w) / np.sum(w))


@dataclass
class ThermalReport:
    q: int
    beta: float
    energy: float
    per_term: float
    n_terms: int
    dropped: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def thermal_energy_exact(code: CssCode, beta: float, drop_redundant: bool = False) -> ThermalReport:
    """E(beta) = -(D_{q-1} + D_{q+1}) * per-term value, for independent checks.

    Independence is certified by :func:`canonical_form`.  With
    ``drop_redundant`` the dependent rows are discarded instead and only
    the independent ones are counted.
    """
    check_prime(code.q)
    if drop_redundant:
        n_terms = rank_mod_p(code.H_X, code.q) + rank_mod_p(code.H_Z, code.q)
    else:
        canonical_form(code)
        n_terms = code.H_X.rows + code.H_Z.rows
    dropped = code.H_X.rows + code.H_Z.rows - n_terms
    v = ThermalTermSpectrum(code.q).term_value(beta)
    return ThermalReport(code.q, float(beta), -n_terms * v + 0.0, v, n_terms, dropped)


def code_hamiltonian(code: CssCode) -> sp.csr_matrix:
    """H = -sum (A_k + A_k^dagger) - sum (B_k + B_k^dagger) as a sparse matrix."""
    q, n = code.q, code.n
    if q ** n > BRUTE_DIM_LIMIT:
        raise ValueError(f"dimension {q}^{n} exceeds {BRUTE_DIM_LIMIT}")
    zeros = np.zeros(n, dtype=np.int64)
    H = sp.csr_matrix((q ** n, q ** n), dtype=complex)
    for r in code.H_X.to_dense():
        M = PauliOp(q, r, zeros).sparse()
        H = H - (M + M.getH())
    for r in code.H_Z.to_dense():
        M = PauliOp(q, zeros, r).sparse()
        H = H - (M + M.getH())
    return H


def thermal_energy_brute(code: CssCode, beta: float) -> float:
    """tr(H e^{-beta H}) / tr(e^{-beta H}) by full diagonalisation."""
    H = code_hamiltonian(code).toarray()
    if not np.allclose(H, H.conj().T):
        raise ArithmeticError("Hamiltonian is not Hermitian")
    lam = np.linalg.eigvalsh(H)
    w = np.exp(-beta * (lam - lam.min()))
    return float(np.sum(lam * w) / np.sum(w))
