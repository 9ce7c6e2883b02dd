"""Graphs that seed the complexes: named instances, random regular and
biregular generators, girth and edge expansion.

Vertex numbering of the named graphs:

* ``k4``: vertices 0..3, all pairs.
* ``petersen``: outer cycle 0-1-2-3-4, spokes i -- i+5, inner pentagram
  5+i -- 5+(i+2)%5.
* ``heawood``: cycle 0..13 plus chords i -- i+5 (mod 14) for even i.
* ``cycle(n)``: i -- i+1 mod n.
* ``path(n)``: i -- i+1 for i < n-1.
* ``complete_bipartite(a,b)``: left 0..a-1, right a..a+b-1.
* ``grid_torus(L)``: vertex (x, y) is x*L + y; edges to (x+1, y) and (x, y+1) mod L.
"""

from __future__ import annotations

import math
import random
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg

DEFAULT_RETRIES = 10_000
EXACT_EXPANSION_LIMIT = 22


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    left: tuple[int, ...] | None = None
    right: tuple[int, ...] | None = None

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if (self.left is None) != (self.right is None):
            raise ValueError("bipartition needs both sides")
        if self.left is not None:
            L, R = set(self.left), set(self.right)
            if L & R or L | R != set(range(self.n)):
                raise ValueError("bipartition must split the vertex set")
            for u, v in self.edges:
                if (u in L) == (v in L):
                    raise ValueError(f"edge ({u}, {v}) does not cross the bipartition")

    @classmethod
    def from_edges(cls, n, edges, left=None, right=None) -> Graph:
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        if left is not None:
            left, right = tuple(sorted(left)), tuple(sorted(right))
        return cls(n, edges, left, right)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_bipartite(self) -> bool:
        return self.left is not None

    @cached_property
    def adj(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            out[u].append(v)
            out[v].append(u)
        for row in out:
            row.sort()
        return out

    @cached_property
    def incident(self) -> list[list[int]]:
        """Edge indices incident to each vertex."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for k, (u, v) in enumerate(self.edges):
            out[u].append(k)
            out[v].append(k)
        return out

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def regular_degree(self) -> int | None:
        d = set(self.degrees())
        return d.pop() if len(d) == 1 else None

    def bfs(self, src: int, banned_edge: int | None = None) -> list[float]:
        dist = [math.inf] * self.n
        dist[src] = 0
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for k in self.incident[u]:
                if k == banned_edge:
                    continue
                a, b = self.edges[k]
                w = b if a == u else a
                if dist[w] == math.inf:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        return dist

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs hop distances (inf between components)."""
        return np.array([self.bfs(s) for s in range(self.n)], dtype=float)

    def is_connected(self) -> bool:
        return self.n == 0 or all(d < math.inf for d in self.bfs(0))

    # text formats ------------------------------------------------------

    def to_edgelist(self) -> str:
        return f"{self.n}\n" + "".join(f"{u} {v}\n" for u, v in self.edges)

    @classmethod
    def from_edgelist(cls, text: str) -> Graph:
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty edge list")
        n = int(lines[0][0])
        return cls.from_edges(n, [(int(a), int(b)) for a, b in lines[1:]])

    def to_json(self) -> dict:
        obj = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.left is not None:
            obj["left"] = list(self.left)
            obj["right"] = list(self.right)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> Graph:
        return cls.from_edges(obj["n"], obj["edges"], obj.get("left"), obj.get("right"))


# ---------------------------------------------------------------------------
# named graphs


def _bipartite(a: int, b: int, edges) -> Graph:
    return Graph.from_edges(a + b, edges, range(a), range(a, a + b))


def named_graph(name: str) -> Graph:
    """Standard small graph by name, e.g. ``petersen`` or ``cycle(5)``."""
    m = re.fullmatch(r"\s*([a-z_0-9]+)\s*(?:\(\s*([0-9,\s]*)\))?\s*", name.lower())
    if not m:
        raise ValueError(f"unknown graph {name!r}")
    key = m.group(1)
    args = [int(a) for a in m.group(2).split(",")] if m.group(2) else []
    if key == "k4" and not args:
        return Graph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    if key == "petersen" and not args:
        edges = [(i, (i + 1) % 5) for i in range(5)]
        edges += [(i, i + 5) for i in range(5)]
        edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return Graph.from_edges(10, edges)
    if key == "heawood" and not args:
        edges = [(i, (i + 1) % 14) for i in range(14)]
        edges += [(i, (i + 5) % 14) for i in range(0, 14, 2)]
        return Graph.from_edges(14, edges)
    if key == "cycle" and len(args) == 1 and args[0] >= 3:
        n = args[0]
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if key == "path" and len(args) == 1 and args[0] >= 1:
        n = args[0]
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if key == "complete_bipartite" and len(args) == 2:
        a, b = args
        return _bipartite(a, b, [(i, a + j) for i in range(a) for j in range(b)])
    if key == "grid_torus" and len(args) == 1 and args[0] >= 3:
        L = args[0]
        edges = []
        for x in range(L):
            for y in range(L):
                edges.append((x * L + y, ((x + 1) % L) * L + y))
                edges.append((x * L + y, x * L + (y + 1) % L))
        return Graph.from_edges(L * L, edges)
    raise ValueError(f"unknown graph {name!r}")


# ---------------------------------------------------------------------------
# random generators


def random_regular(n: int, d: int, min_girth: int = 3, seed: int = 0,
                   max_retries: int = DEFAULT_RETRIES) -> Graph:
    """Connected simple d-regular graph with girth >= min_girth.

    Pairing model: stubs are matched one pair at a time, rejecting pairs
    that would create a loop, a multi-edge or a cycle shorter than
    ``min_girth``; a stuck or disconnected attempt is restarted.
    """
    if (n * d) % 2:
        raise ValueError(f"n*d must be even (n={n}, d={d})")
    if d < 3:
        raise ValueError("degree must be at least 3")
    if n <= d:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices")
    rng = random.Random(seed)
    for _ in range(max_retries):
        g = _try_pairing(n, d, min_girth, rng)
        if g is not None and g.is_connected():
            return g
    raise GenerationError(f"random_regular(n={n}, d={d}, min_girth={min_girth}) exhausted {max_retries} retries")


def _within(adj, src: int, dst: int, radius: int) -> bool:
    # is dst within `radius` hops of src
    if radius <= 0:
        return src == dst
    seen = {src}
    frontier = [src]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return False


def _try_pairing(n, d, min_girth, rng) -> Graph | None:
    stubs = [v for v in range(n) for _ in range(d)]
    adj: list[set[int]] = [set() for _ in range(n)]
    edges = []
    while stubs:
        ok = False
        for _ in range(50):
            i, j = rng.sample(range(len(stubs)), 2)
            u, v = stubs[i], stubs[j]
            # a new edge u-v closes a cycle of length dist(u,v)+1
            if u == v or v in adj[u] or _within(adj, u, v, min_girth - 2):
                continue
            ok = True
            break
        if not ok:
            return None
        for k in sorted((i, j), reverse=True):
            stubs.pop(k)
        adj[u].add(v)
        adj[v].add(u)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def random_biregular(n_left: int, n_right: int, d_left: int, d_right: int, seed: int = 0,
                     max_retries: int = DEFAULT_RETRIES) -> Graph:
    """Simple biregular bipartite graph: left vertices 0..n_left-1, right after."""
    if n_left * d_left != n_right * d_right:
        raise ValueError(f"degree sums differ: {n_left}*{d_left} != {n_right}*{d_right}")
    if d_left > n_right or d_right > n_left:
        raise ValueError("degree exceeds the opposite side")
    rng = random.Random(seed)
    left_stubs = [u for u in range(n_left) for _ in range(d_left)]
    for _ in range(max_retries):
        right_stubs = [n_left + v for v in range(n_right) for _ in range(d_right)]
        rng.shuffle(right_stubs)
        pairs = set(zip(left_stubs, right_stubs))
        if len(pairs) == len(left_stubs):
            return _bipartite(n_left, n_right, pairs)
    raise GenerationError(f"random_biregular({n_left}, {n_right}, {d_left}, {d_right}) exhausted {max_retries} retries")


# ---------------------------------------------------------------------------
# measurements


def girth(G: Graph) -> float:
    """Length of the shortest cycle; ``math.inf`` for forests."""
    best = math.inf
    for s in range(G.n):
        dist = [-1] * G.n
        parent_edge = [-1] * G.n
        dist[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for k in G.incident[u]:
                if k == parent_edge[u]:
                    continue
                a, b = G.edges[k]
                w = b if a == u else a
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent_edge[w] = k
                    dq.append(w)
                else:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def edge_expansion(G: Graph, mode: str = "exact"):
    """Vertex-normalised edge expansion min |cut(S)|/|S| over 0 < |S| <= N/2.

    ``exact`` returns a Fraction by exhaustive subset enumeration (N <= 22).
    ``spectral`` returns the Cheeger lower bound lambda_2/2 of the Laplacian,
    shaved by a small safety margin; it is a bound, never the value.
    """
    if mode == "exact":
        return _expansion_exact(G)
    if mode == "spectral":
        lap = np.diag(G.degrees()).astype(float)
        for u, v in G.edges:
            lap[u, v] -= 1
            lap[v, u] -= 1
        ev = scipy.linalg.eigvalsh(lap)
        lam2 = ev[1] if G.n > 1 else 0.0
        margin = 1e-9 * max(1.0, abs(ev[-1]))
        return max(0.0, lam2 / 2 - margin)
    raise ValueError(f"unknown mode {mode!r}")


def _expansion_exact(G: Graph) -> Fraction:
    n = G.n
    if n > EXACT_EXPANSION_LIMIT:
        raise ValueError(f"exact expansion needs N <= {EXACT_EXPANSION_LIMIT}, got {n}")
    if n < 2:
        raise ValueError("expansion undefined for fewer than 2 vertices")
    best = None
    chunk = 1 << 20
    total = 1 << n
    for start in range(1, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        size = np.zeros(masks.shape, dtype=np.int64)
        for v in range(n):
            size += (masks >> v) & 1
        keep = size <= n // 2
        masks, size = masks[keep], size[keep]
        if masks.size == 0:
            continue
        cut = np.zeros(masks.shape, dtype=np.int64)
        for u, v in G.edges:
            cut += ((masks >> u) ^ (masks >> v)) & 1
        ratio = cut / size
        lo = ratio.min()
        near = np.nonzero(ratio <= lo + 1e-9)[0]
        cand = min(Fraction(int(cut[k]), int(size[k])) for k in near)
        if best is None or cand < best:
            best = cand
    return best
