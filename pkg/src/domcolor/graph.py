"""Simple undirected graphs, inhomogeneous edge-probability models and sampling.

Vertices are the integers ``1..n``.  Probabilities are held as
:class:`fractions.Fraction`; a sampled edge is present when a uniform 53-bit
integer ``k`` satisfies ``k < ceil(p * 2**53)``, which is the exact comparison
``k / 2**53 < p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .rng import RngStream

_SCALE = 1 << 53


class Graph:
    """Immutable simple graph on vertices ``1..n``."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={n}")
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 1..{n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(a) for a in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    @property
    def max_degree(self) -> int:
        return max(len(self._adj[v]) for v in self.vertices)

    @property
    def average_degree(self) -> Fraction:
        return Fraction(2 * self.m, self.n)

    def bitmasks(self) -> list[int]:
        """Neighbourhood bitmasks; bit ``i`` stands for vertex ``i + 1``."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u - 1] |= 1 << (v - 1)
            masks[v - 1] |= 1 << (u - 1)
        return masks

    def is_stable(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        return all(not (self._adj[v] & vs) for v in vs)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(1, n + 1), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def star_graph(leaves: int) -> Graph:
    """Star with centre 1 and leaves ``2..leaves+1``."""
    return Graph(leaves + 1, ((1, i) for i in range(2, leaves + 2)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph(a + b, ((i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph relabelled to ``1..|V|``.

    Returns the subgraph and ``mapping`` with ``mapping[i - 1]`` the original
    label of new vertex ``i`` (original labels kept in increasing order).
    """
    mapping = sorted(set(vertices))
    if not mapping:
        raise ValueError("induced subgraph of an empty vertex set")
    if mapping[0] < 1 or mapping[-1] > g.n:
        raise ValueError(f"vertex set is not contained in 1..{g.n}")
    index = {v: i + 1 for i, v in enumerate(mapping)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph(len(mapping), edges), mapping


# -- probability models ------------------------------------------------------


def to_probability(x) -> Fraction:
    """Exact rational from int, Fraction, decimal/ratio string, or float."""
    if isinstance(x, Fraction):
        p = x
    elif isinstance(x, str):
        p = Fraction(x.strip())
    else:
        p = Fraction(x)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {x} outside [0, 1]")
    return p


def _threshold(p: Fraction) -> int:
    # smallest integer t with k < t  <=>  k / 2**53 < p
    return -((-p.numerator * _SCALE) // p.denominator)


class EdgeProbabilityModel:
    """Symmetric map from vertex pairs to edge probabilities."""

    size: int | None = None  # None means defined for every n

    def prob(self, u: int, v: int) -> Fraction:
        raise NotImplementedError

    def check_size(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if self.size is not None and self.size != n:
            raise ValueError(f"model is defined on {self.size} vertices, not {n}")

    def _pair_thresholds(self, n: int, iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
        out = np.empty(len(iu), dtype=np.int64)
        for k, (i, j) in enumerate(zip(iu.tolist(), ju.tolist())):
            out[k] = _threshold(self.prob(i + 1, j + 1))
        return out

    def min_max(self, n: int) -> tuple[Fraction, Fraction]:
        ps = [self.prob(u, v) for u, v in combinations(range(1, n + 1), 2)]
        return min(ps), max(ps)

    def vertex_average(self, u: int, n: int) -> Fraction:
        """Average probability of the ``n - 1`` pairs containing ``u``."""
        return sum((self.prob(u, v) for v in range(1, n + 1) if v != u), Fraction(0)) / (n - 1)

    def _pair_total(self, vs: list[int]) -> Fraction:
        return sum((self.prob(u, v) for u, v in combinations(vs, 2)), Fraction(0))


@dataclass(frozen=True)
class Homogeneous(EdgeProbabilityModel):
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", to_probability(self.p))

    def prob(self, u, v):
        return self.p

    def _pair_thresholds(self, n, iu, ju):
        return np.full(len(iu), _threshold(self.p), dtype=np.int64)

    def min_max(self, n):
        return self.p, self.p

    def vertex_average(self, u, n):
        return self.p

    def _pair_total(self, vs):
        return self.p * math.comb(len(vs), 2)


@dataclass(frozen=True)
class Block(EdgeProbabilityModel):
    """Stochastic block model; block ``b`` holds a contiguous vertex range."""

    sizes: tuple[int, ...]
    q: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("block sizes must be positive")
        q = tuple(tuple(to_probability(x) for x in row) for row in self.q)
        b = len(sizes)
        if len(q) != b or any(len(row) != b for row in q):
            raise ValueError(f"Q must be {b}x{b}")
        for i in range(b):
            for j in range(i):
                if q[i][j] != q[j][i]:
                    raise ValueError("Q must be symmetric")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "q", q)
        starts = np.cumsum((0,) + sizes)
        object.__setattr__(self, "_label", np.repeat(np.arange(b), sizes))
        object.__setattr__(self, "_starts", tuple(int(s) for s in starts))

    @property
    def size(self):
        return sum(self.sizes)

    def block_of(self, v: int) -> int:
        return int(self._label[v - 1])

    def prob(self, u, v):
        return self.q[self.block_of(u)][self.block_of(v)]

    def _pair_thresholds(self, n, iu, ju):
        table = np.array([[_threshold(p) for p in row] for row in self.q], dtype=np.int64)
        return table[self._label[iu], self._label[ju]]

    def min_max(self, n):
        ps = []
        for a, sa in enumerate(self.sizes):
            for b, sb in enumerate(self.sizes):
                if a != b or sa > 1:
                    ps.append(self.q[a][b])
        return min(ps), max(ps)

    def _pair_total(self, vs):
        counts = [0] * len(self.sizes)
        for v in vs:
            counts[self.block_of(v)] += 1
        total = Fraction(0)
        for a, ca in enumerate(counts):
            total += self.q[a][a] * math.comb(ca, 2)
            for b in range(a + 1, len(counts)):
                total += self.q[a][b] * ca * counts[b]
        return total


@dataclass(frozen=True)
class Explicit(EdgeProbabilityModel):
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(to_probability(x) if i != j else Fraction(0)
                          for j, x in enumerate(row)) for i, row in enumerate(self.matrix))
        n = len(mat)
        if n < 1 or any(len(row) != n for row in mat):
            raise ValueError("probability matrix must be square")
        for i in range(n):
            for j in range(i):
                if mat[i][j] != mat[j][i]:
                    raise ValueError(f"probability matrix not symmetric at ({j + 1}, {i + 1})")
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self):
        return len(self.matrix)

    def prob(self, u, v):
        return self.matrix[u - 1][v - 1]


def sample_graph(model: EdgeProbabilityModel, n: int, rng: RngStream) -> Graph:
    """Include each pair ``{u, v}`` independently with probability ``p(u, v)``.

    Pairs are visited in lexicographic order ``(1,2), (1,3), ..., (n-1,n)``,
    one 53-bit draw per pair, so the result is a pure function of the inputs.
    """
    model.check_size(n)
    iu, ju = np.triu_indices(n, 1)
    draws = rng.generator().integers(0, _SCALE, size=len(iu), dtype=np.int64)
    keep = draws < model._pair_thresholds(n, iu, ju)
    return Graph(n, zip((iu[keep] + 1).tolist(), (ju[keep] + 1).tolist()))


def average_edge_probability(model: EdgeProbabilityModel, vertices: Iterable[int]) -> Fraction:
    """Mean of ``p(u, v)`` over the unordered pairs of ``vertices``."""
    vs = sorted(set(vertices))
    if len(vs) < 2:
        raise ValueError("average edge probability needs at least two vertices")
    if model.size is not None and (vs[0] < 1 or vs[-1] > model.size):
        raise ValueError("vertex set exceeds the model dimension")
    return model._pair_total(vs) / math.comb(len(vs), 2)


def bernoulli_tail_bound(mu: float, eps: float) -> float:
    """``2 exp(-eps**2 mu / 4)``, bounding ``P(|W - mu| >= eps mu)`` for Bernoulli sums."""
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return 2.0 * math.exp(-eps * eps * mu / 4.0)


# -- text formats -----------------------------------------------------------


def _lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``."""
    lines = _lines(text)
    if not lines:
        raise ValueError("empty edge-list file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(head[0]), int(head[1])
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges but {len(body)} lines follow")
    edges = []
    for line in body:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise ValueError(f"edge lines need u < v, got {line!r}")
        edges.append((u, v))
    return Graph(n, edges)


def format_edge_list(g: Graph) -> str:
    return "".join([f"{g.n} {g.m}\n"] + [f"{u} {v}\n" for u, v in g.edges])


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def parse_probability_matrix(text: str) -> Explicit:
    rows = [[to_probability(tok) for tok in line.split()] for line in _lines(text)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("probability matrix file must have n rows of n entries")
    return Explicit(tuple(tuple(r) for r in rows))


def parse_model(spec: dict, n: int | None = None) -> EdgeProbabilityModel:
    """Build a model from a JSON-style dict.

    ``{"kind": "homogeneous", "p": x}`` or ``{"kind": "homogeneous", "beta": b,
    "c": c}`` (``p = c n**-b``, needs ``n``); ``{"kind": "block", "sizes": [...],
    "q": [[...]]}`` or ``{"kind": "block", "blocks": B, "q": [[...]], "beta": b}``
    (equal contiguous blocks, ``Q`` scaled by ``n**-b``); ``{"kind": "explicit",
    "matrix": [[...]]}`` or ``{"kind": "explicit", "file": path}``.
    """
    kind = spec.get("kind")
    if kind == "homogeneous":
        if "p" in spec:
            return Homogeneous(to_probability(spec["p"]))
        if n is None:
            raise ValueError("beta-parametrised model needs n")
        c = float(spec.get("c", 1.0))
        return Homogeneous(Fraction(min(1.0, c * n ** (-float(spec["beta"])))))
    if kind == "block":
        q = spec["q"]
        scale = 1.0
        if "beta" in spec:
            if n is None:
                raise ValueError("beta-parametrised model needs n")
            scale = n ** (-float(spec["beta"]))
            q = [[Fraction(min(1.0, float(x) * scale)) for x in row] for row in q]
        if "sizes" in spec:
            sizes = tuple(spec["sizes"])
        else:
            if n is None:
                raise ValueError("block count without sizes needs n")
            b = int(spec["blocks"])
            base, extra = divmod(n, b)
            sizes = tuple(base + (1 if i < extra else 0) for i in range(b))
        return Block(sizes, tuple(tuple(r) for r in q))
    if kind == "explicit":
        if "file" in spec:
            return parse_probability_matrix(Path(spec["file"]).read_text())
        return Explicit(tuple(tuple(r) for r in spec["matrix"]))
    raise ValueError(f"unknown model kind {kind!r}")

