"""Weighted colouring: integer labels with ``|f(u) - f(v)| >= w(u, v)`` on every edge.

The objective (the weighted colouring number) is the smallest achievable
span, ``max over edges |f(u) - f(v)|``.  Labels are integers, so a real
weight ``w`` acts exactly like ``ceil(w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .coloring import (MAX_CHROMATIC_EXACT_N, exact_coloring,
                       stable_set_removal_coloring)
from .graph import Graph
from .rng import RngStream

MAX_EXACT_N = 7
MAX_EXACT_GREEDY_BOUND = 30


class EdgeWeights:
    """Weights ``w(h) >= 1`` on the edges of a host graph."""

    __slots__ = ("values",)

    def __init__(self, g: Graph, values: Mapping[tuple[int, int], float] | float):
        if not isinstance(values, Mapping):
            values = {e: values for e in g.edges}
        norm = {}
        for (u, v), w in values.items():
            norm[(u, v) if u < v else (v, u)] = w
        missing = [e for e in g.edges if e not in norm]
        if missing:
            raise ValueError(f"no weight for edge {missing[0]}")
        extra = set(norm) - set(g.edges)
        if extra:
            raise ValueError(f"weight given for non-edge {min(extra)}")
        bad = [e for e, w in norm.items() if not w >= 1]
        if bad:
            raise ValueError(f"edge {bad[0]} has weight {norm[bad[0]]} < 1")
        self.values = {e: norm[e] for e in g.edges}

    def __getitem__(self, edge: tuple[int, int]):
        u, v = edge
        return self.values[(u, v) if u < v else (v, u)]

    def __len__(self):
        return len(self.values)

    def ceil(self) -> dict[tuple[int, int], int]:
        return {e: math.ceil(w) for e, w in self.values.items()}

    @property
    def max_weight(self):
        return max(self.values.values(), default=0)

    @property
    def total(self):
        return sum(self.values.values())

    @property
    def mean(self) -> float:
        return self.total / len(self.values) if self.values else 0.0


@dataclass(frozen=True)
class WeightDistribution:
    """``constant(c)``, ``uniform(1, b)`` or shifted Pareto with support ``[1, inf)``."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind == "constant" and self.param < 1:
            raise ValueError("constant weight must be >= 1")
        elif self.kind == "uniform" and self.param < 1:
            raise ValueError("uniform(1, b) needs b >= 1")
        elif self.kind == "pareto" and self.param <= 1:
            raise ValueError("Pareto tail index must exceed 1 for a finite mean")
        elif self.kind not in ("constant", "uniform", "pareto"):
            raise ValueError(f"unknown weight law {self.kind!r}")

    @classmethod
    def parse(cls, spec: str) -> "WeightDistribution":
        """``constant:3``, ``uniform:5`` or ``uniform:1,5``, ``pareto:5``."""
        kind, _, arg = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "pareto_shifted":
            kind = "pareto"
        parts = [float(x) for x in arg.split(",") if x.strip()]
        if kind == "uniform" and len(parts) == 2:
            if parts[0] != 1:
                raise ValueError("uniform weights start at 1")
            parts = parts[1:]
        if len(parts) != 1:
            raise ValueError(f"cannot parse weight law {spec!r}")
        return cls(kind, parts[0])

    @property
    def mean(self) -> float:
        if self.kind == "constant":
            return self.param
        if self.kind == "uniform":
            return (1 + self.param) / 2
        return self.param / (self.param - 1)

    @property
    def variance(self) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "uniform":
            return (self.param - 1) ** 2 / 12
        a = self.param
        return a / ((a - 1) ** 2 * (a - 2)) if a > 2 else math.inf

    def moment(self, k: float) -> float:
        """``E w^k`` (``inf`` when it diverges)."""
        if self.kind == "constant":
            return self.param ** k
        if self.kind == "uniform":
            b = self.param
            return 1.0 if b == 1 else (b ** (k + 1) - 1) / ((k + 1) * (b - 1))
        return self.param / (self.param - k) if k < self.param else math.inf

    @property
    def moment_order(self) -> float:
        """Largest integer ``s`` with ``E w^(2s)`` finite (``inf`` for bounded laws)."""
        if self.kind != "pareto":
            return math.inf
        return math.ceil(self.param / 2) - 1

    def sample(self, size: int, gen: np.random.Generator) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, float(self.param))
        if self.kind == "uniform":
            return gen.uniform(1.0, self.param, size)
        return 1.0 + gen.pareto(self.param, size)

    def __str__(self):
        return f"{self.kind}:{self.param:g}"


def sample_weights(g: Graph, dist: WeightDistribution, rng: RngStream) -> EdgeWeights:
    """One i.i.d. weight per edge, in the graph's sorted edge order."""
    draws = dist.sample(g.m, rng.generator())
    return EdgeWeights(g, dict(zip(g.edges, draws.tolist())))


def span(g: Graph, labels: Sequence[int]) -> int:
    return max((abs(labels[u - 1] - labels[v - 1]) for u, v in g.edges), default=0)


def is_proper_weighted_coloring(g: Graph, w: EdgeWeights,
                                labels: Sequence[int]) -> tuple[bool, tuple[int, int] | None]:
    if len(labels) != g.n:
        raise ValueError(f"need {g.n} labels, got {len(labels)}")
    for u, v in g.edges:
        if abs(labels[u - 1] - labels[v - 1]) < w[(u, v)]:
            return False, (u, v)
    return True, None


@dataclass(frozen=True)
class LocalWeightSums:
    sums: dict[int, float]
    max_sum: float
    greedy_bound: float  # 1 + max_i (2 J_i - deg(i))


def local_weight_sums(g: Graph, w: EdgeWeights) -> LocalWeightSums:
    sums = {v: 0 for v in g.vertices}
    for (u, v), x in w.values.items():
        sums[u] += x
        sums[v] += x
    bound = 1 + max(2 * sums[v] - g.degree(v) for v in g.vertices)
    return LocalWeightSums(sums, max(sums.values()), bound)


def greedy_span_bound(g: Graph, w: EdgeWeights) -> int:
    """``max_v sum_{u ~ v} (2 ceil(w(u, v)) - 1)``; greedy labels never exceed this plus one."""
    load = [0] * (g.n + 1)
    for (u, v), x in w.ceil().items():
        load[u] += 2 * x - 1
        load[v] += 2 * x - 1
    return max(load)


def resolve_order(g: Graph, w: EdgeWeights, order) -> list[int]:
    """``None``/``"weight"``: decreasing local weight sum; ``"identity"``; or an explicit permutation."""
    if order is None or order == "weight":
        sums = local_weight_sums(g, w).sums
        return sorted(g.vertices, key=lambda v: (-sums[v], v))
    if order == "identity":
        return list(g.vertices)
    order = [int(v) for v in order]
    if sorted(order) != list(g.vertices):
        raise ValueError("order must be a permutation of the vertices")
    return order


def greedy_weighted_coloring(g: Graph, w: EdgeWeights, order=None) -> tuple[int, ...]:
    """Give each vertex, in ``order``, the smallest positive label that clears
    ``[f(x) - (ceil(w) - 1), f(x) + (ceil(w) - 1)]`` for every labelled neighbour ``x``."""
    labels = [0] * (g.n + 1)
    cw = w.ceil()
    for v in resolve_order(g, w, order):
        blocked = []
        for x in g.neighbors(v):
            if labels[x]:
                r = cw[(v, x) if v < x else (x, v)] - 1
                blocked.append((labels[x] - r, labels[x] + r))
        blocked.sort()
        cand = 1
        for lo, hi in blocked:
            if lo > cand:
                break
            cand = max(cand, hi + 1)
        labels[v] = cand
    return tuple(labels[1:])


def bad_edge_probability(weight: float, theta: int) -> float:
    """Exact ``P(|X_u - X_v| < weight)`` for ``X_u, X_v`` uniform on ``{1..theta}``."""
    t = math.ceil(weight) - 1
    if t >= theta - 1:
        return 1.0
    return ((2 * t + 1) * theta - t * (t + 1)) / theta ** 2


@dataclass(frozen=True)
class RandomizedColoring:
    labels: tuple[int, ...]
    theta: int
    spacing: int
    n_bad: int
    n_relabel: int
    retries_used: int
    accepted: bool
    threshold: int
    first_n_bad: int


def _vertex_cover(edges: list[tuple[int, int]]) -> list[int]:
    """Greedy cover: repeatedly take the endpoint touching most uncovered edges (ties: smaller)."""
    left = list(edges)
    cover = []
    while left:
        count: dict[int, int] = {}
        for u, v in left:
            count[u] = count.get(u, 0) + 1
            count[v] = count.get(v, 0) + 1
        pick = min(count, key=lambda x: (-count[x], x))
        cover.append(pick)
        left = [e for e in left if pick not in e]
    return cover


def auto_theta(g: Graph, w: EdgeWeights, K: float) -> int:
    return max(1, math.ceil(math.sqrt(2 * g.m * K * w.mean)))


def randomized_weighted_coloring(g: Graph, w: EdgeWeights, rng: RngStream, K: float | None = None,
                                 theta: int | None = None, max_retries: int = 64) -> RandomizedColoring:
    """Uniform labels on ``{1..theta}``, then repair the bad edges.

    A greedy vertex cover of the bad edges is relabelled ``theta + ceil(K)``,
    ``theta + 2 ceil(K)``, ...  Draws are retried on child streams until
    ``N_bad <= ceil(2 m mu / theta)``; otherwise the attempt with the smallest
    span is kept.  ``K`` defaults to ``ceil(max weight)``.
    """
    if K is None:
        K = math.ceil(w.max_weight) if len(w) else 1
    if len(w) and K < w.max_weight:
        raise ValueError(f"K={K} is below the maximum weight {w.max_weight}")
    if max_retries < 1:
        raise ValueError("max_retries must be positive")
    if theta is None:
        theta = auto_theta(g, w, K)
    if theta < 1:
        raise ValueError("theta must be a positive integer")
    spacing = max(1, math.ceil(K))
    threshold = math.ceil(2 * g.m * w.mean / theta) if g.m else 0
    us = np.array([u - 1 for u, _ in g.edges], dtype=np.int64)
    vs = np.array([v - 1 for _, v in g.edges], dtype=np.int64)
    need = np.array([w.values[e] for e in g.edges], dtype=float)
    best = None
    first_n_bad = -1
    for attempt in range(max_retries):
        x = rng.child(attempt).generator().integers(1, theta + 1, size=g.n)
        bad_mask = np.abs(x[us] - x[vs]) < need
        bad = [g.edges[i] for i in np.flatnonzero(bad_mask).tolist()]
        if attempt == 0:
            first_n_bad = len(bad)
        labels = x.tolist()
        cover = _vertex_cover(bad)
        for i, v in enumerate(cover, start=1):
            labels[v - 1] = theta + i * spacing
        result = RandomizedColoring(tuple(labels), theta, spacing, len(bad), len(cover),
                                    attempt + 1, len(bad) <= threshold, threshold, first_n_bad)
        if result.accepted:
            return result
        if best is None or span(g, result.labels) < span(g, best.labels):
            best = result
    return RandomizedColoring(best.labels, theta, spacing, best.n_bad, best.n_relabel,
                              max_retries, False, threshold, first_n_bad)


def blockscale_coloring(g: Graph, w: EdgeWeights, K: float | None = None,
                        exact: bool | None = None) -> tuple[tuple[int, ...], int]:
    """Proper colouring with ``r`` colours scaled by ``ceil(K)``; returns ``(labels, r)``.

    Exact colouring is used when ``n`` fits its budget (or when ``exact`` is set),
    stable-set removal otherwise.
    """
    if K is None:
        K = math.ceil(w.max_weight) if len(w) else 1
    if len(w) and K < w.max_weight:
        raise ValueError(f"K={K} is below the maximum weight {w.max_weight}")
    if exact is None:
        exact = g.n <= MAX_CHROMATIC_EXACT_N
    col = exact_coloring(g) if exact else stable_set_removal_coloring(g)
    step = max(1, math.ceil(K))
    return tuple(step * c for c in col.colors), col.num_colors


def chi_w_exact(g: Graph, w: EdgeWeights) -> int:
    """Minimum span over all proper weighted colourings, by exhaustive search."""
    return optimal_weighted_coloring(g, w)[0]


def optimal_weighted_coloring(g: Graph, w: EdgeWeights) -> tuple[int, tuple[int, ...]]:
    """``(chi_w, labels)`` with labels of minimum span, by exhaustive search.

    Each connected component is searched up to translation: vertices are
    labelled in BFS order, so every new vertex lies within the candidate span
    of its already-labelled parent, which bounds each search exactly.
    """
    if g.n > MAX_EXACT_N:
        raise ValueError(f"exact weighted colouring limited to n <= {MAX_EXACT_N}")
    if g.m == 0:
        return 0, (1,) * g.n
    cw = w.ceil()
    upper = greedy_span_bound(g, w)
    if upper > MAX_EXACT_GREEDY_BOUND:
        raise ValueError(f"greedy bound {upper} exceeds the search cap {MAX_EXACT_GREEDY_BOUND}")

    def need(u, v):
        return cw[(u, v) if u < v else (v, u)]

    comps, seen = [], set()
    for root in g.vertices:
        if root in seen or not g.neighbors(root):
            continue
        order, parent = [root], {root: None}
        seen.add(root)
        i = 0
        while i < len(order):
            for x in sorted(g.neighbors(order[i])):
                if x not in seen:
                    seen.add(x)
                    parent[x] = order[i]
                    order.append(x)
            i += 1
        comps.append((order, parent))

    def feasible(order, parent, s) -> dict[int, int] | None:
        lab: dict[int, int] = {order[0]: 0}

        def place(i) -> bool:
            if i == len(order):
                return True
            v = order[i]
            p = lab[parent[v]]
            lo_need = need(v, parent[v])
            # mirror symmetry: the first placed neighbour goes above the root
            offsets = range(lo_need, s + 1) if i == 1 else \
                [d for d in range(-s, s + 1) if abs(d) >= lo_need]
            for d in offsets:
                x = p + d
                ok = True
                for y in g.neighbors(v):
                    if y in lab:
                        diff = abs(x - lab[y])
                        if diff < need(v, y) or diff > s:
                            ok = False
                            break
                if ok:
                    lab[v] = x
                    if place(i + 1):
                        return True
                    del lab[v]
            return False

        return lab if place(1) else None

    best = 0
    labels = [1] * g.n
    for order, parent in comps:
        lower = max(need(u, v) for u in order for v in g.neighbors(u))
        s = max(lower, best)
        while (lab := feasible(order, parent, s)) is None:
            s += 1
        best = max(best, s)
        shift = 1 - min(lab.values())
        for v, x in lab.items():
            labels[v - 1] = x + shift
    return best, tuple(labels)


# -- weights files ------------------------------------------------------------


def _number(token: str):
    x = Fraction(token)
    return x.numerator if x.denominator == 1 else x


def parse_weights(text: str, g: Graph) -> EdgeWeights:
    """Lines ``u v w`` covering every edge of ``g``; ``w`` may be ``3``, ``2.5`` or ``5/2``."""
    values = {}
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {no}: expected 'u v w', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        key = (u, v) if u < v else (v, u)
        if key in values:
            raise ValueError(f"line {no}: edge {key} weighted twice")
        values[key] = _number(parts[2])
    return EdgeWeights(g, values)


def format_weights(w: EdgeWeights) -> str:
    return "".join(f"{u} {v} {x}\n" for (u, v), x in w.values.items())
