"""Exact maximum average degree through densest-subgraph minimum cuts."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph

MAX_BRUTEFORCE_N = 20


class _FlowNetwork:
    """Dinic max-flow on Python integers (capacities may be arbitrarily large)."""

    def __init__(self, size: int):
        self.size = size
        self.head: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_arc(self, u: int, v: int, cap: int, back: int = 0) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(back)

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.size
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.head[u]:
                if self.cap[a] > 0 and level[self.to[a]] < 0:
                    level[self.to[a]] = level[u] + 1
                    queue.append(self.to[a])
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        cap, to, head = self.cap, self.to, self.head
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            it = [0] * self.size
            while True:
                # iterative augmenting-path search in the level graph
                path: list[int] = []
                u = s
                while u != t:
                    adv = False
                    while it[u] < len(head[u]):
                        a = head[u][it[u]]
                        v = to[a]
                        if cap[a] > 0 and level[v] == level[u] + 1:
                            path.append(a)
                            u = v
                            adv = True
                            break
                        it[u] += 1
                    if not adv:
                        if u == s:
                            break
                        level[u] = -1
                        a = path.pop()
                        u = to[a ^ 1]
                        it[u] += 1
                if u != t:
                    break
                push = min(cap[a] for a in path)
                for a in path:
                    cap[a] -= push
                    cap[a ^ 1] += push
                total += push

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.head[u]:
                v = self.to[a]
                if self.cap[a] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _denser_subset(g: Graph, density: Fraction) -> set[int] | None:
    """A vertex set of edge density ``m(S)/|S|`` strictly above ``density``, or ``None``.

    Goldberg's network with every capacity scaled by the denominator of
    ``density`` so the cut test is exact.
    """
    a, q = density.numerator, density.denominator
    n, m = g.n, g.m
    s, t = 0, n + 1
    net = _FlowNetwork(n + 2)
    big = m * q
    for v in g.vertices:
        net.add_arc(s, v, big)
        net.add_arc(v, t, big + 2 * a - g.degree(v) * q)
    for u, v in g.edges:
        net.add_arc(u, v, q, q)
    cut = net.max_flow(s, t)
    if cut >= big * n:
        return None
    side = net.source_side(s) - {s}
    return side or None


def _edges_within(g: Graph, vs: set[int]) -> int:
    return sum(1 for u, v in g.edges if u in vs and v in vs)


def _components(g: Graph, vs: set[int]) -> list[set[int]]:
    left, out = set(vs), []
    while left:
        root = min(left)
        comp, stack = {root}, [root]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u) & left:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        left -= comp
        out.append(comp)
    return out


@dataclass(frozen=True)
class MadReport:
    h_av: Fraction
    witness: frozenset[int]
    d_av: Fraction
    max_degree: int
    bound_sqrt: float
    bound_cuberoot: float
    bound_cuberoot_stated: float
    bound_tsplit: float
    tsplit_T: int

    def to_dict(self) -> dict:
        return {
            "h_av": f"{self.h_av.numerator}/{self.h_av.denominator}",
            "h_av_float": float(self.h_av),
            "witness": sorted(self.witness),
            "d_av": f"{self.d_av.numerator}/{self.d_av.denominator}",
            "max_degree": self.max_degree,
            "bound_sqrt": self.bound_sqrt,
            "bound_cuberoot": self.bound_cuberoot,
            "bound_cuberoot_stated": self.bound_cuberoot_stated,
            "bound_tsplit": self.bound_tsplit,
            "tsplit_T": self.tsplit_T,
        }


def tsplit_bound(m: int, n: int) -> tuple[float, int]:
    """``min over integers 1 <= T <= n of max(T, 2m/T)`` and the minimising ``T``."""
    best, best_t = math.inf, 1
    for t in range(1, n + 1):
        val = max(t, 2 * m / t)
        if val < best:
            best, best_t = val, t
    return best, best_t


def hav_bounds(g: Graph) -> tuple[float, float, float]:
    """Upper bounds on the maximum average degree: ``sqrt(2m)``,
    ``(2 sqrt 2 + 2)(m Delta)^(1/3)`` and the best integer split ``max(T, 2m/T)``."""
    m, delta = g.m, g.max_degree
    return (math.sqrt(2 * m),
            (2 * math.sqrt(2) + 2) * (m * delta) ** (1 / 3),
            tsplit_bound(m, g.n)[0])


def _report(g: Graph, h_av: Fraction, witness: set[int]) -> MadReport:
    sq, cube, split = hav_bounds(g)
    return MadReport(
        h_av=h_av,
        witness=frozenset(witness),
        d_av=g.average_degree,
        max_degree=g.max_degree,
        bound_sqrt=sq,
        bound_cuberoot=cube,
        bound_cuberoot_stated=6 * (g.m * g.max_degree) ** (1 / 3),
        bound_tsplit=split,
        tsplit_T=tsplit_bound(g.m, g.n)[1],
    )


def max_average_degree_exact(g: Graph) -> MadReport:
    """Maximum over vertex subsets ``S`` of ``2 m(S) / |S|``, exactly.

    Binary search on the edge density over the grid ``Z / (4 n^2)``, each probe
    answered by a minimum cut.  Two distinct subset densities differ by at
    least ``1/n^2``, so the search stops on the exact optimum.  The witness is
    a connected component of the optimal set with the same density.
    """
    if g.m == 0:
        raise ValueError("maximum average degree needs at least one edge")
    n = g.n
    lo = Fraction(g.m, n)
    witness = set(g.vertices)
    hi = Fraction(g.max_degree, 2)
    grid = 4 * n * n
    gap = Fraction(1, n * n)
    while hi - lo >= gap:
        mid = Fraction(math.ceil((lo + hi) / 2 * grid), grid)
        found = _denser_subset(g, mid)
        if found is None:
            hi = mid
        else:
            witness = found
            lo = Fraction(_edges_within(g, found), len(found))
    for comp in _components(g, witness):
        if Fraction(_edges_within(g, comp), len(comp)) == lo:
            witness = comp
            break
    return _report(g, 2 * lo, witness)


def max_average_degree_bruteforce(g: Graph) -> tuple[Fraction, frozenset[int]]:
    """Enumerate every nonempty vertex subset (``n <= 20``)."""
    if g.n > MAX_BRUTEFORCE_N:
        raise ValueError(f"subset enumeration limited to n <= {MAX_BRUTEFORCE_N}")
    masks = g.bitmasks()
    size = 1 << g.n
    edges = [0] * size
    best_num, best_den, best_mask = 0, 1, 1
    for mask in range(1, size):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        edges[mask] = edges[rest] + bin(masks[i] & rest).count("1")
        cnt = bin(mask).count("1")
        if edges[mask] * best_den > best_num * cnt:
            best_num, best_den, best_mask = edges[mask], cnt, mask
    witness = frozenset(i + 1 for i in range(g.n) if best_mask >> i & 1)
    return Fraction(2 * best_num, best_den), witness
