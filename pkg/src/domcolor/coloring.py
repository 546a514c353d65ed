"""Stable sets, stable-set-removal colouring and exact chromatic numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Graph, induced_subgraph

MAX_STABLE_EXACT_N = 40
MAX_CHROMATIC_EXACT_N = 16


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ColoringAssignment:
    """Proper colouring with colours ``1..num_colors``; ``colors[v - 1]`` is the colour of ``v``."""

    colors: tuple[int, ...]
    trace: tuple[tuple[int, int, int], ...] = field(default=(), compare=False)

    @property
    def num_colors(self) -> int:
        return max(self.colors)

    def color(self, v: int) -> int:
        return self.colors[v - 1]

    def is_proper(self, g: Graph) -> bool:
        return all(self.colors[u - 1] != self.colors[v - 1] for u, v in g.edges)


def canonical_colors(colors) -> tuple[int, ...]:
    """Renumber colours ``1, 2, ...`` by order of first appearance along ``1..n``."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(c, len(seen) + 1) for c in colors)


def greedy_stable_set(g: Graph) -> frozenset[int]:
    """Min-degree greedy: take a minimum-degree vertex, delete it with its neighbours.

    Ties go to the smallest vertex.  The result has at least
    ``sum 1/(deg(v) + 1)`` vertices.
    """
    alive = set(g.vertices)
    deg = {v: g.degree(v) for v in alive}
    chosen = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        chosen.append(v)
        gone = {v} | (g.neighbors(v) & alive)
        alive -= gone
        for u in gone:
            for w in g.neighbors(u) & alive:
                deg[w] -= 1
    return frozenset(chosen)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _max_stable_mask(masks: list[int]) -> int:
    """Maximum independent set of the graph given by neighbourhood bitmasks."""
    n = len(masks)
    best = [0, 0]  # size, mask

    def clique_cover_bound(cand: int) -> int:
        # colour the complement greedily: each class is a clique of the graph
        count = 0
        rest = cand
        while rest:
            count += 1
            low = rest & -rest
            cls = low
            avail = rest & masks[low.bit_length() - 1] & ~low
            rest ^= low
            while avail:
                b = avail & -avail
                cls |= b
                avail &= masks[b.bit_length() - 1]
            rest &= ~cls
        return count

    def search(cand: int, size: int, chosen: int) -> None:
        while True:
            if not cand:
                if size > best[0]:
                    best[0], best[1] = size, chosen
                return
            # vertices of degree <= 1 in the candidate graph are always safe to take
            rest, taken = cand, False
            while rest:
                b = rest & -rest
                rest ^= b
                i = b.bit_length() - 1
                if _popcount(masks[i] & cand) <= 1:
                    chosen |= b
                    size += 1
                    cand &= ~(b | masks[i])
                    taken = True
                    break
            if not taken:
                break
        if size + _popcount(cand) <= best[0]:
            return
        if size + clique_cover_bound(cand) <= best[0]:
            return
        rest, pick, pick_deg = cand, 0, -1
        while rest:
            b = rest & -rest
            rest ^= b
            d = _popcount(masks[b.bit_length() - 1] & cand)
            if d > pick_deg:
                pick, pick_deg = b, d
        i = pick.bit_length() - 1
        search(cand & ~(pick | masks[i]), size + 1, chosen | pick)
        search(cand & ~pick, size, chosen)

    search((1 << n) - 1, 0, 0)
    return best[1]


def max_stable_set_exact(g: Graph) -> frozenset[int]:
    """A maximum stable set (branch and bound, clique-cover bound); ``n <= 40``."""
    if g.n > MAX_STABLE_EXACT_N:
        raise BudgetExceeded(f"exact stable set limited to n <= {MAX_STABLE_EXACT_N}, got {g.n}")
    mask = _max_stable_mask(g.bitmasks())
    return frozenset(i + 1 for i in range(g.n) if mask >> i & 1)


def stable_set_removal_coloring(g: Graph, exact: bool = False) -> ColoringAssignment:
    """Colour by repeatedly removing a stable set (maximum if ``exact``, else greedy).

    ``trace`` lists ``(k, n_{k+1}, k + n_{k+1})`` for ``k = 0..num_colors``:
    colours used so far, vertices left, and the resulting bound on the
    chromatic number.
    """
    colors = [0] * g.n
    remaining = list(g.vertices)
    trace = [(0, g.n, g.n)]
    k = 0
    while remaining:
        sub, mapping = induced_subgraph(g, remaining)
        found = max_stable_set_exact(sub) if exact else greedy_stable_set(sub)
        k += 1
        picked = {mapping[i - 1] for i in found}
        for v in picked:
            colors[v - 1] = k
        remaining = [v for v in remaining if v not in picked]
        trace.append((k, len(remaining), k + len(remaining)))
    return ColoringAssignment(tuple(colors), tuple(trace))


def _dsatur_coloring(g: Graph, upper: int | None = None) -> list[int]:
    n = g.n
    colors = [0] * (n + 1)
    sat: list[set[int]] = [set() for _ in range(n + 1)]
    for _ in range(n):
        v = max((x for x in g.vertices if not colors[x]),
                key=lambda x: (len(sat[x]), g.degree(x), -x))
        c = 1
        while c in sat[v]:
            c += 1
        colors[v] = c
        for u in g.neighbors(v):
            sat[u].add(c)
    return colors[1:]


def _greedy_clique(g: Graph) -> list[int]:
    best: list[int] = []
    for start in g.vertices:
        clique = [start]
        cand = set(g.neighbors(start))
        while cand:
            v = max(cand, key=lambda x: (len(g.neighbors(x) & cand), -x))
            clique.append(v)
            cand &= g.neighbors(v)
        if len(clique) > len(best):
            best = clique
    return best


def exact_coloring(g: Graph) -> ColoringAssignment:
    """Optimal colouring by DSATUR branch and bound with a clique lower bound; ``n <= 16``."""
    if g.n > MAX_CHROMATIC_EXACT_N:
        raise BudgetExceeded(f"exact colouring limited to n <= {MAX_CHROMATIC_EXACT_N}, got {g.n}")
    best_colors = _dsatur_coloring(g)
    best = [max(best_colors), best_colors]
    clique = _greedy_clique(g)
    lower = len(clique)
    if best[0] == lower:
        return ColoringAssignment(canonical_colors(best_colors))

    n = g.n
    colors = [0] * (n + 1)
    sat_count = [dict() for _ in range(n + 1)]
    # pre-colour the clique: symmetric colours are interchangeable
    for i, v in enumerate(clique, start=1):
        colors[v] = i
        for u in g.neighbors(v):
            sat_count[u][i] = sat_count[u].get(i, 0) + 1

    def search(done: int, used: int) -> None:
        if used >= best[0]:
            return
        if done == n:
            best[0] = used
            best[1] = colors[1:]
            return
        v = max((x for x in range(1, n + 1) if not colors[x]),
                key=lambda x: (len(sat_count[x]), g.degree(x), -x))
        for c in range(1, min(used + 1, best[0] - 1) + 1):
            if c in sat_count[v]:
                continue
            colors[v] = c
            for u in g.neighbors(v):
                sat_count[u][c] = sat_count[u].get(c, 0) + 1
            search(done + 1, max(used, c))
            for u in g.neighbors(v):
                left = sat_count[u][c] - 1
                if left:
                    sat_count[u][c] = left
                else:
                    del sat_count[u][c]
            colors[v] = 0
            if best[0] == lower:
                return

    search(len(clique), len(clique))
    return ColoringAssignment(canonical_colors(best[1]))


def chromatic_number_exact(g: Graph) -> int:
    return exact_coloring(g).num_colors


def chi_upper_bound_mad(g: Graph, h) -> float:
    """``2 max(1, h) log(n e / max(1, h))`` with the natural logarithm."""
    if h < 0:
        raise ValueError("maximum average degree bound must be non-negative")
    top = max(1.0, float(h))
    return 2.0 * top * math.log(g.n * math.e / top)
