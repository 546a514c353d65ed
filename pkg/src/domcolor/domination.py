"""Weighted domination on a complete graph with i.i.d. continuous vertex weights.

Target ``v`` is a weighted dominating vertex when its weight exceeds every
weight in its neighbourhood ``D(v)``.  For continuous weights only the rank
order matters, so every probability here is a ratio of permutation counts and
is returned as an exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping

import numpy as np

from .rng import RngStream

MAX_INVOLVED = 10


class FormulaNotApplicable(ValueError):
    """Raised when the product formula is requested for a non weak-nested schema."""


@dataclass(frozen=True)
class DominationSchema:
    """Targets ``v_1 < ... < v_k`` with their domination neighbourhoods."""

    n: int
    targets: tuple[int, ...]
    neighbourhoods: tuple[frozenset[int], ...]

    def __post_init__(self):
        targets = tuple(int(v) for v in self.targets)
        hoods = tuple(frozenset(int(u) for u in d) for d in self.neighbourhoods)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "neighbourhoods", hoods)
        if not targets:
            raise ValueError("schema needs at least one target")
        if len(hoods) != len(targets):
            raise ValueError("one neighbourhood per target is required")
        if any(b <= a for a, b in zip(targets, targets[1:])):
            raise ValueError("targets must be strictly increasing")
        for v, d in zip(targets, hoods):
            if not 1 <= v <= self.n:
                raise ValueError(f"target {v} outside 1..{self.n}")
            if v in d:
                raise ValueError(f"target {v} lies in its own neighbourhood")
            if d and (min(d) < 1 or max(d) > self.n):
                raise ValueError(f"neighbourhood of {v} leaves 1..{self.n}")

    @classmethod
    def from_mapping(cls, n: int, hoods: Mapping[int, Iterable[int]]) -> "DominationSchema":
        targets = sorted(hoods)
        return cls(n, tuple(targets), tuple(frozenset(hoods[v]) for v in targets))

    @property
    def k(self) -> int:
        return len(self.targets)

    def d(self) -> tuple[int, ...]:
        return tuple(1 + len(h) for h in self.neighbourhoods)

    def involved(self) -> tuple[int, ...]:
        out = set(self.targets)
        for h in self.neighbourhoods:
            out |= h
        return tuple(sorted(out))

    def restrict(self, indices: Iterable[int]) -> "DominationSchema":
        """Schema keeping only the targets at the given 0-based positions."""
        idx = sorted(indices)
        return DominationSchema(self.n, tuple(self.targets[i] for i in idx),
                                tuple(self.neighbourhoods[i] for i in idx))

    def compact(self) -> str:
        parts = [str(self.n)]
        for v, h in zip(self.targets, self.neighbourhoods):
            parts.append(f"{v}:" + ",".join(map(str, sorted(h))))
        return ";".join(parts)


@dataclass(frozen=True)
class CumulativeView:
    cumulative: tuple[frozenset[int], ...]
    c: tuple[int, ...]


def cumulative_view(s: DominationSchema) -> CumulativeView:
    acc: frozenset[int] = frozenset()
    sets = []
    for h in s.neighbourhoods:
        acc = acc | h
        sets.append(acc)
    return CumulativeView(tuple(sets), tuple(1 + len(c) for c in sets))


def check_weak_nested(s: DominationSchema) -> tuple[bool, int | None]:
    """Weak-nested test; on failure also returns the 1-based index ``l`` violated.

    Needs ``v_l`` in ``D(v_{l+1})`` and ``v_l`` outside ``C(v_l)`` for ``l < k``,
    and ``v_k`` outside ``C(v_k)``.
    """
    cum = cumulative_view(s).cumulative
    t, hoods = s.targets, s.neighbourhoods
    for l in range(s.k - 1):
        if t[l] not in hoods[l + 1] or t[l] in cum[l]:
            return False, l + 1
    if t[-1] in cum[-1]:
        return False, s.k
    return True, None


def check_strict_nested(s: DominationSchema) -> bool:
    h = s.neighbourhoods
    return all(a < b for a, b in zip(h, h[1:]))


def domination_probability_formula(s: DominationSchema) -> Fraction:
    ok, where = check_weak_nested(s)
    if not ok:
        raise FormulaNotApplicable(f"formula not applicable: weak-nested condition fails at l={where}")
    out = Fraction(1)
    for c in cumulative_view(s).c:
        out /= c
    return out


def p_dom(s: DominationSchema) -> Fraction:
    out = Fraction(1)
    for d in s.d():
        out /= d
    return out


def expected_rtot(s: DominationSchema) -> Fraction:
    return sum((Fraction(1, d) for d in s.d()), Fraction(0))


def _order_constraints(s: DominationSchema) -> tuple[list[int], list[int]]:
    """Involved vertices and, per position, the bitmask of vertices that must rank below it."""
    inv = list(s.involved())
    pos = {v: i for i, v in enumerate(inv)}
    below = [0] * len(inv)
    for v, h in zip(s.targets, s.neighbourhoods):
        for u in h:
            below[pos[v]] |= 1 << pos[u]
    return inv, below


def count_linear_extensions(below: list[int]) -> int:
    """Number of orderings (lowest first) placing each vertex after its ``below`` mask."""
    size = len(below)
    ways = [0] * (1 << size)
    ways[0] = 1
    for mask in range(1, 1 << size):
        total = 0
        rest = mask
        while rest:
            bit = rest & -rest
            rest ^= bit
            i = bit.bit_length() - 1
            prev = mask ^ bit
            if below[i] & ~prev == 0:
                total += ways[prev]
        ways[mask] = total
    return ways[-1]


def domination_probability_bruteforce(s: DominationSchema, method: str = "dp") -> Fraction:
    """Exact ``P(E_dom)`` from the rank orders of the involved vertices.

    Valid for any schema.  ``method="dp"`` counts the admissible rank orders
    with a subset recursion; ``method="permutations"`` walks every permutation.
    """
    inv, below = _order_constraints(s)
    if len(inv) > MAX_INVOLVED:
        raise ValueError(f"{len(inv)} involved vertices exceed the oracle budget of {MAX_INVOLVED}")
    total = math.factorial(len(inv))
    if method == "dp":
        return Fraction(count_linear_extensions(below), total)
    if method == "permutations":
        hits = 0
        for perm in permutations(range(len(inv))):
            rank = [0] * len(inv)
            for r, i in enumerate(perm):
                rank[i] = r
            if all(rank[j] < rank[i] for i in range(len(inv))
                   for j in range(len(inv)) if below[i] >> j & 1):
                hits += 1
        return Fraction(hits, total)
    raise ValueError(f"unknown method {method!r}")


def independence_check(s: DominationSchema) -> bool:
    """Whether the events ``A_{v_l}`` are mutually independent, decided exactly.

    Every subset of targets is checked (pairs first) against the product of the
    single-target probabilities ``1/d(v_l)``.
    """
    if len(s.involved()) > MAX_INVOLVED:
        raise ValueError("involved set exceeds the oracle budget")
    single = [Fraction(1, d) for d in s.d()]
    for size in range(2, s.k + 1):
        for subset in combinations(range(s.k), size):
            expected = Fraction(1)
            for i in subset:
                expected *= single[i]
            if domination_probability_bruteforce(s.restrict(subset)) != expected:
                return False
    return True


@dataclass
class DominationEstimate:
    trials: int
    p_dom: float
    p_dom_stderr: float
    rtot_mean: float
    rtot_stderr: float
    rtot_var: float
    rtot_var_stderr: float
    ties: int


def simulate_domination(s: DominationSchema, trials: int, rng: RngStream,
                        weights: str = "uniform", chunk: int = 1 << 16) -> DominationEstimate:
    """Monte Carlo estimate of ``P(E_dom)`` and the moments of ``R_tot``.

    Weights are i.i.d. standard uniform (or standard exponential).  Equal
    weights are broken in favour of the larger vertex index; ``ties`` counts
    the trials in which any two involved weights coincided.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if weights not in ("uniform", "exponential"):
        raise ValueError(f"unknown weight law {weights!r}")
    inv = s.involved()
    pos = {v: i for i, v in enumerate(inv)}
    gen = rng.generator()
    hits = 0
    r_sum = r_sq = r_cube = r_four = 0.0
    ties = 0
    done = 0
    counts = np.zeros(s.k + 1, dtype=np.int64)
    while done < trials:
        size = min(chunk, trials - done)
        if weights == "uniform":
            w = gen.random((size, len(inv)))
        else:
            w = gen.standard_exponential((size, len(inv)))
        rtot = np.zeros(size, dtype=np.int64)
        all_dom = np.ones(size, dtype=bool)
        for v, h in zip(s.targets, s.neighbourhoods):
            wv = w[:, pos[v]]
            ok = np.ones(size, dtype=bool)
            for u in h:
                wu = w[:, pos[u]]
                ok &= (wv > wu) | ((wv == wu) & (v > u))
            rtot += ok
            all_dom &= ok
        hits += int(all_dom.sum())
        counts += np.bincount(rtot, minlength=s.k + 1)
        if len(inv) > 1:
            srt = np.sort(w, axis=1)
            ties += int(np.any(srt[:, 1:] == srt[:, :-1], axis=1).sum())
        done += size
    values = np.arange(s.k + 1, dtype=float)
    probs = counts / trials
    mean = float(values @ probs)
    central = values - mean
    m2 = float((central ** 2) @ probs)
    m4 = float((central ** 4) @ probs)
    p_hat = hits / trials
    var = m2 * trials / (trials - 1) if trials > 1 else 0.0
    return DominationEstimate(
        trials=trials,
        p_dom=p_hat,
        p_dom_stderr=math.sqrt(p_hat * (1 - p_hat) / trials),
        rtot_mean=mean,
        rtot_stderr=math.sqrt(m2 / trials),
        rtot_var=var,
        rtot_var_stderr=math.sqrt(max(m4 - m2 * m2, 0.0) / trials),
        ties=ties,
    )


@dataclass
class DominationProbabilityReport:
    formula_value: Fraction | None
    p_dom: Fraction
    expected_rtot: Fraction
    oracle_value: Fraction | None = None
    mc: DominationEstimate | None = None
    weak_nested: bool = False
    strict_nested: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def q(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        out = {
            "weak_nested": self.weak_nested,
            "strict_nested": self.strict_nested,
            "formula_value": q(self.formula_value),
            "p_dom": q(self.p_dom),
            "expected_rtot": q(self.expected_rtot),
            "oracle_value": q(self.oracle_value),
            "mc_estimate": None,
        }
        if self.mc is not None:
            out["mc_estimate"] = {
                "p_dom": self.mc.p_dom,
                "p_dom_stderr": self.mc.p_dom_stderr,
                "rtot_mean": self.mc.rtot_mean,
                "rtot_stderr": self.mc.rtot_stderr,
                "rtot_var": self.mc.rtot_var,
                "rtot_var_stderr": self.mc.rtot_var_stderr,
                "trials": self.mc.trials,
                "ties": self.mc.ties,
            }
        out.update(self.extra)
        return out


def domination_report(s: DominationSchema, trials: int = 0, rng: RngStream | None = None,
                      oracle: bool = False) -> DominationProbabilityReport:
    weak, _ = check_weak_nested(s)
    report = DominationProbabilityReport(
        formula_value=domination_probability_formula(s) if weak else None,
        p_dom=p_dom(s),
        expected_rtot=expected_rtot(s),
        weak_nested=weak,
        strict_nested=check_strict_nested(s),
    )
    if oracle:
        report.oracle_value = domination_probability_bruteforce(s)
    if trials:
        report.mc = simulate_domination(s, trials, rng or RngStream(0))
    return report


# -- schema files -------------------------------------------------------------


def parse_schema(text: str) -> DominationSchema:
    """Parse ``n k`` then ``k`` lines ``v : u1 u2 ...``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty schema file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be 'n k'")
    n, k = int(head[0]), int(head[1])
    if len(lines) - 1 != k:
        raise ValueError(f"header announces {k} targets but {len(lines) - 1} lines follow")
    hoods = {}
    for line in lines[1:]:
        if ":" not in line:
            raise ValueError(f"target line needs 'v : neighbours', got {line!r}")
        left, right = line.split(":", 1)
        v = int(left)
        if v in hoods:
            raise ValueError(f"target {v} listed twice")
        hoods[v] = [int(u) for u in right.split()]
    order = list(hoods)
    if order != sorted(order):
        raise ValueError("targets must be listed in increasing order")
    return DominationSchema.from_mapping(n, hoods)


def format_schema(s: DominationSchema) -> str:
    lines = [f"{s.n} {s.k}"]
    for v, h in zip(s.targets, s.neighbourhoods):
        lines.append(f"{v} : " + " ".join(map(str, sorted(h))))
    return "\n".join(lines) + "\n"


# -- schema generators --------------------------------------------------------


def _subsets(pool: list[int]) -> Iterator[frozenset[int]]:
    for bits in product((False, True), repeat=len(pool)):
        yield frozenset(v for v, b in zip(pool, bits) if b)


def enumerate_weak_nested(max_involved: int) -> Iterator[DominationSchema]:
    """Every weak-nested schema whose involved set is exactly ``{1..L}``, ``L <= max_involved``.

    ``D(v_j)`` must contain ``v_{j-1}`` and no ``v_l`` with ``l >= j``; earlier
    targets and non-targets are free.  These rules are exactly the
    weak-nested condition.
    """
    for size in range(1, max_involved + 1):
        universe = range(1, size + 1)
        for k in range(1, size + 1):
            for targets in combinations(universe, k):
                others = [v for v in universe if v not in targets]

                def extend(j, chosen):
                    if j == k:
                        used = set(targets).union(*chosen)
                        if len(used) == size:
                            yield DominationSchema(size, targets, tuple(chosen))
                        return
                    free = others + list(targets[:max(j - 1, 0)])
                    forced = {targets[j - 1]} if j > 0 else set()
                    for extra in _subsets(free):
                        yield from extend(j + 1, chosen + [frozenset(forced | extra)])

                yield from extend(0, [])


def random_weak_nested(gen: np.random.Generator, max_involved: int,
                       min_involved: int = 1, spare: int = 0) -> DominationSchema:
    """Random weak-nested schema; ``spare`` unused vertices may pad the ambient set."""
    while True:
        size = int(gen.integers(min_involved, max_involved + 1))
        n = size + int(gen.integers(0, spare + 1))
        pool = [int(v) + 1 for v in gen.permutation(n)[:size]]
        k = int(gen.integers(1, size + 1))
        targets = tuple(sorted(pool[:k]))
        others = [v for v in pool if v not in targets]
        hoods = []
        for j in range(k):
            free = others + list(targets[:max(j - 1, 0)])
            pick = frozenset(v for v in free if gen.random() < 0.5)
            if j > 0:
                pick |= {targets[j - 1]}
            hoods.append(pick)
        s = DominationSchema(n, targets, tuple(hoods))
        if len(s.involved()) <= max_involved:
            return s


def random_schema(gen: np.random.Generator, max_involved: int) -> DominationSchema:
    """Arbitrary (usually not weak-nested) schema on at most ``max_involved`` vertices."""
    n = int(gen.integers(2, max_involved + 1))
    k = int(gen.integers(1, n + 1))
    targets = tuple(sorted(int(v) + 1 for v in gen.permutation(n)[:k]))
    hoods = []
    for v in targets:
        hoods.append(frozenset(u for u in range(1, n + 1) if u != v and gen.random() < 0.4))
    return DominationSchema(n, targets, tuple(hoods))
