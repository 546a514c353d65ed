"""Seeded property campaigns for the domination formula and the random-graph colouring bounds.

Asymptotic statements are checked at desk scale through exact per-run
inequalities plus frequencies compared with finite-n tail bounds.  Every
asserted inequality lives in a report table next to the two values compared.
"""

from __future__ import annotations

import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from scipy import stats

from .coloring import (chi_upper_bound_mad, chromatic_number_exact, greedy_stable_set,
                       max_stable_set_exact, stable_set_removal_coloring)
from .density import hav_bounds, max_average_degree_exact
from .domination import (check_strict_nested, check_weak_nested, domination_probability_bruteforce,
                         domination_probability_formula, enumerate_weak_nested, expected_rtot,
                         independence_check, p_dom, random_schema, random_weak_nested,
                         simulate_domination, DominationSchema)
from .graph import (Block, Explicit, Homogeneous, average_edge_probability, bernoulli_tail_bound,
                    induced_subgraph, parse_model, sample_graph)
from .report import CampaignReport
from .rng import RngStream
from .weighted import (WeightDistribution, blockscale_coloring, greedy_span_bound,
                       greedy_weighted_coloring, is_proper_weighted_coloring, local_weight_sums,
                       randomized_weighted_coloring, sample_weights, span)

CAMPAIGNS = ("domination", "theorem2", "theorem3a", "theorem3b")
DEFAULT_N = (64, 128, 256, 512)
MAX_THEOREM2_N = 512
SE_MARGIN = 5  # standard errors allowed above a tail bound


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Campaign parameters, loaded from JSON.

    ``trials`` is the Monte Carlo sample size per schema for the domination
    campaign and the number of sampled graphs per ``n`` otherwise.
    """

    campaign: str
    n: tuple[int, ...] = DEFAULT_N
    model: dict | None = None
    alpha: float | None = None
    beta: float | None = None
    beta_low: float | None = None
    beta_up: float | None = None
    gamma: float | None = None
    delta: float | None = None
    s: int | None = None
    weights: str = "uniform:3"
    trials: int | None = None
    master_seed: int = 0
    output: str | None = None
    # domination
    budget: int = 6
    random_schemas: int = 500
    random_max_involved: int = 8
    non_nested: int = 0
    mc_schemas: int = 50
    # theorem2
    subsets: int = 20
    subset_fraction: float = 0.5
    exact_n: int = 14
    # theorem3
    max_retries: int = 64

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "campaign" not in data:
            raise ConfigError("config needs a 'campaign'")
        data = dict(data)
        if "n" in data:
            ns = data["n"]
            data["n"] = tuple(ns) if isinstance(ns, (list, tuple)) else (ns,)
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        return d

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if self.campaign not in CAMPAIGNS:
            raise ConfigError(f"campaign must be one of {', '.join(CAMPAIGNS)}")
        if not self.n or any(not isinstance(x, int) or isinstance(x, bool) or x < 2 for x in self.n):
            raise ConfigError("n must be a list of integers >= 2")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")
        if self.trials is None:
            self.trials = 10_000 if self.campaign == "domination" else 10
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigError("trials must be a non-negative integer")
        try:
            dist = WeightDistribution.parse(self.weights)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.campaign == "domination":
            self._validate_domination()
            return
        if self.trials < 1:
            raise ConfigError("graph campaigns need trials >= 1")
        if self.model is None:
            self.model = {"kind": "homogeneous", "beta": 0.5 if self.beta is None else self.beta}
        for n in self.n:
            try:
                self.model_for(n)
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"bad probability model for n={n}: {exc}") from None
        if self.campaign == "theorem2":
            self._validate_theorem2()
        else:
            self._validate_theorem3(dist)

    def _validate_domination(self) -> None:
        if not 1 <= self.budget <= 7:
            raise ConfigError("budget must lie in 1..7 involved vertices")
        if not 1 <= self.random_max_involved <= 10:
            raise ConfigError("random_max_involved must lie in 1..10")
        for key in ("random_schemas", "non_nested", "mc_schemas"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative")

    def _model_beta(self) -> float:
        if self.model.get("kind") in ("homogeneous", "block") and "beta" in self.model:
            return float(self.model["beta"])
        return 0.0

    def _validate_theorem2(self) -> None:
        if max(self.n) > MAX_THEOREM2_N:
            raise ConfigError(f"theorem2 campaign needs n <= {MAX_THEOREM2_N}")
        base = self._model_beta() if self.beta is None else self.beta
        if self.beta_low is None:
            self.beta_low = base
        if self.beta_up is None:
            self.beta_up = base
        if self.alpha is None:
            self.alpha = self.beta_low if self.beta_low > 0 else 0.5
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if not 0 <= self.beta_up <= self.beta_low <= self.alpha:
            raise ConfigError("need 0 <= beta_up <= beta_low <= alpha")
        if not 0 < self.subset_fraction <= 1:
            raise ConfigError("subset_fraction must lie in (0, 1]")
        if not 2 <= self.exact_n <= 14:
            raise ConfigError("exact_n must lie in 2..14")
        if self.subsets < 0:
            raise ConfigError("subsets must be non-negative")

    def _validate_theorem3(self, dist: WeightDistribution) -> None:
        if self.beta is None:
            self.beta = self._model_beta()
        b = self.beta
        if not 0 < b < 1:
            raise ConfigError("beta must lie in (0, 1)")
        top = dist.moment_order
        if self.s is None:
            if self.campaign == "theorem3a":
                self.s = int(top) if math.isfinite(top) else math.floor(1 / (1 - b)) + 1
            else:
                self.s = int(top) if math.isfinite(top) else 8
        if not isinstance(self.s, int) or self.s < 1:
            raise ConfigError("s must be a positive integer")
        if self.s > top:
            raise ConfigError(f"weights {dist} lack a finite moment of order 2s = {2 * self.s}")
        if self.max_retries < 1:
            raise ConfigError("max_retries must be positive")
        if self.campaign == "theorem3a":
            if not self.s > 1 / (1 - b):
                raise ConfigError(f"need s > 1/(1 - beta) = {1 / (1 - b):.4g}")
            return
        s = self.s
        if not b > 2 / s:
            raise ConfigError(f"need beta > 2/s = {2 / s:.4g}")
        room = b / 2 - 1 / s
        if self.gamma is None:
            self.gamma = room / 2
        if not 0 < self.gamma < room:
            raise ConfigError(f"need 0 < gamma < beta/2 - 1/s = {room:.4g}")
        if self.delta is None:
            self.delta = min(0.1, (2 - 2 * b) / 2, (s * b - 2) / 2)
        d = self.delta
        if not (d > 0 and 2 - b > b + d and b / 2 - 1 / s - d / (2 * s) > 0):
            raise ConfigError("delta must satisfy delta > 0, 2 - beta > beta + delta "
                              "and beta/2 - 1/s - delta/(2s) > 0")

    # -- helpers --------------------------------------------------------------

    def model_for(self, n: int):
        model = parse_model(self.model, n)
        model.check_size(n)
        return model

    @property
    def distribution(self) -> WeightDistribution:
        return WeightDistribution.parse(self.weights)


def _stream(cfg: ExperimentConfig, n: int, trial: int) -> RngStream:
    return RngStream(cfg.master_seed, n).child(trial)


def _mean_se(flags) -> tuple[float, float]:
    flags = list(flags)
    if not flags:
        return math.nan, math.nan
    f = sum(flags) / len(flags)
    return f, math.sqrt(f * (1 - f) / len(flags))


def fit_loglog(ns, ys, level: float = 0.95) -> dict:
    """Least-squares slope of ``log y`` on ``log n`` with a two-sided confidence band."""
    pts = [(math.log(n), math.log(y)) for n, y in zip(ns, ys) if y > 0]
    out = {"points": len(pts), "slope": None, "intercept": None, "stderr": None,
           "ci_low": None, "ci_high": None, "level": level}
    if len(pts) < 2:
        return out
    xs, vs = zip(*pts)
    if len(set(xs)) < 2:
        return out
    fit = stats.linregress(xs, vs)
    out.update(slope=float(fit.slope), intercept=float(fit.intercept))
    if len(pts) > 2:
        half = float(stats.t.ppf(0.5 + level / 2, len(pts) - 2)) * float(fit.stderr)
        out.update(stderr=float(fit.stderr), ci_low=float(fit.slope) - half,
                   ci_high=float(fit.slope) + half)
    return out


def _fan_out(fn, tasks, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))  # map keeps task order


# -- domination ----------------------------------------------------------------

DOMINATION_COLUMNS = ["schema_id", "k", "weak_nested", "strict_nested", "formula", "p_dom",
                      "oracle", "mc", "mc_stderr"]
_DOMINATION_EXTRA = ["source", "involved", "independent", "oracle_above_p_dom", "expected_rtot",
                     "mc_within_3se", "mc_rtot_var", "mc_rtot_var_stderr", "rtot_var_limit",
                     "schema"]


def _domination_corpus(cfg: ExperimentConfig) -> list[tuple[str, DominationSchema]]:
    corpus = [("exhaustive", s) for s in enumerate_weak_nested(cfg.budget)]
    gen = RngStream(cfg.master_seed, 0).generator()
    corpus += [("random", random_weak_nested(gen, cfg.random_max_involved))
               for _ in range(cfg.random_schemas)]
    if cfg.non_nested:
        # the shared-neighbourhood pair: oracle 1/3 against p_dom 1/4
        corpus.append(("fixture", DominationSchema.from_mapping(3, {1: [3], 2: [3]})))
        gen = RngStream(cfg.master_seed, 1).generator()
        corpus += [("non_nested", random_schema(gen, min(cfg.random_max_involved, 8)))
                   for _ in range(cfg.non_nested)]
    return corpus


def _spread(count: int, total: int) -> set[int]:
    if count <= 0 or total == 0:
        return set()
    if count >= total:
        return set(range(total))
    if count == 1:
        return {0}
    return {round(i * (total - 1) / (count - 1)) for i in range(count)}


def run_domination_campaign(cfg: ExperimentConfig, jobs: int = 1) -> CampaignReport:
    corpus = _domination_corpus(cfg)
    with_mc = cfg.trials > 0
    columns = DOMINATION_COLUMNS + _DOMINATION_EXTRA
    if not with_mc:
        drop = {"mc", "mc_stderr", "mc_within_3se", "mc_rtot_var", "mc_rtot_var_stderr",
                "rtot_var_limit"}
        columns = [c for c in columns if c not in drop]
    report = CampaignReport("domination", cfg.to_dict())
    table = report.table("schemas", columns)
    mc_ids = _spread(cfg.mc_schemas, len(corpus)) if with_mc else set()
    mc_stream = RngStream(cfg.master_seed, 2)
    for sid, (source, s) in enumerate(corpus):
        weak, _ = check_weak_nested(s)
        oracle = domination_probability_bruteforce(s)
        pd = p_dom(s)
        row = dict(schema_id=sid, k=s.k, weak_nested=weak, strict_nested=check_strict_nested(s),
                   formula=domination_probability_formula(s) if weak else None, p_dom=pd,
                   oracle=oracle, source=source, involved=len(s.involved()),
                   independent=independence_check(s), oracle_above_p_dom=oracle > pd,
                   expected_rtot=expected_rtot(s), schema=s.compact())
        if with_mc and sid in mc_ids:
            est = simulate_domination(s, cfg.trials, mc_stream.child(sid))
            row.update(mc=est.p_dom, mc_stderr=est.p_dom_stderr,
                       mc_within_3se=abs(est.p_dom - float(oracle)) <= 3 * est.p_dom_stderr,
                       mc_rtot_var=est.rtot_var, mc_rtot_var_stderr=est.rtot_var_stderr,
                       rtot_var_limit=float(row["expected_rtot"]) + 4 * est.rtot_var_stderr)
        table.add(**row)
    report.require("formula_equals_oracle", "schemas", "formula", "==", "oracle")
    report.require("formula_at_most_p_dom", "schemas", "formula", "<=", "p_dom")
    report.require("independent_iff_strict", "schemas", "independent", "iff", "strict_nested",
                   where="weak_nested")
    if with_mc:
        report.require("rtot_var_at_most_mean", "schemas", "mc_rtot_var", "<=", "rtot_var_limit",
                       where="weak_nested")
    report.evaluate()
    rows = table.rows
    mc_rows = [r for r in rows if r.get("mc") is not None]
    report.summary = {
        "schemas": len(rows),
        "weak_nested": sum(r["weak_nested"] for r in rows),
        "strict_nested": sum(r["strict_nested"] for r in rows),
        "by_source": {src: sum(r["source"] == src for r in rows)
                      for src in ("exhaustive", "random", "fixture", "non_nested")},
        "formula_oracle_equal_rate": _rate(r["formula"] == r["oracle"] for r in rows
                                           if r["weak_nested"]),
        "mc_schemas": len(mc_rows),
        "mc_within_3se_rate": _rate(r["mc_within_3se"] for r in mc_rows),
        "oracle_above_p_dom": [r["schema_id"] for r in rows if r["oracle_above_p_dom"]][:50],
        "oracle_above_p_dom_count": sum(r["oracle_above_p_dom"] for r in rows),
        "violations": report.violations,
    }
    return report


def _rate(flags) -> float | None:
    flags = list(flags)
    return sum(flags) / len(flags) if flags else None


# -- theorem 2 -------------------------------------------------------------------


def _theorem2_trial(task) -> dict:
    cfg, n, trial = task
    model = cfg.model_for(n)
    base = _stream(cfg, n, trial)
    g = sample_graph(model, n, base.child(0))
    p_low, p_up = model.min_max(n)  # every pair probability lies in between
    log_n = math.log(n)
    eps = 1 / math.sqrt(log_n)

    stable = greedy_stable_set(g)
    col = stable_set_removal_coloring(g)
    mad = max_average_degree_exact(g) if g.m else None
    h_av = mad.h_av if mad else Fraction(0)
    sq, cube, _ = hav_bounds(g)
    t_split = n ** cfg.alpha * log_n ** 3
    h_route = max(t_split, (n - 1) * float(p_up) * (1 + eps))
    lower_target = n ** (1 - cfg.alpha) / log_n ** 3
    run = dict(
        n=n, trial=trial, p_low=p_low, p_up=p_up, m=g.m, max_degree=g.max_degree,
        d_av=g.average_degree, h_av=h_av, bound_sqrt=sq, bound_cuberoot=cube,
        h_route=h_route, h_av_below_route=h_av <= h_route,
        greedy_alpha=len(stable), greedy_stable=g.is_stable(stable),
        caro_wei=sum((Fraction(1, g.degree(v) + 1) for v in g.vertices), Fraction(0)),
        greedy_colors=col.num_colors, greedy_proper=col.is_proper(g),
        removal_bound=min(t[2] for t in col.trace),
        chi_bound_hav=chi_upper_bound_mad(g, h_av), chi_bound_route=chi_upper_bound_mad(g, h_route),
        lower_target=lower_target, lower_ratio=col.num_colors / lower_target,
    )

    # exact quantities on an induced subsample small enough for the exact solvers
    gen = base.child(1).generator()
    size = min(n, cfg.exact_n)
    picked = sorted(int(v) + 1 for v in gen.permutation(n)[:size])
    sub, _ = induced_subgraph(g, picked)
    alpha = len(max_stable_set_exact(sub))
    chi = chromatic_number_exact(sub)
    h_sub = max_average_degree_exact(sub).h_av if sub.m else Fraction(0)
    exact = dict(n=n, trial=trial, sub_n=sub.n, sub_m=sub.m, alpha=alpha,
                 n_over_alpha=Fraction(sub.n, alpha), chi=chi, h_av=h_sub,
                 chi_bound=chi_upper_bound_mad(sub, h_sub),
                 removal_colors=stable_set_removal_coloring(sub, exact=True).num_colors)

    # edge counts of random large vertex subsets against the deviation estimate
    subsets = []
    if eps < 0.5:
        gen = base.child(2).generator()
        l = max(2, round(cfg.subset_fraction * n))
        for i in range(cfg.subsets):
            vs = sorted(int(v) + 1 for v in gen.permutation(n)[:l])
            inside = set(vs)
            m_v = sum(1 for u, v in g.edges if u in inside and v in inside)
            pav = average_edge_probability(model, vs)
            mu = math.comb(l, 2) * float(pav)
            subsets.append(dict(
                n=n, trial=trial, subset=i, l=l, pav=pav,
                pav_low=Fraction(p_low), pav_up=Fraction(p_up), mu=mu, m_v=m_v, eps=eps,
                deviates=abs(m_v - mu) >= eps * mu, upper_exceeds=m_v >= mu * (1 + eps),
                tail_bound=bernoulli_tail_bound(mu, eps),
                upper_tail_bound=math.exp(-eps * eps * mu / 4)))
    return {"run": run, "exact": exact, "subsets": subsets}


def _stable_threshold(n: int, p_low: float) -> tuple[int | None, float]:
    """Smallest ``t`` with ``C(n, t) exp(-C(t, 2) p_low) <= 1/2`` and that bound."""
    for t in range(2, n + 1):
        log_u = (math.lgamma(n + 1) - math.lgamma(t + 1) - math.lgamma(n - t + 1)
                 - math.comb(t, 2) * p_low)
        if log_u <= math.log(0.5):
            return t, math.exp(log_u)
    return None, math.nan


def run_theorem2_campaign(cfg: ExperimentConfig, jobs: int = 1) -> CampaignReport:
    tasks = [(cfg, n, t) for n in cfg.n for t in range(cfg.trials)]
    results = _fan_out(_theorem2_trial, tasks, jobs)
    report = CampaignReport("theorem2", cfg.to_dict())
    runs = report.table("runs", list(results[0]["run"]))
    exact = report.table("exact", list(results[0]["exact"]))
    subset_cols = ["n", "trial", "subset", "l", "pav", "pav_low", "pav_up", "mu", "m_v", "eps",
                   "deviates", "upper_exceeds", "tail_bound", "upper_tail_bound"]
    subsets = report.table("subsets", subset_cols)
    dev = report.table("deviation", [
        "n", "subsets", "eps", "dev_freq", "dev_stderr", "tail_bound_mean", "tail_limit",
        "within_freq", "upper_freq", "upper_stderr", "upper_bound_mean", "upper_limit"])
    tail = report.table("stable_tail", [
        "n", "trials", "p_low", "t_star", "union_bound", "freq", "stderr", "limit",
        "paper_threshold"])
    for res in results:
        runs.add(**res["run"])
        exact.add(**res["exact"])
        for row in res["subsets"]:
            subsets.add(**row)

    for n in cfg.n:
        rows = [r for r in subsets.rows if r["n"] == n]
        if rows:
            freq, se = _mean_se(r["deviates"] for r in rows)
            bound = statistics.fmean(r["tail_bound"] for r in rows)
            ufreq, use = _mean_se(r["upper_exceeds"] for r in rows)
            ubound = statistics.fmean(r["upper_tail_bound"] for r in rows)
            dev.add(n=n, subsets=len(rows), eps=rows[0]["eps"], dev_freq=freq, dev_stderr=se,
                    tail_bound_mean=bound, tail_limit=bound + SE_MARGIN * se,
                    within_freq=1 - freq, upper_freq=ufreq, upper_stderr=use,
                    upper_bound_mean=ubound, upper_limit=ubound + SE_MARGIN * use)
        nrows = [r for r in runs.rows if r["n"] == n]
        p_low = float(nrows[0]["p_low"])
        t_star, union = _stable_threshold(n, p_low)
        if t_star is not None:
            freq, se = _mean_se(r["greedy_alpha"] >= t_star for r in nrows)
            tail.add(n=n, trials=len(nrows), p_low=p_low, t_star=t_star, union_bound=union,
                     freq=freq, stderr=se, limit=union + SE_MARGIN * se,
                     paper_threshold=n ** cfg.alpha * math.log(n) ** 3)

    report.require("d_av_at_most_h_av", "runs", "d_av", "<=", "h_av")
    report.require("h_av_at_most_max_degree", "runs", "h_av", "<=", "max_degree")
    report.require("h_av_at_most_sqrt_2m", "runs", "h_av", "<=", "bound_sqrt")
    report.require("h_av_at_most_cuberoot", "runs", "h_av", "<=", "bound_cuberoot")
    report.require("greedy_stable_set_is_stable", "runs", "greedy_stable", "true")
    report.require("caro_wei", "runs", "caro_wei", "<=", "greedy_alpha")
    report.require("greedy_colouring_proper", "runs", "greedy_proper", "true")
    report.require("n_over_alpha_at_most_chi", "exact", "n_over_alpha", "<=", "chi")
    report.require("chi_at_most_mad_bound", "exact", "chi", "<=", "chi_bound")
    report.require("chi_at_most_removal", "exact", "chi", "<=", "removal_colors")
    report.require("pav_above_low", "subsets", "pav_low", "<=", "pav")
    report.require("pav_below_up", "subsets", "pav", "<=", "pav_up")
    report.require("deviation_frequency", "deviation", "dev_freq", "<=", "tail_limit")
    report.require("upper_tail_frequency", "deviation", "upper_freq", "<=", "upper_limit")
    report.require("stable_tail_frequency", "stable_tail", "freq", "<=", "limit")
    report.evaluate()

    ns = list(cfg.n)
    med_ratio = [statistics.median(r["lower_ratio"] for r in runs.rows if r["n"] == n) for n in ns]
    med_colors = [statistics.median(r["greedy_colors"] for r in runs.rows if r["n"] == n) for n in ns]
    report.summary = {
        "runs": len(runs.rows),
        "median_lower_ratio": dict(zip(map(str, ns), med_ratio)),
        "median_greedy_colors": dict(zip(map(str, ns), med_colors)),
        "greedy_colors_slope": fit_loglog(ns, med_colors),
        "h_av_below_route_rate": _rate(r["h_av_below_route"] for r in runs.rows),
        "violations": report.violations,
    }
    return report


# -- theorem 3 -------------------------------------------------------------------


def _vertex_averages(model, n: int) -> list[Fraction]:
    if isinstance(model, Homogeneous):
        return [model.p] * n
    if isinstance(model, Block):
        cache: dict[int, Fraction] = {}
        out = []
        for v in range(1, n + 1):
            b = model.block_of(v)
            if b not in cache:
                cache[b] = model.vertex_average(v, n)
            out.append(cache[b])
        return out
    return [model.vertex_average(v, n) for v in range(1, n + 1)]


def _colourings(cfg: ExperimentConfig, g, w, base: RngStream) -> dict:
    greedy = greedy_weighted_coloring(g, w)
    rnd = randomized_weighted_coloring(g, w, base.child(2), max_retries=cfg.max_retries)
    K = math.ceil(w.max_weight) if len(w) else 1
    mu = w.mean
    blk, r = blockscale_coloring(g, w)
    return dict(
        greedy_span=span(g, greedy), greedy_bound=greedy_span_bound(g, w) if g.m else 0,
        greedy_proper=is_proper_weighted_coloring(g, w, greedy)[0],
        K=K, theta=rnd.theta, n_bad=rnd.n_bad, bad_threshold=rnd.threshold,
        retries=rnd.retries_used, accepted=rnd.accepted, rand_span=span(g, rnd.labels),
        rand_bound=2 * math.sqrt(2 * g.m * K * mu) + K + 1,
        rand_proper=is_proper_weighted_coloring(g, w, rnd.labels)[0],
        block_colors=r, block_span=span(g, blk), block_bound=K * (r - 1),
        block_proper=is_proper_weighted_coloring(g, w, blk)[0],
    )


def _theorem3a_trial(task) -> dict:
    cfg, n, trial = task
    model = cfg.model_for(n)
    base = _stream(cfg, n, trial)
    g = sample_graph(model, n, base.child(0))
    w = sample_weights(g, cfg.distribution, base.child(1))
    b = cfg.beta
    pav = _vertex_averages(model, n)
    c1 = float(min(pav)) * n ** b
    c2 = float(max(pav)) * n ** b
    lo, hi = c1 * n ** (1 - b) / 2, 2 * c2 * n ** (1 - b)
    eps = (n - 2) / (2 * (n - 1))
    degrees = [g.degree(v) for v in g.vertices]
    out = sum(1 for d in degrees if not lo <= d <= hi)
    bounds = [bernoulli_tail_bound((n - 1) * float(p), eps) if eps > 0 else 1.0 for p in pav]
    lws = local_weight_sums(g, w) if g.m else None
    row = dict(n=n, trial=trial, m=g.m, max_degree=g.max_degree, c1=c1, c2=c2, band_low=lo,
               band_high=hi, out_of_band=out, eps=eps, tail_bound_mean=statistics.fmean(bounds),
               max_j=lws.max_sum if lws else 0.0, lemma_bound=lws.greedy_bound if lws else 1)
    row.update(_colourings(cfg, g, w, base))
    row["greedy_ratio"] = row["greedy_span"] / n ** (1 - b)
    row["degree_ratio"] = row["greedy_span"] / g.max_degree if g.max_degree else None
    return row


def _theorem3b_trial(task) -> dict:
    cfg, n, trial = task
    model = cfg.model_for(n)
    base = _stream(cfg, n, trial)
    g = sample_graph(model, n, base.child(0))
    dist = cfg.distribution
    w = sample_weights(g, dist, base.child(1))
    s, b = cfg.s, cfg.beta
    pav = float(average_edge_probability(model, range(1, n + 1)))
    mean_edges = math.comb(n, 2) * pav
    mu0 = dist.mean
    w_tot = float(w.total)
    wt_threshold = n ** ((2 + cfg.delta) / s)
    var = dist.variance
    row = dict(
        n=n, trial=trial, m=g.m, pav=pav, edge_low=mean_edges / 2, edge_high=3 * mean_edges / 2,
        e_edge=mean_edges / 2 <= g.m <= 3 * mean_edges / 2,
        edge_fail_bound=min(1.0, 2 * math.exp(-mean_edges / 16)),
        mu0=mu0, w_tot=w_tot, w_tot_limit=2 * g.m * mu0, w_tot_ok=w_tot <= 2 * g.m * mu0,
        w_tot_rel_dev=abs(w_tot - g.m * mu0) / (g.m * mu0) if g.m else 0.0,
        w_tot_fail_bound=min(1.0, var / (g.m * mu0 ** 2)) if g.m else 0.0,
        max_weight=float(w.max_weight), wt_threshold=wt_threshold,
        e_wt=w.max_weight <= wt_threshold,
        wt_fail_bound=min(1.0, g.m * dist.moment(s) / n ** (2 + cfg.delta)),
    )
    row.update(_colourings(cfg, g, w, base))
    row["rand_ratio"] = row["rand_span"] / n ** (1 - cfg.gamma)
    return row


def _require_colouring_checks(report: CampaignReport) -> None:
    report.require("greedy_proper", "runs", "greedy_proper", "true")
    report.require("greedy_span_bound", "runs", "greedy_span", "<=", "greedy_bound")
    report.require("randomized_proper", "runs", "rand_proper", "true")
    report.require("randomized_accepted", "runs", "accepted", "true")
    report.require("randomized_span_bound", "runs", "rand_span", "<=", "rand_bound",
                   where="accepted")
    report.require("blockscale_proper", "runs", "block_proper", "true")
    report.require("blockscale_span_bound", "runs", "block_span", "<=", "block_bound")


def run_theorem3_campaign(cfg: ExperimentConfig, part: str, jobs: int = 1) -> CampaignReport:
    if part not in ("a", "b"):
        raise ValueError("part must be 'a' or 'b'")
    fn = _theorem3a_trial if part == "a" else _theorem3b_trial
    tasks = [(cfg, n, t) for n in cfg.n for t in range(cfg.trials)]
    results = _fan_out(fn, tasks, jobs)
    report = CampaignReport("theorem3" + part, cfg.to_dict())
    runs = report.table("runs", list(results[0]))
    for row in results:
        runs.add(**row)
    _require_colouring_checks(report)
    ns = list(cfg.n)
    if part == "a":
        summ = report.table("per_n", [
            "n", "vertices", "out_freq", "out_stderr", "tail_bound_mean", "tail_limit",
            "in_band_freq", "in_band_floor", "median_greedy_span", "median_greedy_ratio",
            "median_max_degree"])
        for n in ns:
            rows = [r for r in runs.rows if r["n"] == n]
            count = n * len(rows)
            f = sum(r["out_of_band"] for r in rows) / count
            se = math.sqrt(f * (1 - f) / count)
            bound = statistics.fmean(r["tail_bound_mean"] for r in rows)
            summ.add(n=n, vertices=count, out_freq=f, out_stderr=se, tail_bound_mean=bound,
                     tail_limit=bound + SE_MARGIN * se, in_band_freq=1 - f,
                     in_band_floor=1 - 10 * bound,
                     median_greedy_span=statistics.median(r["greedy_span"] for r in rows),
                     median_greedy_ratio=statistics.median(r["greedy_ratio"] for r in rows),
                     median_max_degree=statistics.median(r["max_degree"] for r in rows))
        report.require("neighbour_band_frequency", "per_n", "out_freq", "<=", "tail_limit")
        report.require("neighbour_band_floor", "per_n", "in_band_freq", ">=", "in_band_floor")
        key = "median_greedy_span"
    else:
        summ = report.table("per_n", [
            "n", "trials", "edge_fail_freq", "edge_fail_stderr", "edge_fail_bound", "edge_limit",
            "w_tot_fail_freq", "w_tot_fail_bound", "w_tot_limit", "wt_fail_freq",
            "wt_fail_stderr", "wt_fail_bound", "wt_limit", "median_rand_span",
            "median_rand_ratio", "median_w_tot_rel_dev"])
        for n in ns:
            rows = [r for r in runs.rows if r["n"] == n]
            ef, ese = _mean_se(not r["e_edge"] for r in rows)
            eb = statistics.fmean(r["edge_fail_bound"] for r in rows)
            tf, tse = _mean_se(not r["w_tot_ok"] for r in rows)
            tb = statistics.fmean(r["w_tot_fail_bound"] for r in rows)
            wf, wse = _mean_se(not r["e_wt"] for r in rows)
            wb = statistics.fmean(r["wt_fail_bound"] for r in rows)
            summ.add(n=n, trials=len(rows), edge_fail_freq=ef, edge_fail_stderr=ese,
                     edge_fail_bound=eb, edge_limit=eb + SE_MARGIN * ese,
                     w_tot_fail_freq=tf, w_tot_fail_bound=tb, w_tot_limit=tb + SE_MARGIN * tse,
                     wt_fail_freq=wf, wt_fail_stderr=wse, wt_fail_bound=wb,
                     wt_limit=wb + SE_MARGIN * wse,
                     median_rand_span=statistics.median(r["rand_span"] for r in rows),
                     median_rand_ratio=statistics.median(r["rand_ratio"] for r in rows),
                     median_w_tot_rel_dev=statistics.median(r["w_tot_rel_dev"] for r in rows))
        report.require("edge_count_frequency", "per_n", "edge_fail_freq", "<=", "edge_limit")
        report.require("total_weight_frequency", "per_n", "w_tot_fail_freq", "<=", "w_tot_limit")
        report.require("max_weight_frequency", "per_n", "wt_fail_freq", "<=", "wt_limit")
        key = "median_rand_span"
    report.evaluate()
    medians = [r[key] for r in summ.rows]
    exponent = 1 - (cfg.beta if part == "a" else cfg.gamma)
    report.summary = {
        "runs": len(runs.rows),
        "span_slope": fit_loglog(ns, medians),
        "reference_exponent": exponent,
        "unaccepted_runs": sum(not r["accepted"] for r in runs.rows),
        "violations": report.violations,
    }
    return report


def run_campaign(cfg: ExperimentConfig, jobs: int = 1) -> CampaignReport:
    if cfg.campaign == "domination":
        return run_domination_campaign(cfg, jobs)
    if cfg.campaign == "theorem2":
        return run_theorem2_campaign(cfg, jobs)
    return run_theorem3_campaign(cfg, cfg.campaign[-1], jobs)
