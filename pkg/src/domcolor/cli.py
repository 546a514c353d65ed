"""Command line entry point: ``domcolor {dominate,color,wcolor,experiment}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .coloring import (BudgetExceeded, MAX_CHROMATIC_EXACT_N, chi_upper_bound_mad, exact_coloring,
                       stable_set_removal_coloring)
from .density import max_average_degree_exact
from .domination import domination_report, parse_schema
from .experiments import ConfigError, ExperimentConfig, run_campaign
from .graph import parse_edge_list
from .report import emit_report
from .rng import RngStream
from .weighted import (WeightDistribution, blockscale_coloring, greedy_span_bound,
                       greedy_weighted_coloring, is_proper_weighted_coloring, local_weight_sums,
                       optimal_weighted_coloring, parse_weights, randomized_weighted_coloring,
                       sample_weights, span)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for bound violations here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _print(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_dominate(args) -> int:
    schema = parse_schema(_read(args.schema))
    rep = domination_report(schema, trials=args.trials, rng=RngStream(args.seed), oracle=args.oracle)
    _print(rep.to_dict())
    return 0


def cmd_color(args) -> int:
    g = parse_edge_list(_read(args.graph))
    out = {"n": g.n, "m": g.m}
    if args.exact:
        if g.n > MAX_CHROMATIC_EXACT_N:
            raise UsageError(f"--exact needs n <= {MAX_CHROMATIC_EXACT_N}")
        col = exact_coloring(g) if g.n else None
        out.update(method="exact", colors=list(col.colors) if col else [],
                   chi=col.num_colors if col else 0)
    else:
        col = stable_set_removal_coloring(g)
        out.update(method="stable_set_removal", colors=list(col.colors),
                   num_colors=max(col.colors, default=0),
                   trace=[list(t) for t in col.trace])
    if args.mad:
        if g.m:
            mad = max_average_degree_exact(g)
            out["mad"] = mad.to_dict()
            out["chi_bound"] = chi_upper_bound_mad(g, mad.h_av)
        else:
            out["mad"] = None
            out["chi_bound"] = chi_upper_bound_mad(g, 0) if g.n else 0
    _print(out)
    return 0


def _order(spec: str | None):
    if spec is None or spec in ("weight", "identity"):
        return spec
    return [int(x) for x in spec.replace(",", " ").split()]


def cmd_wcolor(args) -> int:
    g = parse_edge_list(_read(args.graph))
    if args.weights:
        w = parse_weights(_read(args.weights), g)
    else:
        w = sample_weights(g, WeightDistribution.parse(args.dist), RngStream(args.seed, 1))
    if args.theta is not None and args.algo != "random":
        raise UsageError("--theta applies to --algo random only")
    if args.order is not None and args.algo != "greedy":
        raise UsageError("--order applies to --algo greedy only")
    K = math.ceil(w.max_weight) if len(w) else 1
    out = {"n": g.n, "m": g.m, "algo": args.algo}
    if args.algo == "greedy":
        labels = greedy_weighted_coloring(g, w, _order(args.order))
    elif args.algo == "random":
        res = randomized_weighted_coloring(g, w, RngStream(args.seed, 2), theta=args.theta)
        labels = res.labels
        out.update(theta=res.theta, spacing=res.spacing, n_bad=res.n_bad,
                   bad_threshold=res.threshold, relabelled=res.n_relabel,
                   retries=res.retries_used, accepted=res.accepted)
    elif args.algo == "blockscale":
        labels, r = blockscale_coloring(g, w)
        out["colors"] = r
    else:
        try:
            chi_w, labels = optimal_weighted_coloring(g, w)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out["chi_w"] = chi_w
    proper, bad = is_proper_weighted_coloring(g, w, labels)
    bounds = {"lower_max_weight": K}
    if g.m:
        mu = float(w.mean)
        bounds.update(
            greedy=greedy_span_bound(g, w),
            local_average=float(local_weight_sums(g, w).greedy_bound),
            randomized=2 * math.sqrt(2 * g.m * K * mu) + K + 1,
        )
    out.update(labels=list(labels), span=span(g, labels), proper=proper,
               violated_edge=list(bad) if bad else None, bounds=bounds)
    _print(out)
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
    except ConfigError as exc:
        raise UsageError(f"invalid config: {exc}") from None
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    out = Path(args.out or cfg.output or ".")
    report = run_campaign(cfg, jobs=args.jobs)
    written = emit_report(report, "json", out / f"{cfg.campaign}.json")
    written += emit_report(report, "csv", out / f"{cfg.campaign}.csv")
    for c in report.checks:
        status = "ok" if not c.violations else f"{len(c.violations)} VIOLATIONS"
        print(f"{c.name}: {c.checked} rows checked, {status}")
    print("wrote " + " ".join(str(p) for p in written))
    return 2 if report.violations else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="domcolor",
                     description="Weighted domination probabilities and weighted graph colouring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dominate", help="domination probability of a schema")
    p.add_argument("--schema", required=True, help="schema file: 'n k' then 'v : D(v)' lines")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = none)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true", help="also run the exact enumeration oracle")
    p.set_defaults(func=cmd_dominate)

    p = sub.add_parser("color", help="stable-set-removal or exact colouring")
    p.add_argument("--graph", required=True, help="edge list: 'n m' then 'u v' lines")
    p.add_argument("--exact", action="store_true", help=f"exact colouring (n <= {MAX_CHROMATIC_EXACT_N})")
    p.add_argument("--mad", action="store_true", help="maximum average degree and the bound it gives")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("wcolor", help="weighted colouring")
    p.add_argument("--graph", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--weights", help="weights file: 'u v w' lines")
    src.add_argument("--dist", help="weight law, e.g. constant:1, uniform:3, pareto:5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algo", required=True, choices=["greedy", "random", "blockscale", "exact"])
    p.add_argument("--theta", type=int, help="label range of the randomized algorithm")
    p.add_argument("--order", help="greedy order: weight, identity or a vertex list")
    p.set_defaults(func=cmd_wcolor)

    p = sub.add_parser("experiment", help="run a property campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (default: config 'output' or .)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded, ValueError) as exc:
        print(f"domcolor: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
