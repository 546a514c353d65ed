import json
import math

import pytest

from domcolor.experiments import (ConfigError, ExperimentConfig, fit_loglog, run_campaign,
                                  run_domination_campaign, run_theorem2_campaign,
                                  run_theorem3_campaign)
from domcolor.report import emit_report


def cfg(**kw):
    return ExperimentConfig.from_dict(kw)


def test_config_defaults_and_rejections():
    c = cfg(campaign="domination")
    assert c.trials == 10_000 and c.n == (64, 128, 256, 512)
    c = cfg(campaign="theorem2", n=[32])
    assert c.beta_low == c.beta_up == 0.5 and c.alpha == 0.5 and c.trials == 10
    bad = [
        dict(campaign="nope"),
        dict(campaign="domination", colour="red"),
        dict(n=[32]),
        dict(campaign="theorem2", n=[1024]),
        dict(campaign="theorem2", n=[32], beta_low=0.3, beta_up=0.4),
        dict(campaign="theorem2", n=[32], alpha=1.2),
        dict(campaign="theorem3a", n=[32], beta=1.0),
        dict(campaign="theorem3a", n=[32], beta=0.5, s=2),
        dict(campaign="theorem3a", n=[32], beta=0.5, weights="pareto:3"),
        dict(campaign="theorem3b", n=[32], beta=0.5, s=4),
        dict(campaign="theorem3b", n=[32], beta=0.5, s=8, gamma=0.5),
        dict(campaign="theorem3b", n=[32], beta=0.5, s=8, delta=2.0),
        dict(campaign="theorem2", n=[32], trials=0),
        dict(campaign="domination", budget=9),
        dict(campaign="theorem3b", n=[32], weights="gamma:2"),
    ]
    for d in bad:
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(d)


def test_theorem3b_defaults_satisfy_constraints():
    c = cfg(campaign="theorem3b", n=[32], beta=0.5)
    assert c.s == 8
    assert 0 < c.gamma < c.beta / 2 - 1 / c.s
    d = c.delta
    assert d > 0 and 2 - c.beta > c.beta + d and c.beta / 2 - 1 / c.s - d / (2 * c.s) > 0
    c = cfg(campaign="theorem3a", n=[32], beta=0.5, weights="pareto:7")
    assert c.s == 3 and c.s > 1 / (1 - c.beta)


def test_config_load(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"campaign": "theorem3a", "n": 40, "beta": 0.5}))
    assert ExperimentConfig.load(p).n == (40,)
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(p)


def test_fit_loglog_recovers_slope():
    ns = [10, 20, 40, 80]
    fit = fit_loglog(ns, [3 * n ** 0.5 for n in ns])
    assert fit["slope"] == pytest.approx(0.5)
    assert fit["intercept"] == pytest.approx(math.log(3))
    noisy = fit_loglog(ns, [n ** 0.5 * f for n, f in zip(ns, (1.1, 0.9, 1.05, 0.97))])
    assert noisy["ci_low"] < noisy["slope"] < noisy["ci_high"]
    assert noisy["ci_low"] <= 0.5 <= noisy["ci_high"]
    assert fit_loglog([10, 20], [1, 2])["ci_low"] is None
    assert fit_loglog([10], [1])["slope"] is None


def test_domination_campaign_small():
    rep = run_domination_campaign(cfg(campaign="domination", budget=4, random_schemas=20,
                                      random_max_involved=6, non_nested=10, mc_schemas=5,
                                      trials=2000))
    assert rep.violations == 0
    rows = rep.tables["schemas"].rows
    assert any(r["oracle_above_p_dom"] for r in rows)
    weak = [r for r in rows if r["weak_nested"]]
    assert all(r["formula"] == r["oracle"] for r in weak)
    assert all(r["formula"] is None for r in rows if not r["weak_nested"])
    assert sum(r.get("mc") is not None for r in rows) == 5
    assert rep.summary["formula_oracle_equal_rate"] == 1.0
    cols = rep.tables["schemas"].columns
    assert cols[:9] == ["schema_id", "k", "weak_nested", "strict_nested", "formula", "p_dom",
                        "oracle", "mc", "mc_stderr"]


def test_domination_without_trials_drops_mc_columns():
    rep = run_domination_campaign(cfg(campaign="domination", budget=3, random_schemas=0,
                                      trials=0))
    cols = rep.tables["schemas"].columns
    assert "mc" not in cols and "mc_stderr" not in cols and "mc_rtot_var" not in cols
    assert {"formula", "oracle", "p_dom"} <= set(cols)
    assert rep.violations == 0


def test_theorem2_complete_graph_chain_is_tight():
    rep = run_theorem2_campaign(cfg(campaign="theorem2", n=[8, 12], model={"kind": "homogeneous",
                                    "p": 1}, trials=2))
    assert rep.violations == 0
    for r in rep.tables["exact"].rows:
        assert r["alpha"] == 1 and r["chi"] == r["sub_n"] == r["n_over_alpha"]
    for r in rep.tables["runs"].rows:
        assert r["greedy_colors"] == r["n"]


def test_theorem2_small_grid():
    rep = run_theorem2_campaign(cfg(campaign="theorem2", n=[64, 128], trials=3, subsets=10))
    assert rep.violations == 0
    assert len(rep.tables["runs"].rows) == 6
    dev = rep.tables["deviation"].rows
    assert [r["n"] for r in dev] == [64, 128]
    for r in dev:
        assert r["dev_freq"] <= r["tail_limit"]
        assert r["eps"] == pytest.approx(1 / math.sqrt(math.log(r["n"])))


def test_theorem3a_constant_weights():
    rep = run_theorem3_campaign(cfg(campaign="theorem3a", n=[64, 128], beta=0.5,
                                    weights="constant:1", trials=3), "a")
    assert rep.violations == 0
    for r in rep.tables["runs"].rows:
        assert r["greedy_span"] <= r["max_degree"]
        assert r["rand_span"] <= r["rand_bound"]
    assert [r["n"] for r in rep.tables["per_n"].rows] == [64, 128]


def test_theorem3b_constant_weights_total_is_m():
    rep = run_theorem3_campaign(cfg(campaign="theorem3b", n=[64], beta=0.5,
                                    weights="constant:1", trials=3), "b")
    assert rep.violations == 0
    for r in rep.tables["runs"].rows:
        assert r["mu0"] == 1 and r["w_tot"] == r["m"] and r["w_tot_ok"]
        assert r["w_tot_rel_dev"] == 0 and r["e_wt"]


def test_theorem3b_uniform_weights_bounds_hold():
    rep = run_theorem3_campaign(cfg(campaign="theorem3b", n=[64, 128], beta=0.5,
                                    weights="uniform:3", trials=3), "b")
    assert rep.violations == 0
    assert all(r["accepted"] for r in rep.tables["runs"].rows)


def test_reruns_and_jobs_are_deterministic(tmp_path):
    c = cfg(campaign="theorem3a", n=[32, 48], beta=0.5, trials=4)
    a = emit_report(run_campaign(c), "json", tmp_path / "a.json")[0].read_bytes()
    b = emit_report(run_campaign(c), "json", tmp_path / "b.json")[0].read_bytes()
    d = emit_report(run_campaign(c, jobs=2), "json", tmp_path / "d.json")[0].read_bytes()
    assert a == b == d
    other = cfg(campaign="theorem3a", n=[32, 48], beta=0.5, trials=4, master_seed=1)
    e = emit_report(run_campaign(other), "json", tmp_path / "e.json")[0].read_bytes()
    assert e != a
