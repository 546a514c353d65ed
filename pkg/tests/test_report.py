import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest

from domcolor.report import CampaignReport, Table, emit_report, format_value, table_csv


def test_format_value():
    assert format_value(Fraction(1, 6)) == "1/6"
    assert format_value(Fraction(4)) == "4/1"
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(True) == "true" and format_value(False) == "false"
    assert format_value(None) == ""
    assert format_value(float("inf")) == "inf" and format_value(float("nan")) == "nan"
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(np.int64(7)) == "7"


def test_table_rejects_unknown_columns():
    t = Table(["a", "b"])
    t.add(a=1)
    with pytest.raises(KeyError):
        t.add(c=1)


def _report():
    rep = CampaignReport("demo", {"seed": 1})
    t = rep.table("rows", ["id", "lo", "hi", "flag", "use"])
    t.add(id=0, lo=Fraction(1, 3), hi=0.5, flag=True, use=True)
    t.add(id=1, lo=2, hi=1.0, flag=False, use=True)
    t.add(id=2, lo=5, hi=None, flag=True, use=True)
    t.add(id=3, lo=9, hi=1, flag=True, use=False)
    rep.require("lo_below_hi", "rows", "lo", "<=", "hi", where="use")
    rep.require("flag_set", "rows", "flag", "true")
    rep.require("flag_iff_use", "rows", "flag", "iff", "use")
    return rep


def test_checks_recomputed_from_columns():
    rep = _report()
    assert rep.evaluate() == 4
    lo_hi, flag, iff = rep.checks
    assert lo_hi.checked == 2 and lo_hi.violations == [1]
    assert flag.checked == 4 and flag.violations == [1]
    assert iff.violations == [1, 3]
    assert rep.violations == 4


def test_require_validation():
    rep = CampaignReport("x", {})
    with pytest.raises(ValueError):
        rep.require("bad", "t", "a", "<", "b")
    with pytest.raises(ValueError):
        rep.require("bad", "t", "a", "true", "b")
    with pytest.raises(ValueError):
        rep.require("bad", "t", "a", "<=")


def test_json_and_csv_output(tmp_path):
    rep = _report()
    rep.evaluate()
    [jpath] = emit_report(rep, "json", tmp_path / "demo.json")
    data = json.loads(jpath.read_text())
    assert data["tables"]["rows"]["columns"] == ["id", "lo", "hi", "flag", "use"]
    assert data["tables"]["rows"]["rows"][0] == [0, "1/3", 0.5, True, True]
    assert data["checks"][0]["violations"] == 1
    written = emit_report(rep, "csv", tmp_path / "demo.csv")
    assert [p.name for p in written] == ["demo.csv", "demo_checks.csv"]
    rows = list(csv.reader(io.StringIO(written[0].read_text())))
    assert rows[0] == ["id", "lo", "hi", "flag", "use"]
    assert rows[1] == ["0", "1/3", "0.5", "true", "true"]
    assert rows[3][2] == ""
    checks = list(csv.reader(io.StringIO(written[1].read_text())))
    assert checks[0][:4] == ["check", "table", "lhs", "relation"]
    with pytest.raises(ValueError):
        emit_report(rep, "xml", tmp_path / "demo.xml")


def test_extra_tables_get_suffixed_files(tmp_path):
    rep = _report()
    rep.table("more", ["x"]).add(x=1)
    names = [p.name for p in emit_report(rep, "csv", tmp_path / "r.csv")]
    assert names == ["r.csv", "r_more.csv", "r_checks.csv"]


def test_empty_campaign_gives_header_only_csv(tmp_path):
    rep = CampaignReport("empty", {})
    rep.table("schemas", ["schema_id", "k", "formula"])
    path = emit_report(rep, "csv", tmp_path / "e.csv")[0]
    assert path.read_text() == "schema_id,k,formula\n"
    assert table_csv(Table(["a"])) == "a\n"


def test_rerun_is_byte_identical(tmp_path):
    a = emit_report(_report(), "json", tmp_path / "a.json")[0].read_bytes()
    b = emit_report(_report(), "json", tmp_path / "b.json")[0].read_bytes()
    assert a == b
