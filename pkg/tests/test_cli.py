from __future__ import annotations

import json

import jsonschema
import pytest
from click.testing import CliRunner

from foldq import suites
from foldq.cli import main, parse_config, report_schema, word_count
from foldq.report import Report


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args, **kw):
        return runner.invoke(main, list(args), catch_exceptions=False, **kw)

    return go


def test_canonical_height_zero_is_single_row(run):
    r = run("canonical", "--preset", "A2", "--height", "0")
    assert r.exit_code == 0
    lines = r.output.strip().splitlines()
    assert len(lines) == 2
    assert lines[1].split()[-2:] == ["1", "1"]


def test_canonical_A2_height_4_lists_closed_form_monomials(run):
    r = run("canonical", "--preset", "A2", "--height", "4")
    assert r.exit_code == 0
    assert "f2*f1^(2)*f2" in r.output
    assert "f1^(2)*f2^(2)" in r.output


def test_canonical_A4_has_ten_pbw_columns(run):
    r = run("canonical", "--preset", "F_n1", "--n", "2", "--height", "2", "--format", "csv")
    header = r.output.splitlines()[0].split(",")
    assert [h for h in header if h.startswith("c")] == [f"c{k}" for k in range(1, 11)]


def test_pbw_table(run):
    r = run("pbw", "--preset", "A2")
    assert r.exit_code == 0
    assert "-q*f1*f2 + f2*f1" in r.output


def test_output_is_deterministic_and_schema_valid(run, tmp_path):
    a = run("canonical", "--preset", "A2", "--height", "3", "--format", "json").output
    b = run("canonical", "--preset", "A2", "--height", "3", "--format", "json").output
    assert a == b
    doc = json.loads(a)
    jsonschema.validate(doc, report_schema())
    out = tmp_path / "rows.json"
    run("canonical", "--preset", "A2", "--height", "3", "--format", "json", "--output", str(out))
    assert out.read_text() == a


def test_word_cap_refuses_with_estimate(run):
    r = CliRunner().invoke(main, ["canonical", "--preset", "A2", "--height", "6", "--max-words", "10"])
    assert r.exit_code == 2
    assert "estimated 20 words" in r.output
    assert word_count((3, 3)) == 20


def test_eval(run):
    r = run("eval", "f2*f1 - q*f1*f2")
    assert r.exit_code == 0 and r.output.strip() == "-q*f1*f2 + f2*f1"
    r = run("eval", "f1*f2 + f2*f1", "--preset", "A2", "--mod-J")
    assert r.output.strip() == "0"
    r = run("eval", "f2*f1^(2)*f2", "--preset", "A2", "--mod-J")
    assert r.output.strip().startswith("(1)*b")


def test_eval_errors():
    runner = CliRunner()
    r = runner.invoke(main, ["eval", "f1*f9"])
    assert r.exit_code == 2 and "position 3" in r.output
    r = runner.invoke(main, ["eval", "f1*f2", "--mod-J"])
    assert r.exit_code == 2 and "not" in r.output and "invariant" in r.output
    r = runner.invoke(main, ["eval", "f1", "--preset", "A_n5", "--mod-J"])
    assert r.exit_code == 2 and "isomorphism" in r.output


def test_verify_json_and_exit_codes(run, monkeypatch):
    r = run("verify", "rank2", "--format", "json")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    jsonschema.validate(doc, report_schema())
    assert doc["ok"] and {s["suite"] for s in doc["suites"]} == {
        "rank2-relations", "a2-canonical", "rank2-power-congruence"}

    def failing(*a, **k):
        rep = Report("broken")
        rep.add("1 = 2", False, "planted")
        return [rep]

    monkeypatch.setattr(suites, "run", failing)
    r = run("verify", "serre")
    assert r.exit_code == 1
    assert "FAIL [broken] 1 = 2: planted" in r.output


def test_config_file_mirrors_flags(run, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nheight = 1\nformat = csv\npreset = \"A2\"\n")
    assert parse_config(cfg.read_text()) == {"height": "1", "format": "csv", "preset": "A2"}
    r = run("--config", str(cfg), "canonical")
    assert r.output.splitlines()[0].startswith("weight,c1,c2,c3")
    assert len(r.output.splitlines()) == 4
    # explicit flags win over the file
    r = run("--config", str(cfg), "canonical", "--height", "0")
    assert len(r.output.splitlines()) == 2


def test_affine_commands(run):
    r = run("affine", "classify", "--case", "C", "--n", "2", "--levels", "0", "--format", "csv")
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "root,level,orbit,O,sigma"
    r = CliRunner().invoke(main, ["affine", "convex", "--case", "D", "--n", "1"])
    assert r.exit_code == 2 and "excluded" in r.output
    r = run("affine", "convex", "--case", "C", "--n", "2", "--orderings", "1", "--format", "json")
    assert r.exit_code == 0
    jsonschema.validate(json.loads(r.output), report_schema())


def test_thread_pool_preserves_order(monkeypatch):
    monkeypatch.setenv("FOLDQ_THREADS", "2")
    assert suites.thread_count() == 2
    a = [r.as_dict() for r in suites.run("rank2", workers=1)]
    b = [r.as_dict() for r in suites.run("rank2")]
    assert a == b
    monkeypatch.setenv("FOLDQ_THREADS", "bogus")
    assert suites.thread_count() == 1
