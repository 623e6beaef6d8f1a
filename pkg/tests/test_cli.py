import csv
import io
import json

import pytest

from crq.cli import main, parse_gamma
from crq.compilers import compile_deep_transformer, run_deep
from crq.core import CrqTree, gen_random, serialize
from crq.core.gcrq import dumps_gcrq, expression_tree
from crq.core.serialize import load
from crq.harness import corrupt, envelope_fit, verify_corpus, verify_instance

from conftest import WORKED_EXAMPLE


@pytest.fixture
def corpus(tmp_path):
    out = tmp_path / "corpus"
    assert main(["gen", "--n", "15", "--count", "6", "--tie-free", "--seed", "3", "--out", str(out)]) == 0
    return out


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_parse_gamma():
    assert parse_gamma("-2..2") == [-2, -1, 0, 1, 2]
    assert parse_gamma("0,1") == [0, 1]


class TestGen:
    def test_single_leaf(self, capsys):
        code, cap = run(capsys, "gen", "--n", "1")
        body = json.loads(cap.out)
        assert code == 0 and len(body["nodes"]) == 1

    def test_deterministic_bytes(self, capsys):
        _, a = run(capsys, "gen", "--n", "31", "--seed", "5")
        _, b = run(capsys, "gen", "--n", "31", "--seed", "5")
        assert a.out == b.out

    def test_count(self, tmp_path):
        assert main(["gen", "--n", "7", "--count", "100", "--out", str(tmp_path)]) == 0
        assert len(list(tmp_path.glob("*.json"))) == 100

    def test_depth(self, capsys):
        _, cap = run(capsys, "gen", "--depth", "3")
        assert len(json.loads(cap.out)["nodes"]) == 15

    def test_count_needs_out(self, capsys):
        code, cap = run(capsys, "gen", "--count", "3")
        assert code == 2 and "--out" in cap.err


class TestEval:
    def test_worked_example(self, tmp_path, capsys):
        f = tmp_path / "worked.json"
        f.write_text(serialize(CrqTree.from_nested(WORKED_EXAMPLE)))
        code, cap = run(capsys, "eval", str(f))
        assert code == 0 and json.loads(cap.out)["value"] == [7, 6]

    def test_gcrq(self, tmp_path, capsys):
        f = tmp_path / "expr.json"
        f.write_text(dumps_gcrq(expression_tree(("mul", ("add", 2, 3), 6))))
        _, cap = run(capsys, "eval", str(f))
        assert json.loads(cap.out)["value"] == ["30"]

    def test_invalid_file(self, tmp_path, capsys):
        f = tmp_path / "bad.json"
        f.write_text('{"d": 1}')
        code, cap = run(capsys, "eval", str(f))
        assert code == 2 and "error" in cap.err


def test_sort_attaches_ordering(corpus, capsys):
    _, cap = run(capsys, "sort", str(corpus / "inst-00000.json"))
    assert json.loads(cap.out)["order"]["kind"] == "mr-sort"
    _, cap = run(capsys, "sort", "--kind", "reverse-bfs", str(corpus / "inst-00000.json"))
    assert json.loads(cap.out)["order"]["kind"] == "reverse-bfs"


@pytest.mark.parametrize("backend", ["deep", "cot", "rnn"])
def test_compile_and_run(corpus, capsys, backend):
    f = str(corpus / "inst-00001.json")
    code, cap = run(capsys, "compile", backend, f)
    assert code == 0 and "meta" in json.loads(cap.out)
    code, cap = run(capsys, "run", backend, f)
    rec = json.loads(cap.out)
    assert code == 0 and rec["match"] and rec["resources"]["backend"] == backend


class TestVerify:
    def test_clean_corpus(self, corpus, tmp_path, capsys):
        report = tmp_path / "report.jsonl"
        code, cap = run(capsys, "verify", str(corpus), "--out", str(report))
        lines = report.read_text().splitlines()
        assert code == 0 and len(lines) == 6
        assert [json.loads(x)["id"] for x in lines] == sorted(json.loads(x)["id"] for x in lines)
        assert "6/6" in cap.err

    @pytest.mark.parametrize("backend", ["deep", "cot", "rnn"])
    def test_fault_injection(self, corpus, capsys, backend):
        code, _ = run(capsys, "verify", str(corpus), "--inject-fault", backend)
        assert code == 1

    def test_empty_corpus(self, tmp_path, capsys):
        assert run(capsys, "verify")[0] == 2
        assert run(capsys, "verify", str(tmp_path))[0] == 2

    def test_invalid_member(self, corpus, capsys):
        (corpus / "zz-bad.json").write_text("{")
        assert run(capsys, "verify", str(corpus))[0] == 2

    def test_oracle_only(self, corpus, capsys):
        assert run(capsys, "verify", str(corpus), "--backends", "oracle")[0] == 0

    def test_report_is_byte_stable(self, corpus, capsys):
        _, a = run(capsys, "verify", str(corpus))
        _, b = run(capsys, "verify", str(corpus), "--jobs", "2")
        assert a.out == b.out

    def test_timing_is_opt_in(self, corpus, capsys):
        _, cap = run(capsys, "verify", str(corpus), "--backends", "oracle", "--timing")
        assert all("wall_ms" in json.loads(x) for x in cap.out.splitlines())
        _, cap = run(capsys, "verify", str(corpus), "--backends", "oracle")
        assert not any("wall_ms" in json.loads(x) for x in cap.out.splitlines())


class TestReduce:
    def test_bfep(self, capsys):
        code, cap = run(capsys, "reduce", "bfep", "--formula", "((!0)|0)")
        tree = json.loads(cap.out)
        assert code == 0 and tree["d"] == 2

    def test_bfep_file(self, tmp_path, capsys):
        src = tmp_path / "f.txt"
        src.write_text("(0&1)\n((!1)|1)\n")
        out = tmp_path / "out"
        assert main(["reduce", "bfep", "--file", str(src), "--out", str(out)]) == 0
        assert len(list(out.glob("*.json"))) == 2

    def test_bfep_syntax_error(self, capsys):
        code, cap = run(capsys, "reduce", "bfep", "--formula", "0&1")
        assert code == 2 and "position" in cap.err

    def test_disjointness(self, capsys):
        _, cap = run(capsys, "reduce", "disjointness", "--a", "10", "--b", "10")
        body = json.loads(cap.out)
        assert body["order"]["kind"] == "adversarial-disjointness"

    def test_mr_family(self, tmp_path, capsys):
        shape = tmp_path / "shape.json"
        shape.write_text(serialize(gen_random(height=3, d=1, seed=0)))
        out = tmp_path / "mr"
        assert main(["reduce", "mr-family", str(shape), "--count", "3", "--out", str(out)]) == 0
        files = sorted(out.glob("*.json"))
        assert len(files) == 3
        assert load(files[0])[1].kind == "mr-sort"


def test_bench(capsys):
    code, cap = run(capsys, "bench", "--heights", "2..4")
    rows = list(csv.DictReader(io.StringIO(cap.out)))
    assert code == 0 and [int(r["n"]) for r in rows] == [7, 15, 31]
    for r in rows:
        assert int(r["deep_parallel"]) == int(r["L"])
        assert int(r["rnn_sequential"]) == int(r["n"]) == int(r["cot_tokens"])


class TestHarness:
    def test_corrupt_changes_answer(self):
        t = gen_random(15, d=2, seed=1, tie_free=True)
        ci = compile_deep_transformer(t)
        assert run_deep(corrupt(ci)).answer != run_deep(ci).answer

    def test_record_fields(self):
        rec = verify_instance(gen_random(15, d=2, seed=2, tie_free=True), "x")
        assert rec["ok"]
        assert set(rec["backends"]) == {"oracle", "deep", "cot", "rnn"}
        assert rec["backends"]["rnn"]["max_occupancy"] <= rec["backends"]["rnn"]["occupancy_bound"]

    def test_non_binary_goes_through_conversion(self):
        rec = verify_instance(gen_random(20, d=2, seed=2, tie_free=True, max_degree=4), "x")
        assert rec["ok"] and rec["backends"]["rnn"]["converted"]

    def test_corpus_order(self, corpus):
        ids = [r["id"] for r in verify_corpus([corpus], ("oracle",))]
        assert ids == sorted(ids)

    def test_envelope(self):
        rows = [{"d": 2, "n": 7, "p": 50}, {"d": 2, "n": 255, "p": 200}]
        k, ratios = envelope_fit(rows, "p")
        assert ratios == [50 / 25, 200 / 100]
        assert k == pytest.approx(2.0)
