"""End-to-end CLI behavior: JSON I/O, subcommands, exit codes."""

import json

import pytest

from krobust.cli import main, parse_instance, serialize_instance
from krobust.fixtures import gen_random
from krobust.model import PROBLEM_KINDS

SC_HAND = {
    "problem": "setcover",
    "schedule": {"T": 1, "k": [2, 1], "lambda": ["1", "2"]},
    "uncertainty": {"kind": "cardinality"},
    "sets": [{"members": [1], "cost": "1"},
             {"members": [2], "cost": "2"},
             {"members": [1, 2], "cost": "5/2"}],
}


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def gen_file(tmp_path, capsys, *argv, name="inst.json"):
    rc, out, _ = run(capsys, "generate", *argv)
    assert rc == 0
    path = tmp_path / name
    path.write_text(out)
    return str(path)


def write_doc(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture()
def allstages(tmp_path, capsys):
    return gen_file(tmp_path, capsys, "--family", "lowerbound-allstages",
                    "--horizon", "2", "--eps", "2/5")


def test_round_trip_identity():
    for kind in PROBLEM_KINDS:
        inst = gen_random(kind, 5, 7, 2, 3)
        doc = serialize_instance(inst)
        doc2 = json.loads(json.dumps(doc))
        again = parse_instance(doc2)
        assert again == inst
        assert serialize_instance(again) == doc


def test_round_trip_subset(tmp_path, capsys):
    path = gen_file(tmp_path, capsys, "--family", "subset-krobust-bad",
                    "--horizon", "2", "--lam", "3")
    doc = json.loads(open(path).read())
    assert doc["uncertainty"]["kind"] == "subset"
    inst = parse_instance(doc)
    assert serialize_instance(inst) == doc


def test_generate_is_deterministic(capsys):
    rc1, out1, _ = run(capsys, "generate", "--kind", "mincut", "--seed", "7")
    rc2, out2, _ = run(capsys, "generate", "--kind", "mincut", "--seed", "7")
    assert rc1 == rc2 == 0 and out1 == out2
    _, out3, _ = run(capsys, "generate", "--kind", "mincut", "--seed", "8")
    assert out3 != out1


def test_generate_needs_kind_or_family(capsys):
    rc, _, err = run(capsys, "generate")
    assert rc == 2 and "--kind or --family" in err


def test_solve_report(allstages, capsys):
    rc, out, _ = run(capsys, "solve", allstages)
    assert rc == 0
    assert json.loads(out) == {
        "robcov": "343/125", "day0_cost": "0", "jstar": 2,
        "tau": "1559583/43750", "guess": "7/5", "net": [],
        "day0_purchase": [], "conservative": False, "witness": [1]}


def test_solve_flags(allstages, capsys):
    rc, out, _ = run(capsys, "solve", allstages, "--guess", "12/5")
    assert rc == 0 and json.loads(out)["guess"] == "12/5"
    rc, out, _ = run(capsys, "solve", allstages, "--beta-override", "1")
    doc = json.loads(out)
    assert doc["robcov"] == "12/5"
    assert doc["day0_purchase"] == [0, 2]
    assert doc["witness"] == []


def test_solve_rejects_preprocess_for_sets(allstages, capsys):
    rc, _, err = run(capsys, "solve", allstages, "--preprocess", "cost-scaling")
    assert rc == 2 and "graph problems only" in err


def test_solve_preprocess_graph(tmp_path, capsys):
    path = gen_file(tmp_path, capsys, "--kind", "mincut", "--seed", "5")
    rc, out, _ = run(capsys, "solve", path, "--preprocess", "cost-scaling",
                     "--merge-r", "3")
    assert rc == 0
    doc = json.loads(out)
    assert isinstance(doc["preprocess_f"], int)
    rc2, plain, _ = run(capsys, "solve", path)
    assert "preprocess_f" not in json.loads(plain)


def test_solve_trivial_exit(tmp_path, capsys):
    doc = dict(SC_HAND, schedule={"T": 1, "k": [2, 0], "lambda": ["1", "2"]})
    rc, out, err = run(capsys, "solve", write_doc(tmp_path, doc))
    assert rc == 3
    assert json.loads(out) == {"robcov": "0"}
    assert "trivial" in err


def test_solve_rejects_subset_uncertainty(tmp_path, capsys):
    path = gen_file(tmp_path, capsys, "--family", "subset-krobust-bad",
                    "--horizon", "1", "--lam", "2")
    rc, _, err = run(capsys, "solve", path)
    assert rc == 2 and "oracle subcommand" in err


def test_evaluate_reports_exhaustive(allstages, capsys):
    rc, out, _ = run(capsys, "evaluate", allstages)
    assert rc == 0
    doc = json.loads(out)
    assert doc["exhaustive"] == "343/125"
    assert doc["robcov"] == "343/125"
    rc, out, _ = run(capsys, "evaluate", allstages, "--limits", "1,1,1")
    assert rc == 0 and "exhaustive" not in json.loads(out)


def test_oracle_report(allstages, tmp_path, capsys):
    rc, out, _ = run(capsys, "oracle", allstages)
    assert rc == 0
    assert json.loads(out) == {"opt": "49/25", "days_with_purchase": [1, 2]}
    hand = write_doc(tmp_path, SC_HAND)
    rc, out, _ = run(capsys, "oracle", hand, "--full-adversary")
    assert json.loads(out)["opt"] == "5/2"
    rc, out, _ = run(capsys, "oracle", hand, "--inactive-days", "0")
    assert json.loads(out)["opt"] == "4"


def test_oracle_partitioned_fallback(tmp_path, capsys):
    # too many units for the game search, but the partitioned evaluator
    # handles it exactly; the closed form yields no purchase trace
    path = gen_file(tmp_path, capsys, "--family", "subset-krobust-bad",
                    "--horizon", "2", "--lam", "3")
    rc, out, _ = run(capsys, "oracle", path)
    assert rc == 0
    assert json.loads(out) == {"opt": "2"}
    rc, out, _ = run(capsys, "oracle", path, "--inactive-days", "1")
    assert rc == 0
    assert json.loads(out) == {"opt": "4"}


def test_oracle_too_large(allstages, tmp_path, capsys):
    # full-adversary mode never takes the partitioned shortcut
    path = gen_file(tmp_path, capsys, "--family", "subset-krobust-bad",
                    "--horizon", "2", "--lam", "3", name="sk.json")
    rc, _, err = run(capsys, "oracle", path, "--full-adversary")
    assert rc == 4 and "exceed" in err
    # cardinality instances have no shortcut at all
    rc, _, err = run(capsys, "oracle", allstages, "--limits", "1,1,1")
    assert rc == 4 and "exceed" in err
    # a lowered horizon cap suppresses the shortcut too
    rc, _, err = run(capsys, "oracle", path, "--limits", "8,12,1")
    assert rc == 4 and "exceed" in err
    # ineligible structure (k_1 = 2): still too large
    doc = json.loads(open(path).read())
    doc["schedule"]["k"][1] = 2
    bumped = write_doc(tmp_path, doc)
    rc, _, err = run(capsys, "oracle", bumped)
    assert rc == 4 and "single-survivor" in err


def test_compare_single(allstages, capsys):
    rc, out, _ = run(capsys, "compare", allstages)
    assert rc == 0
    assert json.loads(out) == {
        "opt": "49/25", "algo": "343/125", "ratio": "7/5",
        "exhaustive_algo": "343/125",
        "bounds": {"lb": "7/5", "ub": "12/5"}}


def test_compare_batch_matches_documented_seeds(tmp_path, capsys):
    rc, out, _ = run(capsys, "compare", "--batch", "3", "--kind", "setcover",
                     "--n", "4", "--actions", "5", "--horizon", "2",
                     "--seed", "1")
    assert rc == 0
    lines = out.strip().split("\n")
    assert len(lines) == 3
    # line i comes from seed*1000003 + i
    single = gen_file(tmp_path, capsys, "--kind", "setcover", "--n", "4",
                      "--actions", "5", "--horizon", "2",
                      "--seed", str(1_000_003))
    rc, one, _ = run(capsys, "compare", single)
    assert rc == 0 and json.loads(one) == json.loads(lines[0])


def test_compare_batch_argument_errors(allstages, capsys):
    rc, _, err = run(capsys, "compare", "--batch", "2")
    assert rc == 2 and "--kind" in err
    rc, _, err = run(capsys, "compare", allstages, "--batch", "2")
    assert rc == 2 and "replaces" in err
    rc, _, err = run(capsys, "compare")
    assert rc == 2 and "instance file or --batch" in err


def test_rejects_float_literals(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps(SC_HAND).replace('"5/2"', "2.5"))
    rc, _, err = run(capsys, "solve", str(path))
    assert rc == 2 and "floating-point" in err


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.update(problem="matching"), "problem"),
    (lambda d: d["schedule"].update(k=[2]), "schedule.k"),
    (lambda d: d["schedule"].update(T="1"), "schedule.T"),
    (lambda d: d["sets"][0].update(cost=None), "sets[0].cost"),
    (lambda d: d["sets"][1]["members"].append("x"), "sets[1].members[1]"),
    (lambda d: d["schedule"].update({"lambda": ["1", "3/0"]}),
     "schedule.lambda[1]"),
])
def test_field_errors_name_the_path(tmp_path, capsys, mutate, field):
    doc = json.loads(json.dumps(SC_HAND))
    mutate(doc)
    rc, _, err = run(capsys, "solve", write_doc(tmp_path, doc))
    assert rc == 2 and field in err


def test_graph_field_rules(tmp_path, capsys):
    tree = {"problem": "steinertree",
            "schedule": {"T": 1, "k": [3, 2], "lambda": ["1", "2"]},
            "graph": {"n": 3, "edges": [[0, 1, "1"], [1, 2, "1"]]}}
    assert run(capsys, "solve", write_doc(tmp_path, tree))[0] == 0
    rooted = json.loads(json.dumps(tree))
    rooted["graph"]["root"] = 0
    rc, _, err = run(capsys, "solve", write_doc(tmp_path, rooted))
    assert rc == 2 and "takes no root" in err
    unrooted = {"problem": "mincut",
                "schedule": {"T": 1, "k": [2, 1], "lambda": ["1", "2"]},
                "graph": {"n": 3, "edges": [[0, 1, "1"], [1, 2, "1"]]}}
    rc, _, err = run(capsys, "solve", write_doc(tmp_path, unrooted))
    assert rc == 2 and "graph.root" in err
    pairless = {"problem": "steinerforest",
                "schedule": {"T": 1, "k": [1, 1], "lambda": ["1", "2"]},
                "graph": {"n": 3, "edges": [[0, 1, "1"], [1, 2, "1"]]}}
    rc, _, err = run(capsys, "solve", write_doc(tmp_path, pairless))
    assert rc == 2 and "at least one pair" in err


def test_missing_file(capsys):
    rc, _, err = run(capsys, "solve", "/nonexistent/path.json")
    assert rc == 2 and "cannot read input" in err
