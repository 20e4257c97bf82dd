import io as stdio
import json
from fractions import Fraction

import pytest

from relbn import SchemaError, datasets
from relbn import io
from relbn.cli import ENGINE_CLIQUES, ENGINE_ORACLE, run

DATA = datasets.data_path("")


def path(name):
    return str(DATA.joinpath(name))


EX1 = ["--relation", path("table1.csv"), "--domains", path("example1.domains"), "--deps", path("example1.deps")]


def call(argv):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


# -- parsing ----------------------------------------------------------------

def test_relation_formats_agree():
    csv = io.parse_relation("A,B\n0,x\n1,y\n")
    tsv = io.parse_relation("A\tB\n0\tx\n1\ty\n")
    ws = io.parse_relation("A B\n0 x\n1 y\n")
    assert csv == tsv == ws
    assert csv.domain("A") == (0, 1)


def test_count_column_and_round_trip():
    r = io.parse_relation("A,B,__count\n0,0,3\n1,0,2\n")
    assert len(r) == 5
    assert io.parse_relation(io.relation_text(r)) == r


def test_relation_errors_name_the_line():
    with pytest.raises(SchemaError, match="line 3"):
        io.parse_relation("A,B\n0,0\n1\n")
    with pytest.raises(SchemaError, match="line 2.*count"):
        io.parse_relation("A,__count\n0,-1\n")
    with pytest.raises(SchemaError, match="line 2.*'A'"):
        io.parse_relation("A\n7\n", {"A": (0, 1)})
    with pytest.raises(SchemaError, match="empty"):
        io.parse_relation("# nothing\n")


def test_domain_file():
    assert io.parse_domains("u3: -1,0,1\nx: a, b\n") == {"u3": (-1, 0, 1), "x": ("a", "b")}
    with pytest.raises(SchemaError, match="line 1"):
        io.parse_domains("u3 -1,0,1\n")
    with pytest.raises(SchemaError, match="repeats"):
        io.parse_domains("u: 1,1\n")


def test_dependency_file():
    deps = io.parse_dependencies("A,B -> C\nA ->> D  # multivalued\nB |-> E\n")
    assert [d.kind for d in deps] == ["FD", "MD", "PD"]
    assert io.parse_dependencies(io.dependencies_text(deps)) == deps
    with pytest.raises(SchemaError, match="line 1"):
        io.parse_dependencies("A => B\n")


def test_evidence_file_keeps_order_and_blocks():
    text = "u1=1\nmarginal u3,u5 { 1,0 : 0.25 ; 1,-1 : 3/4 }\nu6=-1\n"
    ev = io.parse_evidence(text, datasets.example1_domains())
    assert [q.attrs for q in ev] == [("u1",), ("u3", "u5"), ("u6",)]
    assert ev[1].target == {(1, 0): Fraction(1, 4), (1, -1): Fraction(3, 4)}
    with pytest.raises(SchemaError, match="line 1.*u1"):
        io.parse_evidence("u1=5\n", datasets.example1_domains())
    with pytest.raises(SchemaError, match="line 2"):
        io.parse_evidence("u1=1\nu2\n")


def test_probability_formatting():
    assert io.format_probability(0) == "0"
    assert io.format_probability(1.0) == "1"
    assert io.format_probability(Fraction(1, 3)) == "0.333333333"
    text = io.dumps({"b": 0.5, "a": [1, 2], "c": {"y": None, "x": True}})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": [1, 2], "b": 0.5, "c": {"x": True, "y": None}}


# -- command line -----------------------------------------------------------

def test_decompose_4nf_command():
    code, out, _ = call(["decompose-4nf", *EX1])
    assert code == 0
    res = json.loads(out)
    assert res["schemes"]["R6"] == ["u1", "u2", "u3", "u4", "u5", "u6"]
    assert res["lossless_join"] and res["preserves_dependencies"]


def test_check_commands():
    assert call(["check", "acyclic", "--hypergraph", path("example1_cliques.hyper")])[:2] == (0, "acyclic\n")
    ex2 = ["--relation", path("table3.csv")]
    assert call(["check", "pd", *ex2, "--lhs", "B,C", "--rhs", "D"])[1] == "holds\n"
    assert call(["check", "pd", *ex2, "--lhs", "A", "--rhs", "B"])[1] == "fails\n"
    assert call(["check", "md", *ex2, "--lhs", "A", "--rhs", "B"])[1] == "holds\n"
    assert call(["check", "fd", *EX1[:4], "--lhs", "u9", "--rhs", "u11"])[1] == "fails\n"
    assert call(["check", "lossless-join", *EX1])[1] == "lossless\n"
    assert call(["check", "lossless-join", *EX1[:4], "--schemes", path("example1_cliques.hyper")])[1] == "lossy\n"
    assert call(["check", "preserves", "--deps", path("example1.deps")])[1] == "preserved\n"


def test_build_and_decompose_bn_commands():
    code, out, _ = call(["build-bn", "--deps", path("example1.deps"), "--domains", path("example1.domains")])
    assert code == 0 and json.loads(out)["parents"]["u11"] == ["u9", "u10"]
    code, out, _ = call(["decompose-bn", *EX1, "--optimizer", "anneal", "--seed", "3"])
    res = json.loads(out)
    assert code == 0 and res["total_states"] == 124 and res["fill"] == []
    assert len(res["junction_tree"]) == 5


def test_learn_command_reports_provenance_and_formula():
    code, out, _ = call(["learn", *EX1, "--method", "nnor", "--binary-slice", "--target", "u7"])
    res = json.loads(out)["tables"]["u7"]
    assert code == 0
    assert res["formula"] == "u1~u2 + u1u3 + ~u2u3" and res["complexity"] == 5
    assert res["provenance"]["u1=-1,u2=1,u3=-1"] == "nn-fill"
    code, out, _ = call(["learn", *EX1])
    assert json.loads(out)["tables"]["u7"]["rows"]["u1=-1,u2=1,u3=-1"] == "UNDEFINED"


def test_infer_and_oracle_commands():
    code, out, _ = call(["infer", *EX1, "--evidence", path("recall.evidence"), "--target", "u5"])
    res = json.loads(out)
    assert code == 0 and res["engine"] == ENGINE_CLIQUES
    assert res["cliques"]["u1,u2,u3,u7"] == {"u1=1,u2=1,u3=1,u7=1": 1}
    assert res["marginals"]["u5"] == {"u5=-1": 0.5, "u5=0": 0.5}
    code, out, _ = call(["oracle-infer", *EX1, "--evidence", path("recall.evidence"), "--target", "u5"])
    res = json.loads(out)
    assert code == 0 and res["engine"] == ENGINE_ORACLE
    assert res["marginals"]["u5"] == {"u5=0": 1}


def test_outputs_are_byte_identical(tmp_path):
    argv = ["infer", *EX1, "--evidence", path("recall.evidence"), "--method", "nnor", "--optimizer", "anneal"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run([*argv, "--out", str(a)]) == 0
    assert run([*argv, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_reproduce_writes_every_table(tmp_path):
    assert run(["reproduce", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["table2.json", "table4.json", "table5.json", "table7.json", "table8.json", "table9.json"]
    t7 = json.loads((tmp_path / "table7.json").read_text())
    assert t7["u9,u10,u11"] == {"0": 0.5, "3": 0.125, "5": 0.125, "6": 0.25}
    t9 = json.loads((tmp_path / "table9.json").read_text())
    assert {k: v["complexity"] for k, v in t9["assignments"].items()} == {"0,0": 8, "0,1": 5, "1,0": 11, "1,1": 8}


def test_exit_codes(tmp_path):
    code, _, err = call(["infer", "--relation", path("table1.csv"), "--deps", str(tmp_path / "missing")])
    assert code == 2
    assert call(["infer", *EX1, "--tolerance", "0"])[0] == 2
    assert call(["infer", *EX1, "--method", "maxent"])[0] == 2
    assert call(["frobnicate"])[0] == 2
    assert call(["check", "acyclic"])[0] == 2
    bad = tmp_path / "bad.evidence"
    bad.write_text("u1=1\nu2=-1\nu3=1\n")
    code, _, err = call(["infer", *EX1, "--evidence", str(bad)])
    assert code == 1
    assert "IncompatibleEvidenceError" in err and "u3" in err and err.count("\n") == 1
    broken = tmp_path / "broken.csv"
    broken.write_text("u1,u2\n1\n")
    code, _, err = call(["decompose-4nf", "--relation", str(broken), "--deps", path("example1.deps")])
    assert code == 1 and "line 2" in err
