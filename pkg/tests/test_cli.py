import os

import pytest

from smcnets import fileio
from smcnets.bigraph import make_bigraph, make_bigsignature, make_interface
from smcnets.calculi import encode_lambda, parse_lambda
from smcnets.cli import main
from smcnets.equivalence import collapsed_equal
from smcnets.formula import Atom, Sort, Tensor, UNIT
from smcnets.net import Net, cod_port, dom_port
from smcnets.signature import Theory, make_signature
from smcnets.smc import compose, identity, runit, runit_inv


@pytest.fixture
def eq1_files(tmp_path):
    th = Theory(signature=make_signature({"a"}, {}), name="sorts_a")
    a = Atom(Sort("a"))
    tpath = str(tmp_path / "a.sth")
    fileio.save_theory(th, tpath)
    eq1 = compose(runit_inv(th, a), runit(th, a))
    ident = identity(th, Tensor(a, UNIT))
    p1 = str(tmp_path / "eq1.snet")
    p2 = str(tmp_path / "id_aI.snet")
    fileio.save_net(eq1, p1, theory_ref="a.sth")
    fileio.save_net(ident, p2, theory_ref="a.sth")
    return p1, p2


def test_check_net(tmp_path, capsys):
    net = encode_lambda(parse_lambda("\\x. x"))
    p = str(tmp_path / "id.snet")
    fileio.save_net(net, p)
    assert main(["check", p]) == 0
    broken = Net(net.theory, net.dom, net.cod, net.cells, [])
    pb = str(tmp_path / "broken.snet")
    fileio.save_net(broken, pb)
    assert main(["check", pb]) == 1


def test_eq_rewiring_exit_codes(eq1_files):
    p1, p2 = eq1_files
    assert main(["eq", p1, p2, "--mode", "rewiring"]) == 0


def test_eq_distinct(tmp_path):
    n1 = encode_lambda(parse_lambda("\\x. \\y. x y"))
    n2 = encode_lambda(parse_lambda("\\x. \\y. y x"))
    p1, p2 = str(tmp_path / "a.snet"), str(tmp_path / "b.snet")
    fileio.save_net(n1, p1)
    fileio.save_net(n2, p2)
    assert main(["eq", p1, p2, "--mode", "rewiring"]) == 1


def test_compose_roundtrip(tmp_path, eq1_files):
    p1, p2 = eq1_files
    out = str(tmp_path / "out.snet")
    assert main(["compose", p2, p1, "-o", out]) == 0
    assert os.path.exists(out)
    assert main(["check", out]) == 0


def test_translate_and_eq_collapsed(tmp_path):
    sig = make_bigsignature({"s": (0, 2), "g": (1, 1)})
    b = make_bigraph(
        sig, make_interface(0), make_interface(1),
        nodes={"m": "s"},
        parent={("node", "m"): ("root", 0)},
        edges={"e"},
        link={("port", "m", 0): ("edge", "e"), ("port", "m", 1): ("edge", "e")},
    )
    bp = str(tmp_path / "one.sbg")
    fileio.save_bigraph(b, bp)
    assert main(["check", bp]) == 0
    out = str(tmp_path / "one.snet")
    assert main(["translate", bp, "-o", out]) == 0
    assert main(["check", out]) == 0
    assert main(["translate", bp, "--interface"]) == 0
    # the written net re-parses and is collapsed_equal to itself
    net = fileio.load_net(out)
    assert collapsed_equal(net, net)


def test_enum_and_oracle(tmp_path, capsys):
    sp = str(tmp_path / "pi.sbs")
    fileio.save_bigsignature(sig_sg(), sp)
    assert main(["enum", "--bigsig", sp, "--nodes", "1", "--ground"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == "4"
    assert main(["oracle", "closed-term-iso", "--bigsig", sp, "--nodes", "0"]) == 0
    out = capsys.readouterr().out
    assert "bijection verified" in out and "bigraphs 1, nets 1" in out


def sig_sg():
    return make_bigsignature({"s": (0, 2), "g": (1, 1)})


def test_enum_nets(tmp_path, capsys):
    assert main(["enum", "--theory", "builtin:linear_lambda", "--dom", "I",
                 "--cod", "t", "--cells", "3"]) == 0
    assert capsys.readouterr().out.strip() == "6"


def test_render(tmp_path):
    net = encode_lambda(parse_lambda("\\x. x"))
    p = str(tmp_path / "id.snet")
    fileio.save_net(net, p)
    out = str(tmp_path / "id.dot")
    assert main(["render", p, "-o", out]) == 0
    assert "digraph" in open(out).read()


def test_curry_cli(tmp_path):
    th = Theory(signature=make_signature({"a"}, {}), name="sorts_a")
    tpath = str(tmp_path / "a.sth")
    fileio.save_theory(th, tpath)
    a = Atom(Sort("a"))
    net = identity(th, Tensor(a, a))
    p = str(tmp_path / "id.snet")
    fileio.save_net(net, p, theory_ref="a.sth")
    out = str(tmp_path / "cur.snet")
    assert main(["curry", p, "-o", out]) == 0
    cur = fileio.load_net(out)
    assert str(cur.cod).startswith("Lollipop") or cur.cod is not None
    back = str(tmp_path / "back.snet")
    assert main(["curry", out, "--inverse", "-o", back]) == 0
    assert fileio.load_net(back) == net


def test_decompose_cli(tmp_path):
    net = encode_lambda(parse_lambda("\\x. \\y. x y"))
    p = str(tmp_path / "term.snet")
    fileio.save_net(net, p)
    cid = net.cells[0][0]
    assert main(["decompose", p, "--cells", cid, "-o", str(tmp_path / "out")]) == 0
    f1 = fileio.load_net(str(tmp_path / "out.f1.snet"))
    f2 = fileio.load_net(str(tmp_path / "out.f2.snet"))
    assert dict(f1.cells) and f1.cod == f2.dom


def test_usage_errors(tmp_path, capsys):
    assert main(["check", str(tmp_path / "missing.snet")]) == 2
    assert main(["nonsense"]) == 2
