import os

import pytest

from smcnets import fileio
from smcnets.bigraph import check_bigraph, make_bigraph, make_bigsignature, make_interface
from smcnets.calculi import builtin_theory, encode_lambda, parse_lambda
from smcnets.formula import ParseError, Sort, Tensor, UNIT, Atom
from smcnets.net import Net, cod_port, dom_port, cell_cod_port, cell_dom_port
from smcnets.signature import Equation, Theory, make_signature
from smcnets.smc import identity


def test_theory_roundtrip(tmp_path):
    t = Atom(Sort("t"))
    v = Atom(Sort("v"))
    sig = make_signature({"t", "v"}, {
        "m": (Tensor(t, t), t), "e": (UNIT, t),
        "c": (v, Tensor(v, v)), "w": (v, UNIT),
        "nu": (UNIT, v),
    })
    th = Theory(signature=sig,
                monoid_sorts=((t.sort, "m", "e"),),
                comonoid_sorts=((v.sort, "c", "w"),),
                nu_ops=(("nu", "w"),))
    path = str(tmp_path / "theory.sth")
    fileio.save_theory(th, path)
    back = fileio.load_theory(path)
    assert back.signature == th.signature
    assert back.monoid_sorts == th.monoid_sorts
    assert back.comonoid_sorts == th.comonoid_sorts
    assert back.nu_ops == th.nu_ops


def test_theory_with_equations_roundtrip(tmp_path):
    v = Atom(Sort("v"))
    sig = make_signature({"v"}, {"nu": (UNIT, v), "w": (v, UNIT)})
    base = Theory(signature=sig)
    lhs = Net(base, UNIT, UNIT, [("n", "nu"), ("k", "w")], [
        (cell_cod_port("n", 0), cell_dom_port("k", 0)),
        (cell_cod_port("k", 0), cod_port(0)),
        (dom_port(0), cod_port(0)),
    ])
    th = Theory(signature=sig, equations=(Equation("nuw", lhs, identity(base, UNIT)),))
    path = str(tmp_path / "theory.sth")
    fileio.save_theory(th, path)
    back = fileio.load_theory(path)
    assert len(back.equations) == 1
    assert back.equations[0].lhs == lhs
    assert back.equations[0].rhs.wires == identity(base, UNIT).wires


def test_net_roundtrip_builtin(tmp_path):
    net = encode_lambda(parse_lambda("\\x. \\y. x y"))
    path = str(tmp_path / "term.snet")
    fileio.save_net(net, path)
    back = fileio.load_net(path)
    assert back == net
    assert back.theory.signature == net.theory.signature


def test_net_file_syntax_errors(tmp_path):
    path = tmp_path / "bad.snet"
    path.write_text("theory builtin:linear_lambda\ndom t\ncod t\nfrob x\n")
    with pytest.raises(ParseError, match="unknown directive"):
        fileio.load_net(str(path))
    path.write_text("theory builtin:linear_lambda\ndom t(\ncod t\n")
    with pytest.raises(ParseError):
        fileio.load_net(str(path))


def test_bigsignature_roundtrip(tmp_path):
    sig = make_bigsignature({"s": (0, 2), "g": (1, 1), "a": (0, 1)}, atomic={"a"})
    path = str(tmp_path / "sig.sbs")
    fileio.save_bigsignature(sig, path)
    assert fileio.load_bigsignature(path) == sig


def test_bigraph_roundtrip(tmp_path):
    sig = make_bigsignature({"s": (0, 2), "g": (1, 1)})
    U = make_interface(2, {"x": 0, "b": 1, "a'": None})
    W = make_interface(1, {"a": None})
    b = make_bigraph(
        sig, U, W,
        nodes={"g": "g", "s1": "s", "s2": "s"},
        parent={("node", "g"): ("root", 0), ("node", "s2"): ("root", 0),
                ("node", "s1"): ("node", "g"), ("site", 0): ("node", "g"),
                ("site", 1): ("node", "s2")},
        edges={"xp", "bp"},
        link={("port", "g", 0): ("edge", "xp"),
              ("port", "g", 1): ("name", "a"),
              ("port", "s1", 0): ("edge", "xp"),
              ("port", "s1", 1): ("edge", "xp"),
              ("port", "s2", 0): ("name", "a"),
              ("port", "s2", 1): ("edge", "bp"),
              ("name", "x"): ("edge", "xp"),
              ("name", "b"): ("edge", "bp"),
              ("name", "a'"): ("name", "a")},
    )
    check_bigraph(b)
    path = str(tmp_path / "ex.sbg")
    fileio.save_bigraph(b, path)
    back = fileio.load_bigraph(path)
    assert back == b


def test_comments_and_blank_lines(tmp_path):
    path = tmp_path / "sig.sbs"
    path.write_text("# a comment\n\nbigsig s : bind 0 free 2\n  # indented comment\n")
    sig = fileio.load_bigsignature(str(path))
    assert sig.arity("s") == (0, 2)
