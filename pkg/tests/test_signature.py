import pytest

from smcnets.calculi import BUILTIN_THEORIES, builtin_theory
from smcnets.formula import Atom, Polarity, Sort, Tensor, UNIT, leaf_count, polarity, parse_formula
from smcnets.net import Net, cod_port, dom_port, cell_dom_port, cell_cod_port
from smcnets.signature import (
    Equation,
    SignatureMorphism,
    Theory,
    TheoryError,
    apply_signature_morphism,
    check_signature_morphism,
    make_signature,
    validate_theory,
)


def test_builtin_theories_validate():
    for name in BUILTIN_THEORIES:
        validate_theory(builtin_theory(name))


def test_pi_theory_contents():
    pi = builtin_theory("pi")
    v, t = Atom(Sort("v")), Atom(Sort("t"))
    assert pi.signature.op("s") == (Tensor(v, Tensor(v, t)), t)
    assert pi.signature.op("g") == (Tensor(v, parse_formula("v -o t", pi.signature.sorts)), t)
    assert pi.monoid_sorts == ((t.sort, "par", "nil"),)
    assert pi.nu_ops == (("nu", "w"),)


def test_linear_lambda_contents():
    th = builtin_theory("linear_lambda")
    assert len(th.signature.sorts) == 1
    assert len(th.signature.operations) == 2
    assert th.equations == ()


def test_two_sorted_has_instantiation():
    th = builtin_theory("lambda_two_sorted")
    v, t = Atom(Sort("v")), Atom(Sort("t"))
    assert th.signature.op("d") == (v, t)


def test_monoid_side_condition():
    t = Atom(Sort("t"))
    sig = make_signature({"t"}, {"m": (Tensor(t, t), t), "e": (UNIT, t)})
    base = Theory(signature=sig, monoid_sorts=((t.sort, "m", "e"),))
    validate_theory(base)
    # an equation mentioning m violates the economisation side condition
    lhs = Net(base, Tensor(t, t), t, [("x", "m")], [
        (dom_port(0), cell_dom_port("x", 0)),
        (dom_port(1), cell_dom_port("x", 1)),
        (cell_cod_port("x", 0), cod_port(0)),
    ])
    rhs = Net(base, Tensor(t, t), t, [("x", "m")], [
        (dom_port(1), cell_dom_port("x", 0)),
        (dom_port(0), cell_dom_port("x", 1)),
        (cell_cod_port("x", 0), cod_port(0)),
    ])
    bad = Theory(signature=sig, monoid_sorts=((t.sort, "m", "e"),),
                 equations=(Equation("comm", lhs, rhs),))
    with pytest.raises(TheoryError):
        validate_theory(bad)


def test_bad_monoid_shape():
    t = Atom(Sort("t"))
    sig = make_signature({"t"}, {"m": (Tensor(t, t), t), "e": (t, t)})
    with pytest.raises(TheoryError):
        validate_theory(Theory(signature=sig, monoid_sorts=((t.sort, "m", "e"),)))


def test_equation_boundaries_must_match():
    th = builtin_theory("linear_lambda")
    t = Atom(Sort("t"))
    a = Net(th, t, t, (), [(dom_port(0), cod_port(0))])
    b = Net(th, Tensor(t, t), t, (), [])
    with pytest.raises(TheoryError):
        validate_theory(Theory(signature=th.signature, equations=(Equation("bad", a, b),)))


def test_signature_morphism():
    a, b = Sort("a"), Sort("b")
    m = SignatureMorphism(sort_map=((a, b), (b, b)), op_map=())
    f = parse_formula("(a -o I) * a", frozenset({a}))
    image = apply_signature_morphism(m, f)
    assert image == parse_formula("(b -o I) * b", frozenset({b}))
    # identity morphism
    ident = SignatureMorphism(sort_map=((a, a),), op_map=())
    assert apply_signature_morphism(ident, parse_formula("a * (a -o I)", frozenset({a}))) == \
        parse_formula("a * (a -o I)", frozenset({a}))


def test_morphism_preserves_polarities_and_leaves():
    a, b = Sort("a"), Sort("b")
    m = SignatureMorphism(sort_map=((a, b),), op_map=())
    f = parse_formula("((a -o I) -o I) * a", frozenset({a}))
    g = apply_signature_morphism(m, f)
    assert leaf_count(f) == leaf_count(g)
    for i in range(leaf_count(f)):
        assert polarity(f, i) == polarity(g, i)


def test_morphism_op_compatibility():
    a, b = Sort("a"), Sort("b")
    src = make_signature({"a"}, {"f": (Atom(a), Atom(a))})
    dst = make_signature({"b"}, {"h": (Atom(b), Atom(b)), "k": (Atom(b), UNIT)})
    ok = SignatureMorphism(sort_map=((a, b),), op_map=(("f", "h"),))
    check_signature_morphism(ok, src, dst)
    bad = SignatureMorphism(sort_map=((a, b),), op_map=(("f", "k"),))
    with pytest.raises(TheoryError):
        check_signature_morphism(bad, src, dst)
