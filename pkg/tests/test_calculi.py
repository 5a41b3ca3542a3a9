import pytest

from smcnets.calculi import (
    App,
    Get,
    Hole,
    Lam,
    Nu,
    Par,
    PiHole,
    Send,
    Var,
    Zero,
    builtin_theory,
    count_closed_linear_terms,
    decode_net,
    encode_lambda,
    encode_pi,
    enumerate_closed_linear_terms,
    enumerate_closed_terms_by_weight,
    enumerate_nets,
    format_lambda,
    format_pi,
    lam_is_linear,
    lam_weight,
    parse_lambda,
    parse_pi,
    pi_free_names,
)
from smcnets.equivalence import collapsed_equal, rewiring_equivalent, rewiring_moves
from smcnets.formula import Atom, Sort, UNIT, format_formula, parse_formula
from smcnets.net import NetError, cod_port, dom_port, is_correct

T = Atom(Sort("t"))


def test_lambda_parse_print_roundtrip():
    for text in ["\\x. x", "\\x. \\y. x y", "(\\x. x) \\y. y",
                 "\\x. x \\y. y", "\\x. [0](x) [1]"]:
        t = parse_lambda(text)
        assert parse_lambda(format_lambda(t)) == t


def test_pi_parse_print_roundtrip():
    for text in ["0", "send a b. 0", "get a(x). (send x x. 0 | [0])",
                 "nu b. send a b. [1]", "0 | 0 | 0"]:
        t = parse_pi(text.replace("a", "a").replace("b", "b"))
        # free names must be closed over for a round-trip through terms only
        assert parse_pi(format_pi(t)) == t


def test_pi_prefix_scope():
    # a prefix continues to the next bar only
    t = parse_pi("send a b. 0 | 0")
    assert isinstance(t, Par) and isinstance(t.left, Send)


def test_free_names():
    t = parse_pi("get a(x). (send x x. 0 | nu b. send a b. 0)")
    assert pi_free_names(t) == {"a"}


def test_encode_decode_linear_identity():
    net = encode_lambda(parse_lambda("\\x. x"))
    assert len(net.cells) == 1
    assert is_correct(net)
    assert decode_net(net) == parse_lambda("\\x. x")


def test_encode_decode_roundtrips():
    for k in range(3):
        for term in enumerate_closed_linear_terms(k):
            net = encode_lambda(term)
            assert is_correct(net)
            assert decode_net(net) == term


def test_decode_rewired_variant_same_term():
    term = parse_lambda("\\x. \\y. x y")
    net = encode_lambda(term)
    for variant in rewiring_moves(net):
        assert decode_net(variant) == term


def test_two_sorted_encoding_shares_variables():
    net = encode_lambda(parse_lambda("\\x. x x"), "lambda_two_sorted")
    assert is_correct(net)
    ops = sorted(op for _, op in net.cells)
    assert ops == ["app", "d", "d", "lam"]
    # the binder fans out with width 2
    binder_wires = [w for w in net.wires
                    if w[0].loc == "cdom" and net.cell_op(w[0].cell) == "lam" and w[0].index == 0]
    assert len(binder_wires) == 2
    assert decode_net(net, "lambda_two_sorted") == parse_lambda("\\x. x x")


def test_two_sorted_unused_binder_gets_counit():
    net = encode_lambda(parse_lambda("\\x. \\y. x"), "lambda_two_sorted")
    assert is_correct(net)
    assert "w" in {op for _, op in net.cells}
    assert decode_net(net, "lambda_two_sorted") == parse_lambda("\\x. \\y. x")


def test_encode_rejects_nonlinear_in_linear_theory():
    with pytest.raises(NetError):
        encode_lambda(parse_lambda("\\x. x x"), "linear_lambda")
    with pytest.raises(NetError):
        encode_lambda(parse_lambda("\\x. \\y. x"), "linear_lambda")
    with pytest.raises(NetError):
        encode_lambda(Var(0), "linear_lambda")  # not closed


def test_capture_choice_contexts_decode_distinct():
    # \x. ([0] . [1]) with the bound variable captured by one hole or the other
    left = parse_lambda("\\x. [0](x) [1]")
    right = parse_lambda("\\x. [0] [1](x)")
    nl = encode_lambda(left, hole_captures=(1, 0))
    nr = encode_lambda(right, hole_captures=(0, 1))
    assert is_correct(nl) and is_correct(nr)
    assert format_formula(nl.dom) == "(t -o t) * t"
    assert format_formula(nr.dom) == "t * (t -o t)"
    assert decode_net(nl) == left
    assert decode_net(nr) == right
    assert decode_net(nl) != decode_net(nr)


def test_term_count_oracles_agree():
    for k in range(5):
        assert len(enumerate_closed_linear_terms(k)) == count_closed_linear_terms(k)


def test_term_counts_regression():
    # locked values from the two independent oracles
    assert [count_closed_linear_terms(k) for k in range(5)] == [1, 5, 60, 1105, 27120]


def test_lam_weight():
    assert lam_weight(parse_lambda("\\x. x")) == 2
    assert lam_weight(parse_lambda("\\x. x x")) == 4
    assert lam_weight(parse_lambda("\\x. \\y. x")) == 4  # unused binder costs one


def test_enumerate_nets_small_linear():
    th = builtin_theory("linear_lambda")
    nets = enumerate_nets(th, UNIT, T, 1)
    assert len(nets) == 1  # the identity term
    assert decode_net(nets[0]) == parse_lambda("\\x. x")
    assert len(enumerate_nets(th, UNIT, T, 2)) == 1  # no two-cell closed nets
    by3 = enumerate_nets(th, UNIT, T, 3)
    assert len(by3) == 1 + 5


def test_enumerate_nets_pi_zero_budget():
    pi = builtin_theory("pi")
    nets = enumerate_nets(pi, UNIT, T, 0)
    assert len(nets) == 1
    assert not nets[0].cells


def test_enumerate_nets_budget_guard():
    with pytest.raises(NetError):
        enumerate_nets(builtin_theory("pi"), UNIT, T, 13)


def test_encode_pi_smallest():
    net = encode_pi(Zero())
    assert net.dom == UNIT and net.cod == T and not net.cells
    assert is_correct(net)


def test_encode_pi_fig_term():
    term = parse_pi("get a(x). ([0] | send x x. 0) | nu b. send a b. [1]")
    net = encode_pi(term, hole_names=(("x",), ("b",)), global_names=("a",))
    assert format_formula(net.dom) == "v -o (v -o t) * (v -o t)"
    assert format_formula(net.cod) == "v -o t"
    assert sorted(op for _, op in net.cells) == ["g", "nu", "s", "s"]
    assert is_correct(net)


def test_encode_pi_scope_errors():
    term = parse_pi("get a(x). [0] | [1]")
    with pytest.raises(NetError):  # x is not in scope at hole 1
        encode_pi(term, hole_names=((), ("x",)), global_names=("a",))
    with pytest.raises(NetError):  # hole 1 never occurs
        encode_pi(Par(PiHole(0), Zero()), hole_names=((), ()))


def test_enumerate_closed_terms_by_weight():
    terms = enumerate_closed_terms_by_weight(4)
    assert parse_lambda("\\x. x") in terms
    assert parse_lambda("\\x. x x") in terms
    assert parse_lambda("\\x. \\y. x") in terms
    assert all(lam_weight(t) <= 4 for t in terms)
    linear = [t for t in terms if lam_is_linear(t)]
    assert linear == [parse_lambda("\\x. x")]
