import random

import pytest

from gen import random_pi_term
from smcnets.bigraph import (
    check_bigraph,
    compose_bigraphs,
    make_bigraph,
    make_bigsignature,
    make_interface,
    random_bigraph,
    support_iso,
)
from smcnets.calculi import builtin_theory, encode_pi, parse_pi
from smcnets.equivalence import collapse, collapsed_equal
from smcnets.formula import format_formula, UNIT
from smcnets.net import is_correct
from smcnets.signature import validate_theory
from smcnets.translate import (
    TranslationContext,
    check_closed_term_iso,
    check_faithfulness,
    non_fullness_witness,
    translate_bigraph,
    translate_object,
    translate_signature,
)

SIG = make_bigsignature({"s": (0, 2), "g": (1, 1)})


def example_bigraph():
    U = make_interface(2, {"x": 0, "b": 1, "a'": None})
    W = make_interface(1, {"a": None})
    return make_bigraph(
        SIG, U, W,
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


def test_translate_signature_matches_examples():
    th = translate_signature(SIG)
    validate_theory(th)
    assert format_formula(th.signature.op("s")[0]) == "v * (v * t)"
    assert format_formula(th.signature.op("g")[0]) == "v * (v -o t)"
    # the structural part is the pi structure
    pi = builtin_theory("pi")
    assert th.monoid_sorts == pi.monoid_sorts
    assert th.comonoid_sorts == pi.comonoid_sorts
    assert th.nu_ops == pi.nu_ops


def test_translate_atomic_control():
    sig = make_bigsignature({"g'": (0, 2)}, atomic={"g'"})
    th = translate_signature(sig)
    assert format_formula(th.signature.op("g'")[0]) == "v * v"


def test_translate_interface_examples():
    assert format_formula(translate_object(make_interface(
        2, {"x": 0, "b": 1, "a'": None}))) == "v -o (v -o t) * (v -o t)"
    assert format_formula(translate_object(make_interface(1, {"a": None}))) == "v -o t"
    assert format_formula(translate_object(make_interface(0))) == "I"
    assert format_formula(translate_object(make_interface(1))) == "t"


def test_translate_interface_name_invariance():
    # order-preserving renamings give the same formula
    a = make_interface(2, {"a": 0, "b": None, "c": 1})
    b = make_interface(2, {"p": 0, "q": None, "r": 1})
    assert translate_object(a) == translate_object(b)


def test_example_translates_to_figure_net():
    ctx = TranslationContext.of(SIG)
    net = translate_bigraph(example_bigraph(), ctx)
    assert is_correct(net)
    assert format_formula(net.dom) == "v -o (v -o t) * (v -o t)"
    assert format_formula(net.cod) == "v -o t"
    term = parse_pi("get a(x). ([0] | send x x. 0) | nu b. send a b. [1]")
    fig = encode_pi(term, hole_names=(("x",), ("b",)), global_names=("a",))
    assert collapsed_equal(net, fig)


def test_empty_ground_bigraph():
    ctx = TranslationContext.of(SIG)
    empty = make_bigraph(SIG, make_interface(0), make_interface(1), {}, {}, set(), {})
    net = translate_bigraph(empty, ctx)
    assert net.dom == UNIT and not net.cells
    assert is_correct(net)


def test_free_edge_becomes_restriction_cell():
    ctx = TranslationContext.of(SIG)
    b = make_bigraph(
        SIG, make_interface(0), make_interface(1),
        nodes={"m": "s"},
        parent={("node", "m"): ("root", 0)},
        edges={"e"},
        link={("port", "m", 0): ("edge", "e"), ("port", "m", 1): ("edge", "e")},
    )
    net = translate_bigraph(b, ctx)
    assert sorted(op for _, op in net.cells) == ["nu", "s"]
    hand = encode_pi(parse_pi("nu a. send a a. 0"))
    assert collapsed_equal(net, hand)


def test_translations_already_collapsed():
    ctx = TranslationContext.of(SIG)
    rng = random.Random(1)
    for _ in range(20):
        b = random_bigraph(SIG, make_interface(0), make_interface(1), rng, 2)
        net = translate_bigraph(b, ctx)
        assert is_correct(net)
        assert collapse(net) == net


def test_witness_correct_and_unmatched():
    ctx = TranslationContext.of(SIG)
    dom_i, cod_i, witness = non_fullness_witness(ctx)
    assert is_correct(witness)
    report = check_faithfulness(SIG, max_nodes=1)
    assert report.witness_correct and not report.witness_matched


def test_faithfulness_small():
    report = check_faithfulness(SIG, max_nodes=1)
    assert report.ok, report.collisions[:1]


def test_closed_term_iso_counts():
    rep = check_closed_term_iso(SIG, 1)
    assert rep.ok
    assert rep.counts == [(0, 1, 1), (1, 4, 4)]
    siga = make_bigsignature({"a": (0, 1)}, atomic={"a"})
    repa = check_closed_term_iso(siga, 2)
    assert repa.ok
    assert repa.counts == [(0, 1, 1), (1, 2, 2), (2, 4, 4)]


def test_functoriality_samples():
    ctx = TranslationContext.of(SIG)
    rng = random.Random(99)
    mids = [make_interface(1), make_interface(1, {"m": None}), make_interface(1, {"m": 0})]
    for i in range(20):
        mid = rng.choice(mids)
        f = random_bigraph(SIG, make_interface(0), mid, rng, 2)
        g = random_bigraph(SIG, mid, make_interface(1, {"a": None}), rng, 2)
        lhs = translate_bigraph(compose_bigraphs(g, f), ctx)
        from smcnets.smc import compose
        rhs = compose(translate_bigraph(g, ctx), translate_bigraph(f, ctx))
        assert is_correct(rhs)
        assert collapsed_equal(lhs, rhs), i
