import itertools
import random

import pytest

from gen import random_composable_pair, random_correct_net
from smcnets.calculi import builtin_theory
from smcnets.formula import Atom, Lollipop, Sort, Tensor, UNIT, parse_formula, format_formula
from smcnets.iso import canonical_key, nets_isomorphic
from smcnets.net import (
    Net,
    NetError,
    cod_port,
    correctness_report,
    cell_cod_port,
    cell_dom_port,
    dom_port,
    is_correct,
)
from smcnets.signature import Theory, make_signature
from smcnets.smc import (
    assoc,
    compose,
    curry,
    decompose,
    embed_operation,
    identity,
    lunit,
    operation_name,
    runit,
    runit_inv,
    structural,
    sym,
    tensor,
    uncurry,
)

TH = Theory(signature=make_signature({"a", "b"}, {}))
A = Atom(Sort("a"))
B = Atom(Sort("b"))


def test_identity_shapes():
    one = identity(TH, A)
    assert one.wires == frozenset({(dom_port(0), cod_port(0))})
    unit = identity(TH, UNIT)
    assert unit.wires == frozenset({(dom_port(0), cod_port(0))})
    assert is_correct(identity(TH, parse_formula("((a -o I) -o I) -o I", TH.signature.sorts)))


def test_eq1_reproduction():
    rho = runit(TH, A)
    assert rho.wires == frozenset({(dom_port(0), cod_port(0)), (dom_port(1), cod_port(0))})
    eq1 = compose(runit_inv(TH, A), rho)
    assert eq1.wires == frozenset({(dom_port(0), cod_port(0)), (dom_port(1), cod_port(0))})
    assert eq1.dom == eq1.cod == Tensor(A, UNIT)
    assert is_correct(eq1)
    assert eq1 != identity(TH, Tensor(A, UNIT))
    assert not nets_isomorphic(eq1, identity(TH, Tensor(A, UNIT)))


def test_identity_laws_up_to_iso():
    rng = random.Random(11)
    for theory_name in ("linear_lambda", "pi"):
        for _ in range(5):
            f = random_correct_net(theory_name, rng)
            th = builtin_theory(theory_name)
            assert nets_isomorphic(compose(f, identity(th, f.dom)), f)
            assert nets_isomorphic(compose(identity(th, f.cod), f), f)


def test_dead_end_unit_path_dropped():
    f = Net(TH, A, Tensor(A, UNIT), (), [(dom_port(0), cod_port(0))])
    assert is_correct(f)
    out = compose(runit(TH, A), f)
    assert nets_isomorphic(out, identity(TH, A))


def test_compose_boundary_mismatch():
    with pytest.raises(NetError):
        compose(identity(TH, A), identity(TH, B))


def test_tensor_of_identities():
    assert nets_isomorphic(tensor(identity(TH, A), identity(TH, B)),
                           identity(TH, Tensor(A, B)))
    f = identity(TH, A)
    t = tensor(f, identity(TH, UNIT))
    assert t.dom == Tensor(A, UNIT) and len(t.wires) == 2 and is_correct(t)


def test_tensor_of_send_get():
    pi = builtin_theory("pi")
    both = tensor(embed_operation(pi, "s"), embed_operation(pi, "g"))
    assert len(both.cells) == 2
    assert format_formula(both.cod) == "t * t"
    assert is_correct(both)


def test_structural_all_correct():
    cases = [
        structural(TH, "sym", A, B),
        structural(TH, "assoc", A, B, A),
        structural(TH, "assoc_inv", A, B, A),
        structural(TH, "lunit", A),
        structural(TH, "lunit_inv", A),
        structural(TH, "runit", A),
        structural(TH, "runit_inv", A),
        structural(TH, "runit", parse_formula("(a -o I) * b", TH.signature.sorts)),
        structural(TH, "lunit", parse_formula("a -o b", TH.signature.sorts)),
    ]
    for net in cases:
        ok, why = correctness_report(net)
        assert ok, why


def test_sym_crosses():
    s = sym(TH, A, B)
    assert s.wires == frozenset({(dom_port(0), cod_port(1)), (dom_port(1), cod_port(0))})


def test_uncurry_identity_is_evaluation():
    ev = uncurry(identity(TH, Lollipop(A, B)))
    assert ev.dom == Tensor(Lollipop(A, B), A) and ev.cod == B
    assert ev.wires == frozenset({(dom_port(2), dom_port(0)), (dom_port(1), cod_port(0))})
    assert is_correct(ev)


def test_curry_uncurry_inverse_on_random_nets():
    rng = random.Random(5)
    done = 0
    for _ in range(200):
        f = random_correct_net(rng.choice(["linear_lambda", "pi", "lambda_two_sorted"]), rng)
        if isinstance(f.dom, Tensor):
            assert uncurry(curry(f)) == f
            done += 1
        if isinstance(f.cod, Lollipop):
            assert curry(uncurry(f)) == f
            done += 1
        if done >= 20:
            break
    assert done >= 20


def test_curry_preserves_correctness_and_polarity():
    pi = builtin_theory("pi")
    s = embed_operation(pi, "s")  # v * (v * t) -> t
    regrouped = compose(s, assoc(pi, Atom(Sort("v")), Atom(Sort("v")), Atom(Sort("t"))))
    cur = curry(regrouped)
    assert format_formula(cur.dom) == "v * v"
    assert format_formula(cur.cod) == "t -o t"
    assert is_correct(cur)
    # global polarities transfer: wire sets coincide modulo the reindexing
    assert len(cur.wires) == len(regrouped.wires)


def test_embed_operation_examples():
    pi = builtin_theory("pi")
    s = embed_operation(pi, "s")
    assert (dom_port(0), cell_dom_port("c0", 0)) in s.wires
    assert (cell_cod_port("c0", 0), cod_port(0)) in s.wires
    g = embed_operation(pi, "g")
    assert (cell_dom_port("c0", 1), dom_port(1)) in g.wires  # binder leaves the cell
    assert is_correct(s) and is_correct(g)
    # a degenerate operation c : I -> I
    th = Theory(signature=make_signature({"a"}, {"u": (UNIT, UNIT)}))
    u = embed_operation(th, "u")
    assert len(u.cells) == 1 and len(u.wires) == 2 and is_correct(u)


def test_operation_name():
    pi = builtin_theory("pi")
    name = operation_name(pi, "g")
    assert name.dom == UNIT
    assert format_formula(name.cod) == "v * (v -o t) -o t"
    assert is_correct(name)


def test_compose_preserves_correctness_random():
    rng = random.Random(23)
    for theory_name in ("linear_lambda", "lambda_sharing", "lambda_two_sorted", "pi"):
        for _ in range(25):
            f, g = random_composable_pair(theory_name, rng)
            assert is_correct(f) and is_correct(g)
            ok, why = correctness_report(compose(g, f))
            assert ok, (theory_name, why)


def test_decompose_paper_context():
    th = builtin_theory("linear_lambda")
    t = Atom(Sort("t"))
    ctx = Net(th, Tensor(t, Tensor(t, t)), t, [("i", "app"), ("o", "app")], [
        (cell_cod_port("i", 0), cell_dom_port("o", 0)),
        (dom_port(0), cell_dom_port("i", 0)),
        (dom_port(1), cell_dom_port("i", 1)),
        (dom_port(2), cell_dom_port("o", 1)),
        (cell_cod_port("o", 0), cod_port(0)),
    ])
    assert is_correct(ctx)
    f1, f2 = decompose(ctx, {"o"})
    assert format_formula(f1.cod) == "(t * t -o t) * (t * (t * t))"
    assert dict(f1.cells) == {"o": "app"}
    assert dict(f2.cells) == {"i": "app"}
    assert is_correct(f1) and is_correct(f2)
    from smcnets.equivalence import rewiring_equivalent
    assert rewiring_equivalent(compose(f2, f1), ctx)


def test_decompose_trivial_partitions():
    th = builtin_theory("linear_lambda")
    from smcnets.calculi import encode_lambda, parse_lambda
    net = encode_lambda(parse_lambda("\\x. \\y. x y"))
    all_cells = {cid for cid, _ in net.cells}
    f1, f2 = decompose(net, set())
    assert not f1.cells and nets_isomorphic(f1, identity(th, net.dom))
    g1, g2 = decompose(net, all_cells)
    assert not g2.cells
    from smcnets.equivalence import rewiring_equivalent
    assert rewiring_equivalent(compose(f2, f1), net)
    assert rewiring_equivalent(compose(g2, g1), net)
