import pytest
from hypothesis import given, strategies as st

from smcnets.formula import (
    Atom,
    Lollipop,
    ParseError,
    Polarity,
    Sort,
    Tensor,
    UNIT,
    classicalize,
    format_classical,
    format_formula,
    leaves,
    leaf_count,
    parse_formula,
    polarity,
    ports,
)

A = frozenset({Sort("a"), Sort("v"), Sort("t")})


def P(text):
    return parse_formula(text, A)


def test_parse_examples():
    assert P("((a -o I) -o I) -o I") == Lollipop(
        Lollipop(Lollipop(Atom(Sort("a")), UNIT), UNIT), UNIT)
    assert P("a") == Atom(Sort("a"))
    assert P("v * (v -o t)") == Tensor(Atom(Sort("v")), Lollipop(Atom(Sort("v")), Atom(Sort("t"))))


def test_parse_associativity():
    # `*` is left-associative and binds tighter than the right-associative `-o`
    assert P("a * a * a") == Tensor(Tensor(Atom(Sort("a")), Atom(Sort("a"))), Atom(Sort("a")))
    assert P("a -o a -o a") == Lollipop(Atom(Sort("a")), Lollipop(Atom(Sort("a")), Atom(Sort("a"))))
    assert P("a * a -o a") == Lollipop(Tensor(Atom(Sort("a")), Atom(Sort("a"))), Atom(Sort("a")))


def test_parse_errors():
    with pytest.raises(ParseError):
        P("a -o")
    with pytest.raises(ParseError):
        P("(a")
    with pytest.raises(ParseError) as e:
        P("a ? b")
    assert e.value.position is not None
    with pytest.raises(ParseError):
        P("unknown_sort")


def test_polarity_golden():
    # the triple-implication example: a and the middle unit are negative
    f = P("((a -o I) -o I) -o I")
    pols = [polarity(f, i) for i in range(4)]
    assert pols == [Polarity.NEGATIVE, Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.POSITIVE]
    assert polarity(f, ports(f)[0]) is Polarity.NEGATIVE
    with pytest.raises(IndexError):
        polarity(f, 4)


def test_polarity_single_atom():
    assert polarity(P("a"), 0) is Polarity.POSITIVE


def test_classicalize_golden():
    f = P("((a -o I) -o I) -o I")
    assert format_classical(classicalize(f, False)) == "((a^ par 1) (x) _|_) par 1"
    assert format_classical(classicalize(P("a"), True)) == "a^"
    assert format_classical(classicalize(P("v * (v -o t)"), True)) == "v^ par (v (x) t^)"


_sorts = st.sampled_from([Sort("a"), Sort("v"), Sort("t")])


@st.composite
def formulas(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        if draw(st.integers(0, 4)) == 0:
            return UNIT
        return Atom(draw(_sorts))
    ctor = Tensor if draw(st.booleans()) else Lollipop
    return ctor(draw(formulas(depth=depth - 1)), draw(formulas(depth=depth - 1)))


@given(formulas())
def test_print_parse_roundtrip(f):
    assert parse_formula(format_formula(f), A) == f


@given(formulas())
def test_classicalize_preserves_leaf_count(f):
    from smcnets.formula import classical_leaves

    for negate in (False, True):
        assert len(classical_leaves(classicalize(f, negate))) == leaf_count(f)


@given(formulas())
def test_polarity_matches_classical_view(f):
    from smcnets.formula import classical_leaves, PosAtom, One

    cl = classical_leaves(classicalize(f, False))
    for i in range(leaf_count(f)):
        positive = isinstance(cl[i], (PosAtom, One))
        assert (polarity(f, i) is Polarity.POSITIVE) == positive


def test_sort_names():
    with pytest.raises(ValueError):
        Sort("")
    with pytest.raises(ValueError):
        Sort("no spaces")
    with pytest.raises(ValueError):
        Sort("I")
    assert Sort("x'").name == "x'"
