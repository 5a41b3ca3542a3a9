"""Signatures (sorts plus typed operations) and theories (signatures plus
equations between nets, with optional monoid/comonoid/restriction structure
singled out for the economised net representation)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .formula import Atom, Formula, Lollipop, Sort, Tensor, Unit, UNIT, sorts_of

if TYPE_CHECKING:  # equations hold nets; the net module imports this one
    from .net import Net


class TheoryError(ValueError):
    pass


@dataclass(frozen=True)
class SmcSignature:
    sorts: frozenset[Sort]
    operations: tuple[tuple[str, Formula, Formula], ...]

    def __post_init__(self):
        table = {}
        for name, dom, cod in self.operations:
            if name in table:
                raise TheoryError(f"duplicate operation {name!r}")
            table[name] = (dom, cod)
            for f in (dom, cod):
                extra = sorts_of(f) - self.sorts
                if extra:
                    raise TheoryError(
                        f"operation {name!r} uses sorts outside the signature: "
                        + ", ".join(sorted(s.name for s in extra))
                    )
        object.__setattr__(self, "_table", table)

    @property
    def op_types(self) -> dict[str, tuple[Formula, Formula]]:
        return dict(self._table)

    def op(self, name: str) -> tuple[Formula, Formula]:
        try:
            return self._table[name]
        except KeyError:
            raise KeyError(f"unknown operation {name!r}") from None

    def has_op(self, name: str) -> bool:
        return name in self._table


def make_signature(sorts: list[str] | set[str], operations: dict[str, tuple[Formula, Formula]]) -> SmcSignature:
    return SmcSignature(
        frozenset(Sort(s) for s in sorts),
        tuple((name, dom, cod) for name, (dom, cod) in operations.items()),
    )


@dataclass(frozen=True)
class SignatureMorphism:
    sort_map: tuple[tuple[Sort, Sort], ...]
    op_map: tuple[tuple[str, str], ...]

    def sort_image(self, s: Sort) -> Sort:
        for a, b in self.sort_map:
            if a == s:
                return b
        raise TheoryError(f"sort {s.name!r} not mapped")

    def op_image(self, name: str) -> str:
        for a, b in self.op_map:
            if a == name:
                return b
        raise TheoryError(f"operation {name!r} not mapped")


def apply_signature_morphism(m: SignatureMorphism, f: Formula) -> Formula:
    """Structure-preserving sort renaming of `f`."""
    if isinstance(f, Atom):
        return Atom(m.sort_image(f.sort))
    if isinstance(f, Unit):
        return f
    if isinstance(f, Tensor):
        return Tensor(apply_signature_morphism(m, f.left), apply_signature_morphism(m, f.right))
    return Lollipop(apply_signature_morphism(m, f.left), apply_signature_morphism(m, f.right))


def check_signature_morphism(m: SignatureMorphism, src: SmcSignature, dst: SmcSignature) -> None:
    """Each operation must map to one whose type is the renamed type."""
    for name, dom, cod in src.operations:
        image = m.op_image(name)
        idom, icod = dst.op(image)
        if idom != apply_signature_morphism(m, dom) or icod != apply_signature_morphism(m, cod):
            raise TheoryError(f"morphism does not preserve the type of {name!r}")


@dataclass(frozen=True)
class Equation:
    name: str
    lhs: "Net"
    rhs: "Net"


@dataclass(frozen=True)
class Theory:
    signature: SmcSignature
    equations: tuple[Equation, ...] = ()
    monoid_sorts: tuple[tuple[Sort, str, str], ...] = ()    # (sort, m-op, e-op)
    comonoid_sorts: tuple[tuple[Sort, str, str], ...] = ()  # (sort, c-op, w-op)
    nu_ops: tuple[tuple[str, str], ...] = ()                # (nu-op, w-op)
    name: str = ""

    # -- economisation views --------------------------------------------

    @property
    def collapsed(self) -> bool:
        """True when some structure is declared absorbed into multi-wires."""
        return bool(self.monoid_sorts or self.comonoid_sorts or self.nu_ops)

    def monoid_decl(self, sort: Sort | None):
        for s, m, e in self.monoid_sorts:
            if s == sort:
                return m, e
        return None

    def comonoid_decl(self, sort: Sort | None):
        for s, c, w in self.comonoid_sorts:
            if s == sort:
                return c, w
        return None

    @property
    def structural_ops(self) -> frozenset[str]:
        out = set()
        for _, m, e in self.monoid_sorts:
            out |= {m, e}
        for _, c, w in self.comonoid_sorts:
            out |= {c, w}
        for nu, w in self.nu_ops:
            out |= {nu, w}
        return frozenset(out)

    @property
    def weakening_ops(self) -> frozenset[str]:
        return frozenset(w for _, _, w in self.comonoid_sorts)

    @property
    def restriction_ops(self) -> frozenset[str]:
        return frozenset(nu for nu, _ in self.nu_ops)


def validate_theory(t: Theory) -> None:
    """Check all Theory invariants; raises TheoryError naming the first
    offender.  In particular the declared structure must have the right
    shapes and must not occur in any stored equation (the side condition
    for the economised representation)."""
    sig = t.signature
    for eq in t.equations:
        if eq.lhs.dom != eq.rhs.dom or eq.lhs.cod != eq.rhs.cod:
            raise TheoryError(f"equation {eq.name!r}: sides have different boundaries")
    for sort, m, e in t.monoid_sorts:
        a = Atom(sort)
        _expect_op(sig, m, Tensor(a, a), a, "monoid multiplication")
        _expect_op(sig, e, UNIT, a, "monoid unit")
    for sort, c, w in t.comonoid_sorts:
        a = Atom(sort)
        _expect_op(sig, c, a, Tensor(a, a), "comonoid comultiplication")
        _expect_op(sig, w, a, UNIT, "comonoid counit")
    for nu, w in t.nu_ops:
        dom, cod = _get_op(sig, nu, "restriction")
        if dom != UNIT or not isinstance(cod, Atom):
            raise TheoryError(f"restriction {nu!r} must have type I -> <sort>")
        wdom, wcod = _get_op(sig, w, "counit")
        if wdom != cod or wcod != UNIT:
            raise TheoryError(f"counit {w!r} paired with {nu!r} must have type {cod} -> I")
    declared = t.structural_ops
    for eq in t.equations:
        for side, net in (("lhs", eq.lhs), ("rhs", eq.rhs)):
            used = {op for _, op in net.cells}
            bad = used & declared
            if bad:
                raise TheoryError(
                    f"equation {eq.name!r} ({side}) uses declared structural operation(s): "
                    + ", ".join(sorted(bad))
                )


def _get_op(sig: SmcSignature, name: str, what: str) -> tuple[Formula, Formula]:
    if not sig.has_op(name):
        raise TheoryError(f"{what} operation {name!r} is not in the signature")
    return sig.op(name)


def _expect_op(sig: SmcSignature, name: str, dom: Formula, cod: Formula, what: str) -> None:
    actual_dom, actual_cod = _get_op(sig, name, what)
    if actual_dom != dom or actual_cod != cod:
        raise TheoryError(f"{what} {name!r} must have type {dom} -> {cod}")


def plain_theory(sig: SmcSignature, name: str = "") -> Theory:
    return Theory(signature=sig, name=name)
