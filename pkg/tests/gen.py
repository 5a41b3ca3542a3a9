"""Deterministic random generators for property tests: correct nets built
compositionally over the built-in theories, and valid bigraphs."""

from __future__ import annotations

import random

from smcnets.calculi import (
    App,
    Get,
    Lam,
    Nu,
    Par,
    Send,
    Var,
    Zero,
    builtin_theory,
    encode_lambda,
    encode_pi,
    enumerate_closed_linear_terms,
)
from smcnets.formula import Atom, Formula, Lollipop, Sort, Tensor, UNIT
from smcnets.net import Net
from smcnets.smc import (
    assoc,
    assoc_inv,
    compose,
    curry,
    embed_operation,
    identity,
    lunit,
    lunit_inv,
    runit,
    runit_inv,
    sym,
    tensor,
    uncurry,
)


def random_formula(theory, rng: random.Random, depth: int = 2) -> Formula:
    sorts = sorted(theory.signature.sorts)
    if depth == 0 or rng.random() < 0.55:
        if rng.random() < 0.15:
            return UNIT
        return Atom(rng.choice(sorts))
    left = random_formula(theory, rng, depth - 1)
    right = random_formula(theory, rng, depth - 1)
    return Tensor(left, right) if rng.random() < 0.75 else Lollipop(left, right)


def random_linear_term(rng: random.Random, max_apps: int = 2):
    k = rng.randint(0, max_apps)
    terms = enumerate_closed_linear_terms(k)
    return terms[rng.randrange(len(terms))]


def random_pi_term(rng: random.Random, depth: int = 3, scope=()):
    if depth <= 0:
        return Send(rng.choice(scope), rng.choice(scope), Zero()) \
            if scope and rng.random() < 0.5 else Zero()
    choices = ["zero", "par", "nu"]
    if scope:
        choices += ["send", "get"]
    kind = rng.choice(choices)
    if kind == "zero":
        return Zero()
    if kind == "par":
        return Par(random_pi_term(rng, depth - 1, scope), random_pi_term(rng, depth - 1, scope))
    if kind == "nu":
        name = f"n{len(scope)}"
        return Nu(name, random_pi_term(rng, depth - 1, scope + (name,)))
    if kind == "send":
        return Send(rng.choice(scope), rng.choice(scope), random_pi_term(rng, depth - 1, scope))
    name = f"n{len(scope)}"
    return Get(rng.choice(scope), name, random_pi_term(rng, depth - 1, scope + (name,)))


def base_net(theory_name: str, rng: random.Random) -> Net:
    """A small correct net over the named theory."""
    theory = builtin_theory(theory_name)
    roll = rng.random()
    if theory_name in ("linear_lambda", "lambda_two_sorted") and roll < 0.5:
        return encode_lambda(random_linear_term(rng), theory_name)
    if theory_name == "pi" and roll < 0.5:
        return encode_pi(Nu("a", random_pi_term(rng, 2, ("a",))))
    if roll < 0.7:
        ops = [name for name, _, _ in theory.signature.operations]
        return embed_operation(theory, rng.choice(ops))
    return identity(theory, random_formula(theory, rng))


def random_net_from(theory_name: str, dom: Formula, rng: random.Random, depth: int = 2) -> Net:
    """A random correct net whose domain is `dom`."""
    theory = builtin_theory(theory_name)
    if depth == 0:
        return identity(theory, dom)
    roll = rng.random()
    if isinstance(dom, Tensor) and roll < 0.35:
        return tensor(random_net_from(theory_name, dom.left, rng, depth - 1),
                      random_net_from(theory_name, dom.right, rng, depth - 1))
    if isinstance(dom, Tensor) and roll < 0.5:
        first = sym(theory, dom.left, dom.right)
        return compose(random_net_from(theory_name, first.cod, rng, depth - 1), first)
    if roll < 0.65:
        first = runit_inv(theory, dom)  # dom -> dom * I
        return compose(random_net_from(theory_name, first.cod, rng, depth - 1), first)
    if roll < 0.8 and isinstance(dom, Tensor) and dom.right == UNIT:
        first = runit(theory, dom.left)
        return compose(random_net_from(theory_name, first.cod, rng, depth - 1), first)
    return identity(theory, dom)


def _size(net: Net) -> int:
    return len(net.all_ports())


def random_correct_net(theory_name: str, rng: random.Random, depth: int = 2,
                       max_ports: int = 24) -> Net:
    f = base_net(theory_name, rng)
    for _ in range(rng.randint(0, depth)):
        if _size(f) > max_ports:
            break
        step = rng.random()
        if step < 0.3:
            f = tensor(f, base_net(theory_name, rng))
        elif step < 0.6:
            f = compose(random_net_from(theory_name, f.cod, rng, 1), f)
        elif step < 0.75 and isinstance(f.dom, Tensor):
            f = curry(f)
        elif step < 0.9 and isinstance(f.cod, Lollipop):
            f = uncurry(f)
    return f


def random_composable_pair(theory_name: str, rng: random.Random):
    f = random_correct_net(theory_name, rng)
    g = random_net_from(theory_name, f.cod, rng)
    return f, g


def random_composable_triple(theory_name: str, rng: random.Random):
    f = random_correct_net(theory_name, rng, depth=1)
    g = random_net_from(theory_name, f.cod, rng, depth=1)
    h = random_net_from(theory_name, g.cod, rng, depth=1)
    return f, g, h
