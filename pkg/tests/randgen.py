"""Seeded random instances shared by the property and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

from bpmc.automata import Nba, check_unambiguous
from bpmc.bp import make_bp
from bpmc.ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    Finally,
    Globally,
    Next,
    Not,
    Or,
    Release,
    Until,
)

TYPE_NAMES = "ABCDE"


def weights_to_probs(rng: random.Random, k: int) -> list[Fraction]:
    w = [rng.randint(1, 5) for _ in range(k)]
    total = sum(w)
    return [Fraction(x, total) for x in w]


def random_bp(rng: random.Random, max_types: int = 5, max_rules: int = 3, max_rhs: int = 3):
    n = rng.randint(1, max_types)
    names = TYPE_NAMES[:n]
    rules = []
    for x in names:
        k = rng.randint(1, max_rules)
        for p in weights_to_probs(rng, k):
            rhs = [rng.choice(names) for _ in range(rng.randint(1, max_rhs))]
            rules.append((x, p, rhs))
    return make_bp(rules, names[0], types=names)


_UNARY = (Not, Next, Finally, Globally)
_BINARY = (And, Or, Until, Release)


def random_formula(rng: random.Random, atoms, size: int):
    """A formula with exactly ``size`` nodes (1 <= size)."""
    if size <= 1:
        r = rng.random()
        if r < 0.08:
            return TRUE
        if r < 0.12:
            return FALSE
        return Atom(rng.choice(list(atoms)))
    if size == 2 or rng.random() < 0.4:
        return rng.choice(_UNARY)(random_formula(rng, atoms, size - 1))
    left = rng.randint(1, size - 2)
    op = rng.choice(_BINARY)
    return op(random_formula(rng, atoms, left), random_formula(rng, atoms, size - 1 - left))


def random_nba(rng: random.Random, n: int, alphabet, density: float = 0.25) -> Nba:
    states = [f"q{i}" for i in range(n)]
    trans = [(p, a, q) for p in states for a in alphabet for q in states if rng.random() < density]
    initial = [states[0]]
    accepting = [q for q in states if rng.random() < 0.4] or [rng.choice(states)]
    return Nba.build(states, alphabet, trans, initial, accepting)


def random_uba(rng: random.Random, max_states: int, alphabet, tries: int = 1000) -> Nba:
    """Rejection-sample until check_unambiguous accepts."""
    for _ in range(tries):
        n = rng.randint(1, max_states)
        aut = random_nba(rng, n, alphabet, density=rng.choice((0.15, 0.25, 0.35)))
        if check_unambiguous(aut).unambiguous:
            return aut
    raise RuntimeError("no unambiguous automaton found")


def random_circuit(rng: random.Random, max_gates: int = 15):
    from bpmc.hardness import MonotoneCircuit

    k = rng.randint(1, 4)
    inputs = {f"i{j}": rng.randint(0, 1) for j in range(k)}
    names = list(inputs)
    gates = {}
    for g in range(rng.randint(1, max_gates)):
        kids = tuple(rng.choice(names) for _ in range(rng.randint(1, 3)))
        gates[f"g{g}"] = (rng.choice(("AND", "OR")), kids)
        names.append(f"g{g}")
    return MonotoneCircuit(gates, inputs, names[-1])


def random_atm(rng: random.Random, alphabet=("a", "b"), max_states: int = 3):
    """A tiny ATM satisfying the one-move-per-(state, letter) requirement."""
    from bpmc.hardness import AtmSpec, AtmTransition

    n = rng.randint(1, max_states)
    work = [f"s{i}" for i in range(n)]
    split = rng.randint(0, n)
    exists, forall = tuple(work[:split]), tuple(work[split:])
    targets = work + ["acc"]
    trans = []
    for s in work:
        for a in alphabet:
            for _ in range(rng.randint(1, 2)):
                trans.append(AtmTransition(s, a, rng.choice(alphabet), rng.choice((-1, 1)), rng.choice(targets)))
    return AtmSpec(exists, forall, "acc", tuple(alphabet), tuple(trans), work[0])
