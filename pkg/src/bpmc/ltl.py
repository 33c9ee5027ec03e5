"""LTL over BP types: parsing, negation normal form, lasso semantics and an
unambiguous tableau translation to Büchi automata."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterable, Sequence

from .automata import Nba, trim_useful
from .errors import BudgetExceeded, EmptyPeriod, LtlSyntaxError, UnknownAtom


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


TRUE = TrueF()
FALSE = FalseF()

_UNARY = {"!": Not, "X": Next, "F": Finally, "G": Globally}
_BINARY_SYM = {Until: "U", Release: "R", And: "&", Or: "|"}


def to_string(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    for sym, cls in _UNARY.items():
        if type(f) is cls:
            return f"{sym} {_wrap(f.arg)}" if sym != "!" else f"!{_wrap(f.arg)}"
    sym = _BINARY_SYM[type(f)]
    return f"{_wrap(f.left)} {sym} {_wrap(f.right)}"


def _wrap(f: Formula) -> str:
    s = to_string(f)
    return s if isinstance(f, (Atom, TrueF, FalseF)) else f"({s})"


def size(f: Formula) -> int:
    if isinstance(f, (Atom, TrueF, FalseF)):
        return 1
    if hasattr(f, "arg"):
        return 1 + size(f.arg)
    return 1 + size(f.left) + size(f.right)


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(!|&|\|)|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"X", "F", "G", "U", "R", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise LtlSyntaxError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.group(0).strip(), pos))
        pos = m.end()
    out.append(("", len(text)))
    return out


def parse_ltl(text: str, alphabet: Iterable[str] | None = None) -> Formula:
    """Parse ``text``.  Precedence: unary > U/R (right assoc.) > & > |.

    Operator letters ``X F G U R`` are reserved, so they cannot name atoms;
    unless followed by an operand they are read as atoms only if declared.
    """
    alpha = None if alphabet is None else set(alphabet)
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i][0]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def starts_operand(tok: str) -> bool:
        return tok == "(" or tok == "!" or bool(re.match(r"[A-Za-z_]", tok)) and tok not in ("U", "R")

    def disj():
        left = conj()
        while peek() == "|":
            take()
            left = Or(left, conj())
        return left

    def conj():
        left = temporal()
        while peek() == "&":
            take()
            left = And(left, temporal())
        return left

    def temporal():
        left = unary()
        if peek() in ("U", "R"):
            op = take()[0]
            right = temporal()
            return Until(left, right) if op == "U" else Release(left, right)
        return left

    def unary():
        tok, pos = toks[i]
        if tok == "!":
            take()
            return Not(unary())
        if tok in ("X", "F", "G"):
            nxt = toks[i + 1][0]
            is_atom = alpha is not None and tok in alpha and not starts_operand(nxt)
            if not is_atom:
                take()
                return {"X": Next, "F": Finally, "G": Globally}[tok](unary())
        return primary()

    def primary():
        tok, pos = take()
        if tok == "(":
            f = disj()
            if peek() != ")":
                raise LtlSyntaxError("expected ')'", toks[i][1])
            take()
            return f
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok and re.match(r"[A-Za-z_]", tok) and tok not in ("U", "R"):
            if alpha is not None and tok not in alpha:
                raise UnknownAtom(tok, pos)
            return Atom(tok)
        raise LtlSyntaxError(f"unexpected {'end of input' if not tok else repr(tok)}", pos)

    f = disj()
    if peek() != "":
        raise LtlSyntaxError(f"unexpected {peek()!r}", toks[i][1])
    return f


# -- normal forms ---------------------------------------------------------------


def nnf(f: Formula, neg: bool = False) -> Formula:
    """Negation normal form of ``f`` (of ``!f`` when ``neg``)."""
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Not):
        return nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(nnf(f.arg, neg))
    if isinstance(f, Finally):
        return Globally(nnf(f.arg, True)) if neg else Finally(nnf(f.arg))
    if isinstance(f, Globally):
        return Finally(nnf(f.arg, True)) if neg else Globally(nnf(f.arg))
    l, r = nnf(f.left, neg), nnf(f.right, neg)
    dual = {And: Or, Or: And, Until: Release, Release: Until}
    cls = dual[type(f)] if neg else type(f)
    return cls(l, r)


def negate(f: Formula) -> Formula:
    return nnf(f, True)


def desugar(f: Formula) -> Formula:
    """Rewrite into the kernel ``atom, true, !, &, X, U``."""
    if isinstance(f, (Atom, TrueF)):
        return f
    if isinstance(f, FalseF):
        return Not(TRUE)
    if isinstance(f, Not):
        inner = desugar(f.arg)
        return inner.arg if isinstance(inner, Not) else Not(inner)
    if isinstance(f, Next):
        return Next(desugar(f.arg))
    if isinstance(f, Finally):
        return Until(TRUE, desugar(f.arg))
    if isinstance(f, Globally):
        return _neg(Until(TRUE, _neg(desugar(f.arg))))
    l, r = desugar(f.left), desugar(f.right)
    if isinstance(f, And):
        return And(l, r)
    if isinstance(f, Or):
        return _neg(And(_neg(l), _neg(r)))
    if isinstance(f, Until):
        return Until(l, r)
    return _neg(Until(_neg(l), _neg(r)))


def _neg(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


# -- lasso semantics ------------------------------------------------------------


def eval_lasso(f: Formula, u: Sequence[str], v: Sequence[str]) -> bool:
    """Truth of ``f`` at position 0 of ``u v^omega``."""
    if not v:
        raise EmptyPeriod("period v must be nonempty")
    word = list(u) + list(v)
    L, lu = len(word), len(u)
    nxt = [i + 1 if i + 1 < L else lu for i in range(L)]
    memo: dict[Formula, list[bool]] = {}

    def ev(g: Formula) -> list[bool]:
        if g in memo:
            return memo[g]
        if isinstance(g, Atom):
            out = [a == g.name for a in word]
        elif isinstance(g, TrueF):
            out = [True] * L
        elif isinstance(g, FalseF):
            out = [False] * L
        elif isinstance(g, Not):
            out = [not x for x in ev(g.arg)]
        elif isinstance(g, And):
            out = [a and b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Or):
            out = [a or b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Next):
            a = ev(g.arg)
            out = [a[nxt[i]] for i in range(L)]
        elif isinstance(g, (Until, Finally)):
            hold = [True] * L if isinstance(g, Finally) else ev(g.left)
            goal = ev(g.arg if isinstance(g, Finally) else g.right)
            out = _fix(L, nxt, lambda i, o: goal[i] or (hold[i] and o[nxt[i]]), False)
        else:
            keep = ev(g.arg if isinstance(g, Globally) else g.right)
            stop = [False] * L if isinstance(g, Globally) else ev(g.left)
            out = _fix(L, nxt, lambda i, o: keep[i] and (stop[i] or o[nxt[i]]), True)
        memo[g] = out
        return out

    return ev(f)[0]


def _fix(L, nxt, step, init: bool) -> list[bool]:
    """Least (init=False) or greatest (init=True) fixpoint, swept backwards."""
    out = [init] * L
    changed = True
    while changed:
        changed = False
        for i in range(L - 1, -1, -1):
            val = step(i, out)
            if val != out[i]:
                out[i] = val
                changed = True
    return out


# -- tableau translation ----------------------------------------------------------

DEFAULT_BUDGET = 50000


def _subformulas(f: Formula, acc: list[Formula]) -> None:
    if f in acc:
        return
    for child in (getattr(f, "arg", None), getattr(f, "left", None), getattr(f, "right", None)):
        if child is not None:
            _subformulas(child, acc)
    acc.append(f)


def ltl_to_uba(f: Formula, alphabet: Sequence[str], budget: int = DEFAULT_BUDGET) -> Nba:
    """Unambiguous Büchi automaton for ``f`` over single-letter positions.

    A tableau state fixes the current letter and the truth of every ``X``/``U``
    subformula; along any word exactly one run assigns them their true
    values, and the generalized Büchi condition (one set per ``U``) rejects
    every other run.  A deterministic round-robin counter degeneralizes.
    """
    alphabet = tuple(alphabet)
    for a in _atoms(f):
        if a not in alphabet:
            raise UnknownAtom(a)
    core = desugar(f)
    subs: list[Formula] = []
    _subformulas(core, subs)
    temporal = [g for g in subs if isinstance(g, (Next, Until))]
    tpos = {g: i for i, g in enumerate(temporal)}
    untils = [g for g in temporal if isinstance(g, Until)]
    if len(alphabet) * (1 << len(temporal)) > budget:
        raise BudgetExceeded("ltl_to_uba tableau", budget)

    def evaluate(letter: str, bits: int) -> dict[Formula, bool]:
        val: dict[Formula, bool] = {}
        for g in subs:
            if isinstance(g, Atom):
                val[g] = g.name == letter
            elif isinstance(g, TrueF):
                val[g] = True
            elif isinstance(g, Not):
                val[g] = not val[g.arg]
            elif isinstance(g, And):
                val[g] = val[g.left] and val[g.right]
            else:
                val[g] = bool(bits >> tpos[g] & 1)
        return val

    # locally consistent tableau states
    states: list[tuple[str, int]] = []
    vals: list[dict[Formula, bool]] = []
    for letter in alphabet:
        for bits in range(1 << len(temporal)):
            val = evaluate(letter, bits)
            ok = all(
                (not val[g.right] or val[g]) and (not val[g] or val[g.right] or val[g.left])
                for g in untils
            )
            if ok:
                states.append((letter, bits))
                vals.append(val)
    letter_of = [alphabet.index(s[0]) for s in states]

    def compatible(i: int, j: int) -> bool:
        vi, vj = vals[i], vals[j]
        for g in temporal:
            if isinstance(g, Next):
                if vi[g] != vj[g.arg]:
                    return False
            elif vi[g] != (vi[g.right] or (vi[g.left] and vj[g])):
                return False
        return True

    k = len(untils)
    fair = [[(not val[g]) or val[g.right] for g in untils] for val in vals]
    # degeneralized state (s, c), c in 0..k; c == k marks completion of a round
    rounds = max(k, 1)
    node_ids: dict[tuple[int, int], int] = {}
    keys: list[tuple[int, int]] = []

    def advance(c: int, s: int) -> int:
        c = 0 if c == rounds else c
        while c < k and fair[s][c]:
            c += 1
        return rounds if (k == 0 or c == k) else c

    def nid(key):
        if key not in node_ids:
            if len(keys) >= budget:
                raise BudgetExceeded("ltl_to_uba", budget)
            node_ids[key] = len(keys) + 1
            keys.append(key)
        return node_ids[key]

    trans: list[tuple[int, int, int]] = []
    todo = []
    for s, val in enumerate(vals):
        if val[core]:
            t = nid((s, advance(0, s)))
            trans.append((0, letter_of[s], t))
            todo.append(t)
    succ_cache: dict[int, list[int]] = {}
    seen = set(todo)
    while todo:
        t = todo.pop()
        s, c = keys[t - 1]
        if s not in succ_cache:
            succ_cache[s] = [j for j in range(len(states)) if compatible(s, j)]
        for j in succ_cache[s]:
            t2 = nid((j, advance(c, j)))
            trans.append((t, letter_of[j], t2))
            if t2 not in seen:
                seen.add(t2)
                todo.append(t2)
    n = len(keys) + 1
    delta = [[set() for _ in alphabet] for _ in range(n)]
    for q, a, r in trans:
        delta[q][a].add(r)
    acc = frozenset(i + 1 for i, (_, c) in enumerate(keys) if c == rounds)
    names = ("init",) + tuple(f"t{i}" for i in range(1, n))
    raw = Nba(names, alphabet, tuple(tuple(frozenset(x) for x in row) for row in delta),
              frozenset([0]), acc)
    trimmed, _ = trim_useful(raw)
    return _renumber(trimmed)


def _renumber(nba: Nba) -> Nba:
    names = tuple(f"s{i}" for i in range(nba.n))
    return Nba(names, nba.alphabet, nba.delta, nba.initial, nba.accepting)


def _atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for child in (getattr(f, "arg", None), getattr(f, "left", None), getattr(f, "right", None)):
        if child is not None:
            out |= _atoms(child)
    return out


def atoms(f: Formula) -> set[str]:
    return _atoms(f)
