"""Büchi and parity word automata over a BP's type alphabet.

States and letters are dense indices; ``states`` and ``alphabet`` carry the
display keys.  ``Nba.delta[q][a]`` is a frozenset of successor indices and
``Dpa.delta[q][a]`` a single index.  Parity acceptance is max-even.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

from .bp import IDENT, BranchingProcess, Rule, _statements, successor_graph
from .errors import (
    AlphabetMismatch,
    AnchorNotOnCycle,
    BudgetExceeded,
    EmptyPeriod,
    ParseError,
    PartialDpa,
)
from .graph import reachable, restrict, scc_decompose, tarjan


@dataclass(frozen=True)
class Nba:
    states: tuple[Hashable, ...]
    alphabet: tuple[str, ...]
    delta: tuple[tuple[frozenset[int], ...], ...]
    initial: frozenset[int]
    accepting: frozenset[int]

    @classmethod
    def build(
        cls,
        states: Sequence[Hashable],
        alphabet: Sequence[str],
        transitions: Iterable[tuple[Hashable, str, Hashable]],
        initial: Iterable[Hashable],
        accepting: Iterable[Hashable],
    ) -> "Nba":
        """Construct from state keys / letter names rather than indices."""
        states = tuple(states)
        alphabet = tuple(alphabet)
        si = {s: i for i, s in enumerate(states)}
        ai = {a: i for i, a in enumerate(alphabet)}
        if len(si) != len(states) or len(ai) != len(alphabet):
            raise ValueError("duplicate state or letter")
        d = [[set() for _ in alphabet] for _ in states]
        for q, a, r in transitions:
            if q not in si or r not in si:
                raise KeyError(f"unknown state in transition {q!r} -{a}-> {r!r}")
            if a not in ai:
                raise KeyError(f"unknown letter {a!r}")
            d[si[q]][ai[a]].add(si[r])
        return cls(
            states,
            alphabet,
            tuple(tuple(frozenset(s) for s in row) for row in d),
            frozenset(si[q] for q in initial),
            frozenset(si[q] for q in accepting),
        )

    @property
    def n(self) -> int:
        return len(self.states)

    def letter(self, name: str) -> int:
        return self.alphabet.index(name)

    def transitions(self):
        for q, row in enumerate(self.delta):
            for a, targets in enumerate(row):
                for r in sorted(targets):
                    yield q, a, r

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(set().union(*row))) if row else () for row in self.delta)

    def post(self, qs: Iterable[int], a: int) -> frozenset[int]:
        out: set[int] = set()
        for q in qs:
            out |= self.delta[q][a]
        return frozenset(out)

    def is_deterministic(self) -> bool:
        return len(self.initial) <= 1 and all(len(t) <= 1 for row in self.delta for t in row)

    def with_alphabet(self, alphabet: Sequence[str]) -> "Nba":
        """Reorder letters to match ``alphabet`` (same letter set required)."""
        alphabet = tuple(alphabet)
        if alphabet == self.alphabet:
            return self
        if set(alphabet) != set(self.alphabet) or len(alphabet) != len(self.alphabet):
            raise AlphabetMismatch(f"{sorted(self.alphabet)} vs {sorted(alphabet)}")
        perm = [self.alphabet.index(a) for a in alphabet]
        delta = tuple(tuple(row[j] for j in perm) for row in self.delta)
        return Nba(self.states, alphabet, delta, self.initial, self.accepting)

    def __str__(self) -> str:
        return dump_automaton(self)


@dataclass(frozen=True)
class Dpa:
    states: tuple[Hashable, ...]
    alphabet: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    initial: int
    priority: tuple[int, ...]

    def __post_init__(self):
        k = len(self.alphabet)
        for q, row in enumerate(self.delta):
            if len(row) != k or any(r is None or not 0 <= r < len(self.states) for r in row):
                raise PartialDpa(f"transition function undefined at state {self.states[q]!r}")
        if len(self.priority) != len(self.states) or any(p < 0 for p in self.priority):
            raise ValueError("every state needs a nonnegative priority")

    @property
    def n(self) -> int:
        return len(self.states)

    def with_alphabet(self, alphabet: Sequence[str]) -> "Dpa":
        alphabet = tuple(alphabet)
        if alphabet == self.alphabet:
            return self
        if set(alphabet) != set(self.alphabet) or len(alphabet) != len(self.alphabet):
            raise AlphabetMismatch(f"{sorted(self.alphabet)} vs {sorted(alphabet)}")
        perm = [self.alphabet.index(a) for a in alphabet]
        delta = tuple(tuple(row[j] for j in perm) for row in self.delta)
        return Dpa(self.states, alphabet, delta, self.initial, self.priority)

    def __str__(self) -> str:
        return dump_automaton(self)


# -- trimming and unambiguity ---------------------------------------------------


def _accepting_cycle_states(n: int, succ, accepting: Iterable[int]) -> set[int]:
    """States that can reach an accepting state lying on a cycle."""
    dec = scc_decompose_lists(n, succ)
    comp, nontriv = dec
    seeds = [f for f in accepting if nontriv[comp[f]]]
    pred: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)
    return reachable(pred, seeds)


def scc_decompose_lists(n: int, succ):
    sccs = tarjan(n, succ)
    comp = [0] * n
    for i, m in enumerate(sccs):
        for v in m:
            comp[v] = i
    nontriv = [any(comp[w] == i for v in m for w in succ[v]) for i, m in enumerate(sccs)]
    return comp, nontriv


def _sub_nba(nba: Nba, keep: Iterable[int]) -> Nba:
    keep = sorted(keep)
    new = {old: i for i, old in enumerate(keep)}
    delta = tuple(
        tuple(frozenset(new[r] for r in t if r in new) for t in nba.delta[q]) for q in keep
    )
    return Nba(
        tuple(nba.states[q] for q in keep),
        nba.alphabet,
        delta,
        frozenset(new[q] for q in nba.initial if q in new),
        frozenset(new[q] for q in nba.accepting if q in new),
    )


def trim_useful(nba: Nba) -> tuple[Nba, list[Hashable]]:
    """Keep states reachable from the initial set that can reach an accepting cycle."""
    reach = reachable(nba.succ, nba.initial)
    useful = reach & _accepting_cycle_states(nba.n, nba.succ, nba.accepting)
    removed = [nba.states[q] for q in range(nba.n) if q not in useful]
    if not removed:
        return nba, []
    return _sub_nba(nba, useful), removed


@dataclass(frozen=True)
class AmbiguityWitness:
    """Lasso word ``u v^omega`` with two distinct accepting runs (state sequences
    over ``u`` then one pass of ``v``; both runs return to their ``v``-start)."""

    u: tuple[str, ...]
    v: tuple[str, ...]
    run1: tuple[Hashable, ...]
    run2: tuple[Hashable, ...]

    def __str__(self) -> str:
        return f"u={' '.join(self.u) or 'eps'} v={' '.join(self.v)}"


@dataclass(frozen=True)
class UnambiguityResult:
    unambiguous: bool
    witness: AmbiguityWitness | None = None

    def __bool__(self) -> bool:
        return self.unambiguous


def check_unambiguous(nba: Nba) -> UnambiguityResult:
    """Self-product test with a divergence bit.

    Ambiguous iff some reachable diverged pair lies in a nontrivial SCC of the
    pair graph that contains a pair accepting in the first component and a
    pair accepting in the second.
    """
    aut, _ = trim_useful(nba)
    n = aut.n
    if n == 0:
        return UnambiguityResult(True)
    k = len(aut.alphabet)
    # node ids: p*n+q for diverged pairs; n*n+p for undiverged diagonal (p,p)
    def node(p, q, d):
        return p * n + q if d else n * n + p

    start = set()
    for p in aut.initial:
        for q in aut.initial:
            start.add(node(p, q, p != q))
    parent: dict[int, tuple[int, int] | None] = {s: None for s in start}
    succ: dict[int, list[tuple[int, int]]] = {}
    todo = deque(sorted(start))
    while todo:
        v = todo.popleft()
        if v >= n * n:
            p = q = v - n * n
            d = False
        else:
            p, q = divmod(v, n)
            d = True
        out = []
        for a in range(k):
            tp = aut.delta[p][a]
            if not tp:
                continue
            tq = aut.delta[q][a] if q != p else tp
            for r in tp:
                for s in tq:
                    w = node(r, s, d or r != s)
                    out.append((a, w))
                    if w not in parent:
                        parent[w] = (v, a)
                        todo.append(w)
        succ[v] = out
    div = sorted(v for v in parent if v < n * n)
    if not div:
        return UnambiguityResult(True)
    local = {v: i for i, v in enumerate(div)}
    lsucc = [sorted({local[w] for _, w in succ[v] if w in local}) for v in div]
    comps = tarjan(len(div), lsucc)
    for comp in comps:
        cset = set(comp)
        if len(comp) == 1 and comp[0] not in lsucc[comp[0]]:
            continue
        members = [div[i] for i in comp]
        f1 = next((v for v in members if v // n in aut.accepting), None)
        f2 = next((v for v in members if v % n in aut.accepting), None)
        if f1 is None or f2 is None:
            continue
        return UnambiguityResult(False, _ambiguity_witness(aut, parent, succ, set(members), f1, f2))
    return UnambiguityResult(True)


def _ambiguity_witness(aut, parent, succ, members, f1, f2) -> AmbiguityWitness:
    n = aut.n

    def decode(v):
        return (v - n * n, v - n * n) if v >= n * n else divmod(v, n)

    # prefix to f1
    prefix = []
    v = f1
    while parent[v] is not None:
        pv, a = parent[v]
        prefix.append((pv, a))
        v = pv
    prefix.reverse()

    def path(src, dst):
        if src == dst:
            return []
        prev = {src: None}
        dq = deque([src])
        while dq:
            x = dq.popleft()
            for a, w in succ[x]:
                if w in members and w not in prev:
                    prev[w] = (x, a)
                    if w == dst:
                        dq.clear()
                        break
                    dq.append(w)
        out = []
        x = dst
        while prev[x] is not None:
            px, a = prev[x]
            out.append((px, a))
            x = px
        return out[::-1]

    loop = path(f1, f2)
    if f1 == f2:
        # need a genuine cycle back to f1
        a, w = next((a, w) for a, w in succ[f1] if w in members)
        loop = [(f1, a)] + path(w, f1)
    else:
        loop = loop + path(f2, f1)
    u = tuple(aut.alphabet[a] for _, a in prefix)
    vw = tuple(aut.alphabet[a] for _, a in loop)
    seq = [x for x, _ in prefix] + [x for x, _ in loop] + [f1]
    run1 = tuple(aut.states[decode(x)[0]] for x in seq)
    run2 = tuple(aut.states[decode(x)[1]] for x in seq)
    return AmbiguityWitness(u, vw, run1, run2)


# -- product with a branching process ----------------------------------------


class ProductState(NamedTuple):
    q: Hashable
    X: str

    def __str__(self) -> str:
        return f"({self.q},{self.X})"


@dataclass(frozen=True)
class Product:
    """``A x B``.  Product state ``(q, X)`` has index ``q * |Gamma| + X``."""

    nba: Nba
    n_types: int

    def pair(self, i: int) -> tuple[int, int]:
        return divmod(i, self.n_types)

    def index(self, q: int, x: int) -> int:
        return q * self.n_types + x


def product_with_bp(nba: Nba, bp: BranchingProcess) -> Product:
    nba = nba.with_alphabet(bp.types)
    g = successor_graph(bp)
    m = len(bp.types)
    states = tuple(ProductState(nba.states[q], bp.types[x]) for q in range(nba.n) for x in range(m))
    delta = []
    for q in range(nba.n):
        for x in range(m):
            row = [frozenset()] * m
            targets = nba.delta[q][x]
            if targets:
                for y in g.succ[x]:
                    row[y] = frozenset(r * m + y for r in targets)
            delta.append(tuple(row))
    prod = Nba(
        states,
        bp.types,
        tuple(delta),
        frozenset(q * m + bp.start for q in nba.initial),
        frozenset(f * m + x for f in nba.accepting for x in range(m)),
    )
    return Product(prod, m)


def accepting_anchor_pairs(product: Product) -> list[int]:
    """Accepting product states on a cycle and reachable from an initial state."""
    nba = product.nba
    reach = reachable(nba.succ, nba.initial)
    comp, nontriv = scc_decompose_lists(nba.n, nba.succ)
    return sorted(f for f in nba.accepting if f in reach and nontriv[comp[f]])


@dataclass(frozen=True)
class AfXf:
    """Automaton around an anchor: state 0 is the fresh initial state, state
    ``i >= 1`` is product state ``members[i-1]``; state ``anchor`` accepts."""

    nba: Nba
    members: tuple[int, ...]
    anchor: int
    pairs: tuple[tuple[int, int], ...]  # (q, X) for every state >= 1


def build_afxf(product: Product, f: int) -> AfXf:
    nba = product.nba
    comp, nontriv = scc_decompose_lists(nba.n, nba.succ)
    if f not in nba.accepting or not nontriv[comp[f]]:
        raise AnchorNotOnCycle(f"{nba.states[f]} is not an accepting state on a cycle")
    members = tuple(v for v in range(nba.n) if comp[v] == comp[f])
    new = {old: i + 1 for i, old in enumerate(members)}
    k = len(nba.alphabet)
    _, xf = product.pair(f)
    bar = tuple(frozenset([new[f]]) if a == xf else frozenset() for a in range(k))
    delta = [bar]
    for v in members:
        delta.append(tuple(frozenset(new[w] for w in t if w in new) for t in nba.delta[v]))
    states = ("q0bar",) + tuple(nba.states[v] for v in members)
    aut = Nba(states, nba.alphabet, tuple(delta), frozenset([0]), frozenset([new[f]]))
    return AfXf(aut, members, new[f], tuple(product.pair(v) for v in members))


@dataclass(frozen=True)
class BdetBp:
    """``B_det``: types are subsets of AfXf states (sharing one BP type), plus ∅.

    ``subsets[i]`` is the AfXf-state set of type i; the empty type has the
    empty frozenset and index ``empty``.
    """

    bp: BranchingProcess
    subsets: tuple[frozenset[int], ...]
    empty: int


def subset_construct_bdet(afxf: AfXf, bp: BranchingProcess, budget: int | None = None) -> BdetBp:
    aut = afxf.nba
    start = frozenset([afxf.anchor])
    empty = frozenset()
    ids: dict[frozenset[int], int] = {start: 0, empty: 1}
    order = [start, empty]
    rules: list[Rule] = [Rule(1, (1,), Fraction(1))]
    todo = deque([start])
    while todo:
        P = todo.popleft()
        x = afxf.pairs[next(iter(P)) - 1][1]
        for r in bp.by_lhs[x]:
            kids = []
            for y in r.rhs:
                Q = aut.post(P, y)
                if Q not in ids:
                    if budget is not None and len(order) >= budget:
                        raise BudgetExceeded("subset_construct_bdet", budget)
                    ids[Q] = len(order)
                    order.append(Q)
                    todo.append(Q)
                kids.append(ids[Q])
            rules.append(Rule(ids[P], tuple(kids), r.prob))
    names = tuple("EMPTY" if P == empty else f"P{i}" for i, P in enumerate(order))
    rules.sort(key=lambda r: r.lhs)
    return BdetBp(BranchingProcess(names, tuple(rules), 0, False), tuple(order), 1)


# -- lasso membership --------------------------------------------------------


def _letters(aut, word: Sequence[str]) -> list[int]:
    idx = {a: i for i, a in enumerate(aut.alphabet)}
    try:
        return [idx[a] for a in word]
    except KeyError as e:
        raise KeyError(f"letter {e.args[0]!r} not in alphabet") from None


def lasso_membership(aut: Nba | Dpa, u: Sequence[str], v: Sequence[str]) -> bool:
    """Does ``aut`` accept ``u v^omega``?"""
    if not v:
        raise EmptyPeriod("period v must be nonempty")
    w = _letters(aut, u) + _letters(aut, v)
    lu, L = len(u), len(u) + len(v)
    if isinstance(aut, Dpa):
        q, i = aut.initial, 0
        seen: dict[tuple[int, int], int] = {}
        trace: list[int] = []
        while True:
            if i >= lu:
                if (q, i) in seen:
                    break
                seen[(q, i)] = len(trace)
            trace.append(aut.priority[q])
            q = aut.delta[q][w[i]]
            i = i + 1 if i + 1 < L else lu
        return max(trace[seen[(q, i)]:]) % 2 == 0
    # subset-simulate the prefix, then search the loop product for an accepting cycle
    cur = set(aut.initial)
    for a in w[:lu]:
        cur = set(aut.post(cur, a))
        if not cur:
            return False
    p = len(v)
    n = aut.n
    loop = w[lu:]
    succ: dict[int, list[int]] = {}
    start = [q * p for q in cur]
    seen = set(start)
    todo = list(start)
    while todo:
        node = todo.pop()
        q, j = divmod(node, p)
        j2 = (j + 1) % p
        out = [r * p + j2 for r in aut.delta[q][loop[j]]]
        succ[node] = out
        for x in out:
            if x not in seen:
                seen.add(x)
                todo.append(x)
    nodes = sorted(seen)
    local = {x: i for i, x in enumerate(nodes)}
    lsucc = [[local[y] for y in succ[x]] for x in nodes]
    for comp in tarjan(len(nodes), lsucc):
        if len(comp) == 1 and comp[0] not in lsucc[comp[0]]:
            continue
        if any(nodes[i] // p in aut.accepting for i in comp):
            return True
    return False


# -- text format --------------------------------------------------------------

_TRANS = re.compile(r"^([^\s-]+)\s*-\s*([^\s-]+)\s*->\s*([^\s-]+)$")


def parse_automaton(text: str) -> Nba | Dpa:
    stmts = list(_statements(text))
    if not stmts or stmts[0][1] not in ("nba", "dpa"):
        raise ParseError("file must start with 'nba;' or 'dpa;'", stmts[0][0] if stmts else 1)
    kind = stmts[0][1]
    alphabet = states = None
    initial: list[str] = []
    accepting: list[str] = []
    priority: dict[str, int] = {}
    trans: list[tuple[str, str, str, int]] = []
    for line, st in stmts[1:]:
        words = st.split()
        head = words[0]
        if head == "alphabet":
            alphabet = words[1:]
        elif head == "states":
            states = words[1:]
        elif head == "initial":
            initial += words[1:]
        elif head == "accepting" and kind == "nba":
            accepting += words[1:]
        elif head == "priority" and kind == "dpa":
            if len(words) != 3 or not words[2].isdigit():
                raise ParseError(f"expected 'priority STATE N', got {st!r}", line)
            priority[words[1]] = int(words[2])
        else:
            m = _TRANS.match(st)
            if not m:
                raise ParseError(f"cannot parse statement {st!r}", line)
            trans.append((*m.groups(), line))
    if alphabet is None or states is None:
        raise ParseError("missing 'alphabet' or 'states' declaration")
    for nm in (*alphabet, *states):
        if not IDENT.match(nm):
            raise ParseError(f"bad identifier {nm!r}")
    sset, aset = set(states), set(alphabet)
    for q, a, r, line in trans:
        if q not in sset or r not in sset:
            raise ParseError(f"unknown state in transition {q} -{a}-> {r}", line)
        if a not in aset:
            raise ParseError(f"unknown letter {a!r}", line)
    for q in (*initial, *accepting, *priority):
        if q not in sset:
            raise ParseError(f"unknown state {q!r}")
    if kind == "nba":
        return Nba.build(states, alphabet, [(q, a, r) for q, a, r, _ in trans], initial, accepting)
    if len(initial) != 1:
        raise ParseError("a DPA needs exactly one initial state")
    si = {s: i for i, s in enumerate(states)}
    ai = {a: i for i, a in enumerate(alphabet)}
    table: list[list[int | None]] = [[None] * len(alphabet) for _ in states]
    for q, a, r, line in trans:
        cur = table[si[q]][ai[a]]
        if cur is not None and cur != si[r]:
            raise ParseError(f"DPA is not deterministic at ({q}, {a})", line)
        table[si[q]][ai[a]] = si[r]
    for q in states:
        for a in alphabet:
            if table[si[q]][ai[a]] is None:
                raise PartialDpa(f"no transition from {q} on {a}")
    missing = [q for q in states if q not in priority]
    if missing:
        raise ParseError(f"missing priority for {missing[0]}")
    return Dpa(
        tuple(states),
        tuple(alphabet),
        tuple(tuple(r) for r in table),
        si[initial[0]],
        tuple(priority[q] for q in states),
    )


def _state_names(aut) -> list[str]:
    names = [str(s) for s in aut.states]
    if all(IDENT.match(s) for s in names) and len(set(names)) == len(names):
        return names
    return [f"s{i}" for i in range(aut.n)]


def dump_automaton(aut: Nba | Dpa) -> str:
    names = _state_names(aut)
    lines = ["dpa;" if isinstance(aut, Dpa) else "nba;", f"alphabet {' '.join(aut.alphabet)};",
             f"states {' '.join(names)};"]
    if isinstance(aut, Dpa):
        lines.append(f"initial {names[aut.initial]};")
        lines += [f"priority {names[q]} {p};" for q, p in enumerate(aut.priority)]
        for q, row in enumerate(aut.delta):
            for a, r in enumerate(row):
                lines.append(f"{names[q]} -{aut.alphabet[a]}-> {names[r]};")
    else:
        if aut.initial:
            lines.append(f"initial {' '.join(names[q] for q in sorted(aut.initial))};")
        if aut.accepting:
            lines.append(f"accepting {' '.join(names[q] for q in sorted(aut.accepting))};")
        for q, a, r in aut.transitions():
            lines.append(f"{names[q]} -{aut.alphabet[a]}-> {names[r]};")
    return "\n".join(lines) + "\n"
