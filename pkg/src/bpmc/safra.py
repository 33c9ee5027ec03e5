"""NBA to DPA determinization with compact Safra trees (dynamic node names).

Node names are kept compact (``1..k``) and ordered by age, so a parent is
always older than, and named below, its descendants.  Each step yields a
min-parity colour ``2e`` (node ``e`` became green) or ``2f - 1`` (node ``f``
died or was renamed); the DPA stores the colour of the step that entered a
state, flipped to the max-even convention.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .automata import Dpa, Nba
from .errors import BudgetExceeded

# node: (name, label, children)
Tree = Optional[tuple]

DEFAULT_BUDGET = 20000


class _Node:
    __slots__ = ("name", "label", "kids")

    def __init__(self, name, label, kids):
        self.name = name
        self.label = label
        self.kids = kids


def _thaw(t) -> _Node:
    return _Node(t[0], set(t[1]), [_thaw(c) for c in t[2]])


def _freeze(v: _Node, rename: dict[int, int]):
    return (rename[v.name], tuple(sorted(v.label)), tuple(_freeze(c, rename) for c in v.kids))


def _walk(v: _Node):
    yield v
    for c in v.kids:
        yield from _walk(c)


def _strip(v: _Node, states: set[int]) -> None:
    v.label -= states
    for c in v.kids:
        _strip(c, states)


def safra_step(nba: Nba, tree: Tree, a: int) -> tuple[Tree, int | None, int | None]:
    """One letter.  Returns (new tree, min green name, min dead name)."""
    if tree is None:
        return None, None, None
    root = _thaw(tree)
    nodes = list(_walk(root))
    for v in nodes:
        v.label = set(nba.post(v.label, a))
    fresh = max(v.name for v in nodes) + 1
    for v in nodes:
        acc = v.label & nba.accepting
        if acc:
            v.kids.append(_Node(fresh, set(acc), []))
            fresh += 1

    def horizontal(v):
        seen: set[int] = set()
        for c in v.kids:
            _strip(c, seen)
            seen |= c.label
            horizontal(c)

    horizontal(root)
    dead: list[int] = []

    def prune(v) -> bool:
        if not v.label:
            dead.extend(x.name for x in _walk(v))
            return False
        v.kids = [c for c in v.kids if prune(c)]
        return True

    green: list[int] = []

    def vertical(v):
        if v.kids and set().union(*(c.label for c in v.kids)) == v.label:
            for c in v.kids:
                dead.extend(x.name for x in _walk(c))
            v.kids = []
            green.append(v.name)
        else:
            for c in v.kids:
                vertical(c)

    if not prune(root):
        return None, None, min(dead)
    vertical(root)
    alive = sorted(x.name for x in _walk(root))
    rename = {old: i + 1 for i, old in enumerate(alive)}
    return _freeze(root, rename), min(green, default=None), min(dead, default=None)


def determinize_to_dpa(nba: Nba, budget: int = DEFAULT_BUDGET) -> Dpa:
    """A DPA (max-even) accepting exactly the language of ``nba``."""
    n = max(nba.n, 1)
    no_event = 4 * n + 1
    top = 4 * n + 2

    def colour(e, f) -> int:
        if e is not None and (f is None or e < f):
            pmin = 2 * e
        elif f is not None:
            pmin = 2 * f - 1
        else:
            pmin = no_event
        return top - pmin

    init_tree: Tree = (1, tuple(sorted(nba.initial)), ()) if nba.initial else None
    init = (init_tree, 0)
    ids = {init: 0}
    order = [init]
    k = len(nba.alphabet)
    delta: list[list[int]] = []
    step_cache: dict = {}
    todo = deque([init])
    while todo:
        tree, _ = todo.popleft()
        row = []
        for a in range(k):
            key = (tree, a)
            if key not in step_cache:
                t2, e, f = safra_step(nba, tree, a)
                step_cache[key] = (t2, colour(e, f))
            st = step_cache[key]
            if st not in ids:
                if len(order) >= budget:
                    raise BudgetExceeded("determinize_to_dpa", budget)
                ids[st] = len(order)
                order.append(st)
                todo.append(st)
            row.append(ids[st])
        delta.append(row)
    return Dpa(
        tuple(f"d{i}" for i in range(len(order))),
        nba.alphabet,
        tuple(tuple(r) for r in delta),
        0,
        tuple(p for _, p in order),
    )
