"""Small directed-graph toolkit: adjacency lists over dense indices, Tarjan SCCs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices ``0..n-1``; ``succ[v]`` is a sorted tuple."""

    succ: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
        return cls(tuple(tuple(sorted(a)) for a in adj))

    @property
    def n(self) -> int:
        return len(self.succ)

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, vs in enumerate(self.succ) for v in vs}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.succ[u]


@dataclass(frozen=True)
class SccDecomposition:
    """SCCs in reverse-topological order (no edge from an earlier to a later one).

    ``sccs[i]`` is sorted ascending; ``comp[v]`` is the position of v's SCC;
    ``nontrivial[i]`` tells whether SCC i has an internal edge.
    """

    sccs: tuple[tuple[int, ...], ...]
    comp: tuple[int, ...]
    nontrivial: tuple[bool, ...]


def tarjan(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Iterative Tarjan; yields components sinks-first."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def scc_decompose(g: Digraph) -> SccDecomposition:
    sccs = tarjan(g.n, g.succ)
    comp = [0] * g.n
    for i, members in enumerate(sccs):
        for v in members:
            comp[v] = i
    nontrivial = []
    for i, members in enumerate(sccs):
        nontrivial.append(any(comp[w] == i for v in members for w in g.succ[v]))
    return SccDecomposition(tuple(tuple(s) for s in sccs), tuple(comp), tuple(nontrivial))


def reachable(succ: Sequence[Sequence[int]], sources: Iterable[int]) -> set[int]:
    seen = set(sources)
    todo = list(seen)
    while todo:
        v = todo.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def restrict(succ: Sequence[Sequence[int]], keep: set[int]) -> list[tuple[int, ...]]:
    """Adjacency lists with edges touching vertices outside ``keep`` dropped."""
    return [tuple(w for w in succ[v] if w in keep) if v in keep else () for v in range(len(succ))]
