"""SCC classification, almost-sure finiteness and almost-sure reachability."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .bp import BranchingProcess, erase_types, reachable_types, scc_list
from .errors import NotAnScc
from .linalg import RationalMatrix, Trichotomy, rho_trichotomy_irreducible


class SccClass(enum.Enum):
    SUPERCRITICAL = "supercritical"
    LINEAR = "linear"
    NEITHER = "neither"


def is_linear(bp: BranchingProcess, scc: Iterable[int]) -> bool:
    s = frozenset(scc)
    return all(sum(1 for y in r.rhs if y in s) == 1 for x in s for r in bp.by_lhs[x])


def scc_trichotomy(bp: BranchingProcess, scc: Iterable[int]) -> Trichotomy:
    s = frozenset(scc)
    ents: dict[tuple[int, int], Fraction] = {}
    for x in s:
        for r in bp.by_lhs[x]:
            for y in r.rhs:
                if y in s:
                    ents[(x, y)] = ents.get((x, y), Fraction(0)) + r.prob
    sub = RationalMatrix(tuple(sorted(s)), ents)
    if not sub.entries:
        return Trichotomy.LESS
    return rho_trichotomy_irreducible(sub)


def classify_scc(bp: BranchingProcess, scc: Iterable[int], check: bool = True) -> SccClass:
    s = frozenset(scc)
    if check:
        dec = scc_list(bp)
        x = next(iter(s), None)
        if x is None or frozenset(dec.sccs[dec.comp[x]]) != s:
            raise NotAnScc(f"{sorted(bp.types[i] for i in s)} is not an SCC")
    if is_linear(bp, s):
        return SccClass.LINEAR
    if scc_trichotomy(bp, s) is Trichotomy.GREATER:
        return SccClass.SUPERCRITICAL
    return SccClass.NEITHER


@dataclass(frozen=True)
class FinitenessResult:
    finite: bool
    witness: tuple[int, ...] | None = None
    witness_class: SccClass | None = None

    def __bool__(self) -> bool:
        return self.finite


def almost_surely_finite(bp: BranchingProcess) -> FinitenessResult:
    """True iff the tree is finite with probability 1.

    On NO, ``witness`` is the offending (supercritical or linear) reachable
    SCC nearest the start, i.e. the first one in topological order.
    """
    reach = reachable_types(bp)
    dec = scc_list(bp)
    for members in reversed(dec.sccs):
        if not reach.intersection(members):
            continue
        cls = classify_scc(bp, members, check=False)
        if cls is not SccClass.NEITHER:
            return FinitenessResult(False, members, cls)
    return FinitenessResult(True)


def almost_surely_reach(bp: BranchingProcess, targets: Iterable[int]) -> bool:
    """True iff with probability 1 every branch contains a node whose type is a target."""
    t = frozenset(targets)
    if bp.start in t:
        return True
    return almost_surely_finite(erase_types(bp, t)).finite
