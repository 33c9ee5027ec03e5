"""Qualitative decision procedures P(...) = 1 for BPs against linear-time specs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .automata import (
    AfXf,
    Dpa,
    Nba,
    Product,
    accepting_anchor_pairs,
    build_afxf,
    check_unambiguous,
    product_with_bp,
    subset_construct_bdet,
)
from .bp import BranchingProcess, Rule, successor_graph
from .errors import AmbiguousAutomaton, EpsRulesNotSupported
from .finiteness import almost_surely_finite, almost_surely_reach
from .graph import reachable, restrict, tarjan
from .linalg import RationalMatrix, Trichotomy, rho_trichotomy, rho_trichotomy_irreducible
from .ltl import Formula, negate, ltl_to_uba, to_string
from .safra import DEFAULT_BUDGET, determinize_to_dpa


@dataclass
class Verdict:
    """Answer plus diagnostics.  A NO answer always carries a ``witness``."""

    problem: str
    answer: bool
    route: str
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.answer

    @property
    def label(self) -> str:
        return "YES" if self.answer else "NO"


def _no_eps(bp: BranchingProcess) -> None:
    if bp.has_eps_rules:
        raise EpsRulesNotSupported("automaton specifications need a BP without eps-rules")


# -- finiteness / reachability wrappers ----------------------------------------------


def check_finite_one(bp: BranchingProcess) -> Verdict:
    res = almost_surely_finite(bp)
    if res.finite:
        return Verdict("finite1", True, "scc-classification")
    return Verdict(
        "finite1",
        False,
        "scc-classification",
        witness={"scc": [bp.types[i] for i in res.witness], "class": res.witness_class.value},
    )


def check_reach_one(bp: BranchingProcess, targets: Iterable[int]) -> Verdict:
    t = frozenset(targets)
    names = sorted(bp.types[i] for i in t)
    if bp.start in t:
        return Verdict("reach1", True, "start-in-targets", details={"targets": names})
    from .bp import erase_types

    res = almost_surely_finite(erase_types(bp, t))
    if res.finite:
        return Verdict("reach1", True, "erase-then-finite", details={"targets": names})
    return Verdict(
        "reach1",
        False,
        "erase-then-finite",
        witness={"scc": [bp.types[i] for i in res.witness], "class": res.witness_class.value},
        details={"targets": names},
    )


# -- parity automata ----------------------------------------------------------------


@dataclass(frozen=True)
class ProductBpWithPriorities:
    bp: BranchingProcess
    priority: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]  # (BP type, DPA state) per product type


def dpa_product(bp: BranchingProcess, dpa: Dpa) -> ProductBpWithPriorities:
    """Product BP over reachable (X, q) where q is the DPA state after reading X."""
    dpa = dpa.with_alphabet(bp.types)
    start = (bp.start, dpa.delta[dpa.initial][bp.start])
    ids = {start: 0}
    order = [start]
    rules: list[Rule] = []
    todo = deque([start])
    while todo:
        x, q = todo.popleft()
        me = ids[(x, q)]
        for r in bp.by_lhs[x]:
            kids = []
            for y in r.rhs:
                key = (y, dpa.delta[q][y])
                if key not in ids:
                    ids[key] = len(order)
                    order.append(key)
                    todo.append(key)
                kids.append(ids[key])
            rules.append(Rule(me, tuple(kids), r.prob))
    names = tuple(f"{bp.types[x]}_{dpa.states[q]}" for x, q in order)
    if len(set(names)) != len(names):
        names = tuple(f"T{i}" for i in range(len(order)))
    rules.sort(key=lambda r: r.lhs)
    pbp = BranchingProcess(names, tuple(rules), 0, bp.eps_allowed)
    return ProductBpWithPriorities(pbp, tuple(dpa.priority[q] for _, q in order), tuple(order))


def check_dpa_one(bp: BranchingProcess, dpa: Dpa, route: str = "dpa-product") -> Verdict:
    """P(all branches accepted by the DPA) = 1?

    For each reachable odd-priority product type Z of priority c, require
    P_Z(F N_Z) = 1 where N_Z holds the types of priority > c and the types
    that cannot reach Z through types of priority <= c.  Types sharing an SCC
    of the <= c subgraph share N_Z, so one check per such SCC suffices.
    """
    _no_eps(bp)
    prod = dpa_product(bp, dpa)
    pbp, pri = prod.bp, prod.priority
    n = len(pbp.types)
    succ = successor_graph(pbp).succ
    pred: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)
    checked = 0
    for c in sorted({p for p in pri if p % 2 == 1}):
        low = {v for v in range(n) if pri[v] <= c}
        sub = restrict(succ, low)
        comps = tarjan(n, sub)
        for comp in comps:
            zs = [v for v in comp if pri[v] == c]
            if not zs:
                continue
            z = zs[0]
            can_reach = reachable(restrict(pred, low), [z])
            n_z = frozenset(v for v in range(n) if v not in can_reach)
            checked += 1
            if not almost_surely_reach(pbp.with_start(z), n_z):
                x, q = prod.pairs[z]
                return Verdict(
                    "dpa1",
                    False,
                    route,
                    witness={
                        "product_type": [bp.types[x], str(dpa.states[q])],
                        "priority": c,
                        "n_set_size": len(n_z),
                    },
                    details={"product_types": n, "odd_groups_checked": checked},
                )
    return Verdict("dpa1", True, route, details={"product_types": n, "odd_groups_checked": checked})


# -- co-Büchi via unambiguous automata ------------------------------------------------


def anchor_matrix(afxf: AfXf, bp: BranchingProcess) -> RationalMatrix:
    """Expected-successor matrix over the non-initial states of A[f, X_f]."""
    counts: list[dict[int, Fraction]] = []
    for x in range(len(bp.types)):
        m: dict[int, Fraction] = {}
        for r in bp.by_lhs[x]:
            for y in r.rhs:
                m[y] = m.get(y, Fraction(0)) + r.prob
        counts.append(m)
    aut = afxf.nba
    ents = {}
    for i in range(1, aut.n):
        _, x = afxf.pairs[i - 1]
        for y, targets in enumerate(aut.delta[i]):
            for j in targets:
                ents[(i, j)] = counts[x].get(y, Fraction(0))
    return RationalMatrix(tuple(range(1, aut.n)), ents)


def proper_branching(afxf: AfXf, bp: BranchingProcess) -> tuple | None:
    """A witness ``(state, rule, i, j)`` of proper branching, or None."""
    aut = afxf.nba
    for i in range(1, aut.n):
        _, y = afxf.pairs[i - 1]
        live = aut.delta[i]
        for r in bp.by_lhs[y]:
            hits = [pos for pos, z in enumerate(r.rhs) if live[z]]
            if len(hits) >= 2:
                return (i, r, hits[0], hits[1])
    return None


def _anchor_name(product: Product, f: int) -> list[str]:
    q, x = product.nba.states[f]
    return [str(q), x]


def check_couba_one(
    bp: BranchingProcess,
    uba: Nba,
    assume_unambiguous: bool = False,
    problem: str = "couba1",
    route: str = "couba-spectral",
) -> Verdict:
    """P(all branches rejected by the UBA) = 1, via one spectral test per anchor."""
    _no_eps(bp)
    details: dict[str, Any] = {}
    if assume_unambiguous:
        details["warning"] = "unambiguity assumed, not checked; unsound if ambiguous"
    else:
        res = check_unambiguous(uba)
        if not res.unambiguous:
            raise AmbiguousAutomaton(res.witness)
    product = product_with_bp(uba, bp)
    anchors = accepting_anchor_pairs(product)
    details["anchors"] = len(anchors)
    # Stop at the first supercritical anchor; a critical one is kept as the
    # witness only if no supercritical anchor turns up.
    witness = None
    for f in anchors:
        afxf = build_afxf(product, f)
        rho = rho_trichotomy_irreducible(anchor_matrix(afxf, bp))
        if rho is Trichotomy.LESS or (witness is not None and rho is Trichotomy.EQUAL):
            continue
        pb = proper_branching(afxf, bp) is not None
        if rho is Trichotomy.GREATER or not pb:
            witness = {"anchor": _anchor_name(product, f), "rho": str(rho), "proper_branching": pb,
                       "scc_size": len(afxf.members)}
            if rho is Trichotomy.GREATER:
                break
    if witness is not None:
        return Verdict(problem, False, route, witness=witness, details=details)
    return Verdict(problem, True, route, details=details)


def check_conba_one_exact(bp: BranchingProcess, nba: Nba, budget: int = DEFAULT_BUDGET) -> Verdict:
    """P(all branches rejected by an arbitrary NBA) = 1, via the subset BP per anchor."""
    _no_eps(bp)
    product = product_with_bp(nba, bp)
    anchors = accepting_anchor_pairs(product)
    for f in anchors:
        afxf = build_afxf(product, f)
        bdet = subset_construct_bdet(afxf, bp, budget=budget)
        if not almost_surely_reach(bdet.bp, [bdet.empty]):
            return Verdict(
                "conba1",
                False,
                "conba-subset",
                witness={"anchor": _anchor_name(product, f), "bdet_types": len(bdet.subsets)},
                details={"anchors": len(anchors)},
            )
    return Verdict("conba1", True, "conba-subset", details={"anchors": len(anchors)})


def lifting_agreement(bp: BranchingProcess, uba: Nba) -> list[tuple[Trichotomy, Trichotomy]]:
    """Per anchor: (trichotomy of the anchor matrix, trichotomy of the B_det mean
    matrix without the empty type).  Equal pairs are expected for unambiguous input."""
    from .bp import mean_matrix

    product = product_with_bp(uba, bp)
    out = []
    for f in accepting_anchor_pairs(product):
        afxf = build_afxf(product, f)
        rho_m = rho_trichotomy_irreducible(anchor_matrix(afxf, bp))
        bdet = subset_construct_bdet(afxf, bp)
        mbar = mean_matrix(bdet.bp, keys="index")
        keep = [i for i in mbar.keys if i != bdet.empty]
        out.append((rho_m, rho_trichotomy(mbar.submatrix(keep))))
    return out


# -- NBA and LTL ----------------------------------------------------------------------


def check_nba_one(bp: BranchingProcess, nba: Nba, budget: int = DEFAULT_BUDGET) -> Verdict:
    """P(all branches accepted by the NBA) = 1, via determinization to a DPA."""
    dpa = determinize_to_dpa(nba.with_alphabet(bp.types), budget=budget)
    v = check_dpa_one(bp, dpa, route="nba-determinize-dpa")
    v.problem = "nba1"
    v.details["dpa_states"] = dpa.n
    return v


def check_ltl_one(bp: BranchingProcess, phi: Formula, assume_unambiguous: bool = False,
                  budget: int | None = None) -> Verdict:
    """P(all branches satisfy phi) = 1: translate the negation to a UBA, run the co-UBA test."""
    neg = negate(phi)
    kwargs = {} if budget is None else {"budget": budget}
    uba = ltl_to_uba(neg, bp.types, **kwargs)
    v = check_couba_one(bp, uba, assume_unambiguous=assume_unambiguous, problem="ltl1",
                        route="ltl-negate-uba-couba")
    v.details["formula"] = to_string(phi)
    v.details["negation"] = to_string(neg)
    v.details["uba_states"] = uba.n
    return v
