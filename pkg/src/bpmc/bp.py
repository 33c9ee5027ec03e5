"""Branching processes: data model, validation, text format and graph analyses."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import NotAnScc, ParseError, StartInT, StartNotInScc, ValidationError
from .graph import Digraph, reachable, scc_decompose
from .linalg import RationalMatrix

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Rule:
    lhs: int
    rhs: tuple[int, ...]
    prob: Fraction


@dataclass(frozen=True)
class BranchingProcess:
    """A multi-type BP.  Types are referred to by dense index into ``types``."""

    types: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: int
    eps_allowed: bool = False

    @cached_property
    def by_lhs(self) -> tuple[tuple[Rule, ...], ...]:
        groups: list[list[Rule]] = [[] for _ in self.types]
        for r in self.rules:
            if 0 <= r.lhs < len(groups):
                groups[r.lhs].append(r)
        return tuple(tuple(g) for g in groups)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.types)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown type {name!r}") from None

    def indices(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index(n) for n in names)

    def with_start(self, x: int) -> "BranchingProcess":
        return replace(self, start=x)

    @property
    def has_eps_rules(self) -> bool:
        return any(not r.rhs for r in self.rules)

    def __str__(self) -> str:
        return dump_bp(self)


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    def __str__(self) -> str:
        fields = ", ".join(f"{v}" for v in self.__dict__.values())
        return f"{type(self).__name__}({fields})"


@dataclass(frozen=True, repr=False)
class ProbabilitySumMismatch(Violation):
    type: str
    total: Fraction


@dataclass(frozen=True, repr=False)
class EmptyRhsWithoutEps(Violation):
    rule: str


@dataclass(frozen=True, repr=False)
class NoRulesForType(Violation):
    type: str


@dataclass(frozen=True, repr=False)
class UnknownType(Violation):
    name: str


@dataclass(frozen=True, repr=False)
class BadProbability(Violation):
    rule: str


def _rule_text(bp: BranchingProcess, r: Rule) -> str:
    def nm(i):
        return bp.types[i] if 0 <= i < len(bp.types) else f"#{i}"

    rhs = " ".join(nm(i) for i in r.rhs) or "eps"
    return f"{nm(r.lhs)} -> {r.prob} : {rhs}"


def validate_bp(bp: BranchingProcess) -> list[Violation]:
    """All invariant violations of ``bp``; an empty list means valid."""
    out: list[Violation] = []
    n = len(bp.types)
    if len(set(bp.types)) != n:
        seen = set()
        for t in bp.types:
            if t in seen:
                out.append(UnknownType(f"duplicate {t}"))
            seen.add(t)
    if not 0 <= bp.start < n:
        out.append(UnknownType(f"#{bp.start}"))
    for r in bp.rules:
        for i in (r.lhs, *r.rhs):
            if not 0 <= i < n:
                out.append(UnknownType(f"#{i}"))
        if not 0 < r.prob <= 1:
            out.append(BadProbability(_rule_text(bp, r)))
        if not r.rhs and not bp.eps_allowed:
            out.append(EmptyRhsWithoutEps(_rule_text(bp, r)))
    for x, group in enumerate(bp.by_lhs):
        if not group:
            out.append(NoRulesForType(bp.types[x]))
            continue
        total = sum((r.prob for r in group), Fraction(0))
        if total != 1:
            out.append(ProbabilitySumMismatch(bp.types[x], total))
    return out


def check_bp(bp: BranchingProcess) -> BranchingProcess:
    violations = validate_bp(bp)
    if violations:
        raise ValidationError(violations)
    return bp


def make_bp(
    rules: Iterable[tuple[str, object, Sequence[str]]],
    start: str,
    eps_allowed: bool = False,
    types: Sequence[str] | None = None,
    validate: bool = True,
) -> BranchingProcess:
    """Build a BP from ``(lhs, prob, rhs_names)`` triples.

    Without an explicit ``types`` list the type table is the left-hand sides
    in order of first appearance (the start type first if it has no rule yet).
    """
    rules = [(lhs, Fraction(p) if not isinstance(p, str) else Fraction(p), tuple(rhs))
             for lhs, p, rhs in rules]
    if types is None:
        order: list[str] = []
        for lhs, _, _ in rules:
            if lhs not in order:
                order.append(lhs)
        if start not in order:
            order.insert(0, start)
        types = order
    types = tuple(types)
    idx = {t: i for i, t in enumerate(types)}
    unknown = []
    for lhs, _, rhs in rules:
        for nm in (lhs, *rhs):
            if nm not in idx and UnknownType(nm) not in unknown:
                unknown.append(UnknownType(nm))
    if start not in idx:
        unknown.append(UnknownType(start))
    if unknown:
        raise ValidationError(unknown)
    bp = BranchingProcess(
        types,
        tuple(Rule(idx[lhs], tuple(idx[y] for y in rhs), p) for lhs, p, rhs in rules),
        idx[start],
        eps_allowed,
    )
    return check_bp(bp) if validate else bp


# -- text format --------------------------------------------------------------

_RULE = re.compile(r"^(\S+)\s*->\s*([^:]+?)\s*:\s*(.*)$", re.S)


def _statements(text: str):
    """Yield ``(line, statement)`` pairs split on ';' with '#' comments stripped."""
    buf: list[str] = []
    start_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        while line:
            head, sep, line = line.partition(";")
            if head.strip() and start_line is None:
                start_line = lineno
            buf.append(head)
            if sep:
                stmt = " ".join(" ".join(buf).split())
                if stmt:
                    yield start_line, stmt
                buf, start_line = [], None
            else:
                break
    rest = " ".join(" ".join(buf).split())
    if rest:
        raise ParseError(f"missing ';' after {rest!r}", start_line)


def parse_fraction(tok: str, line: int | None = None) -> Fraction:
    tok = tok.strip()
    if not re.fullmatch(r"\d+(/\d+|\.\d*)?|\.\d+", tok):
        raise ParseError(f"bad probability {tok!r}", line)
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability {tok!r}", line) from None


def parse_bp(text: str) -> BranchingProcess:
    """Parse the ``.bp`` text format and validate the result."""
    stmts = list(_statements(text))
    if not stmts or stmts[0][1].split()[0] != "bp":
        raise ParseError("file must start with 'bp;' or 'bp eps;'", stmts[0][0] if stmts else 1)
    line, head = stmts[0]
    words = head.split()
    if words not in (["bp"], ["bp", "eps"]):
        raise ParseError(f"bad header {head!r}", line)
    eps = len(words) == 2
    start = None
    declared: list[str] | None = None
    rules = []
    for line, st in stmts[1:]:
        words = st.split()
        if words[0] == "start":
            if len(words) != 2 or start is not None:
                raise ParseError("expected exactly one 'start X;'", line)
            start = words[1]
            continue
        if words[0] == "types" and "->" not in st:
            declared = words[1:]
            continue
        m = _RULE.match(st)
        if not m:
            raise ParseError(f"cannot parse statement {st!r}", line)
        lhs, p, rhs = m.groups()
        if not IDENT.match(lhs):
            raise ParseError(f"bad type name {lhs!r}", line)
        rhs_names = rhs.split()
        if rhs_names == ["eps"]:
            if not eps:
                raise ValidationError([EmptyRhsWithoutEps(f"{lhs} -> {p} : eps")])
            rhs_names = []
        for nm in rhs_names:
            if not IDENT.match(nm) or nm == "eps":
                raise ParseError(f"bad type name {nm!r}", line)
        rules.append((lhs, parse_fraction(p, line), rhs_names))
    if start is None:
        raise ParseError("missing 'start' statement")
    return make_bp(rules, start, eps_allowed=eps, types=declared)


def dump_bp(bp: BranchingProcess) -> str:
    lines = ["bp eps;" if bp.eps_allowed else "bp;", f"types {' '.join(bp.types)};",
             f"start {bp.types[bp.start]};"]
    for r in bp.rules:
        rhs = " ".join(bp.types[i] for i in r.rhs) or "eps"
        lines.append(f"{bp.types[r.lhs]} -> {r.prob} : {rhs};")
    return "\n".join(lines) + "\n"


# -- graph analyses -----------------------------------------------------------


def successor_graph(bp: BranchingProcess) -> Digraph:
    return Digraph.from_edges(len(bp.types), ((r.lhs, y) for r in bp.rules for y in r.rhs))


def scc_list(bp: BranchingProcess):
    return scc_decompose(successor_graph(bp))


def mean_matrix(bp: BranchingProcess, keys: str = "names") -> RationalMatrix:
    """``M[X, Y]`` = expected number of direct Y-children of an X-node.

    Keys are type names by default; ``keys="index"`` uses dense indices.
    """
    ents: dict[tuple[int, int], Fraction] = {}
    for r in bp.rules:
        for y in r.rhs:
            ents[(r.lhs, y)] = ents.get((r.lhs, y), Fraction(0)) + r.prob
    if keys == "index":
        return RationalMatrix(tuple(range(len(bp.types))), ents)
    nm = bp.types
    return RationalMatrix(nm, {(nm[a], nm[b]): v for (a, b), v in ents.items()})


def reachable_types(bp: BranchingProcess, start: int | None = None) -> frozenset[int]:
    g = successor_graph(bp)
    return frozenset(reachable(g.succ, [bp.start if start is None else start]))


def _project(bp: BranchingProcess, keep: Iterable[int], start: int) -> BranchingProcess:
    """Sub-BP on ``keep`` with other types deleted from right-hand sides."""
    keep = sorted(keep)
    new = {old: i for i, old in enumerate(keep)}
    rules = tuple(
        Rule(new[r.lhs], tuple(new[y] for y in r.rhs if y in new), r.prob)
        for r in bp.rules
        if r.lhs in new
    )
    return BranchingProcess(tuple(bp.types[i] for i in keep), rules, new[start], True)


def restrict_to_scc(bp: BranchingProcess, scc: Iterable[int], x: int) -> BranchingProcess:
    """``B[S, X]``: types ``S``, start ``X``, non-``S`` symbols erased from every rhs."""
    s = frozenset(scc)
    if x not in s:
        raise StartNotInScc(f"{bp.types[x]} not in the given SCC")
    dec = scc_list(bp)
    if frozenset(dec.sccs[dec.comp[x]]) != s:
        raise NotAnScc(f"{sorted(bp.types[i] for i in s)} is not an SCC")
    return _project(bp, s, x)


def erase_types(bp: BranchingProcess, targets: Iterable[int]) -> BranchingProcess:
    """Delete every occurrence of a type in ``targets`` from every rhs.

    The type table and the rules of erased types are kept (they become
    unreachable).  ``F T`` in ``bp`` corresponds to finiteness of the result.
    """
    t = frozenset(targets)
    if bp.start in t:
        raise StartInT(f"start type {bp.types[bp.start]} is a target")
    if not t:
        return bp
    rules = tuple(Rule(r.lhs, tuple(y for y in r.rhs if y not in t), r.prob) for r in bp.rules)
    return BranchingProcess(bp.types, rules, bp.start, True)
