"""Independent numeric oracles: Monte-Carlo tree prefixes and Kleene iteration.

Nothing here feeds the decision procedures; these are cross-checks.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .bp import BranchingProcess
from .errors import BudgetExceeded


@dataclass(frozen=True)
class PrefixNode:
    type: int
    rule: int | None  # index into bp.by_lhs[type], None for frontier leaves
    children: tuple[int, ...]
    depth: int

    @property
    def is_open(self) -> bool:
        return self.rule is None


@dataclass(frozen=True)
class TreePrefix:
    """Nodes in BFS order; node 0 is the root."""

    nodes: tuple[PrefixNode, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def types_at(self, depth: int) -> list[int]:
        return [v.type for v in self.nodes if v.depth == depth]


class _RuleSampler:
    """Exact rule choice: draw an integer below the common denominator."""

    def __init__(self, bp: BranchingProcess):
        self.bp = bp
        self.tables = []
        for x in range(len(bp.types)):
            rules = bp.by_lhs[x]
            den = math.lcm(*(r.prob.denominator for r in rules)) if rules else 1
            cum, acc = [], 0
            for r in rules:
                acc += r.prob.numerator * (den // r.prob.denominator)
                cum.append(acc)
            self.tables.append((den, cum))

    def draw(self, rng: np.random.Generator, x: int) -> int:
        den, cum = self.tables[x]
        if den < 2**62:
            k = int(rng.integers(0, den))
        else:
            k = int(rng.random() * den)
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if k < cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        return lo


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_prefix(bp: BranchingProcess, depth: int, seed: int, max_nodes: int = 10**6) -> TreePrefix:
    """Random tree prefix: every node above ``depth`` applies a sampled rule."""
    sampler = _RuleSampler(bp)
    rng = _rng(seed)
    types = [bp.start]
    depths = [0]
    rule_of: list[int | None] = [None]
    kids: list[tuple[int, ...]] = [()]
    i = 0
    while i < len(types):
        if depths[i] < depth:
            x = types[i]
            k = sampler.draw(rng, x)
            rule_of[i] = k
            rhs = bp.by_lhs[x][k].rhs
            if len(types) + len(rhs) > max_nodes:
                raise BudgetExceeded("sample_prefix nodes", max_nodes)
            first = len(types)
            for y in rhs:
                types.append(y)
                depths.append(depths[i] + 1)
                rule_of.append(None)
                kids.append(())
            kids[i] = tuple(range(first, len(types)))
        i += 1
    nodes = tuple(PrefixNode(types[j], rule_of[j], kids[j], depths[j]) for j in range(len(types)))
    return TreePrefix(nodes)


def _all_branches_hit(bp, sampler, rng, targets: frozenset[int], depth: int, max_nodes: int) -> bool:
    """Level-order expansion; a branch closes when it meets a target type.

    The RNG is consumed in level order, so for a fixed stream the outcome is
    monotone in ``depth``.
    """
    level = [bp.start]
    d = 0
    seen = 0
    while level:
        live = [x for x in level if x not in targets]
        if not live:
            return True
        if d >= depth:
            return False
        nxt: list[int] = []
        for x in live:
            rhs = bp.by_lhs[x][sampler.draw(rng, x)].rhs
            if not rhs:
                return False  # finite branch that never met a target
            nxt.extend(rhs)
        seen += len(nxt)
        if seen > max_nodes:
            raise BudgetExceeded("estimator nodes", max_nodes)
        level = nxt
        d += 1
    return True


def _count_hits(bp, targets, depth, max_nodes, children) -> int:
    sampler = _RuleSampler(bp)
    hits = 0
    for child in children:
        rng = np.random.Generator(np.random.PCG64(child))
        hits += _all_branches_hit(bp, sampler, rng, targets, depth, max_nodes)
    return hits


def estimate_all_branches_reach(
    bp: BranchingProcess,
    targets: Iterable[int],
    depth: int,
    samples: int,
    seed: int,
    max_nodes: int = 10**6,
    jobs: int = 1,
) -> float:
    """Fraction of sampled prefixes whose every depth-limited branch meets ``targets``.

    A lower-bound estimator of P(every branch hits a target).  Sample ``i``
    uses the ``i``-th spawned child of ``SeedSequence(seed)``, so the result
    does not depend on ``jobs``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    t = frozenset(targets)
    children = np.random.SeedSequence(seed).spawn(samples)
    if jobs <= 1 or samples < 2 * jobs:
        return _count_hits(bp, t, depth, max_nodes, children) / samples
    chunks = [children[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(_count_hits, bp, t, depth, max_nodes, c) for c in chunks]
        return sum(f.result() for f in futs) / samples


def estimator_curve(bp, targets, depths: Sequence[int], samples: int, seed: int,
                    jobs: int = 1) -> list[tuple[int, float]]:
    return [(d, estimate_all_branches_reach(bp, targets, d, samples, seed, jobs=jobs)) for d in depths]


@dataclass(frozen=True)
class KleeneResult:
    values: tuple  # per type; float, or Fraction in exact mode
    iterations: int
    converged: bool
    history: tuple[tuple, ...] = ()

    def __getitem__(self, x: int):
        return self.values[x]


def kleene_reach_prob(
    bp: BranchingProcess,
    targets: Iterable[int],
    max_iter: int = 100_000,
    tol: float = 1e-12,
    exact: bool = False,
    keep_history: bool = False,
) -> KleeneResult:
    """Monotone iteration of q_X = 1 (X in T), else sum_r p * prod q_child.

    Starts from the indicator of ``targets``; each iterate is a lower bound on
    the probability that every branch from X meets a target.
    """
    t = frozenset(targets)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    rules = [[(r.prob if exact else float(r.prob), r.rhs) for r in bp.by_lhs[x]] for x in range(len(bp.types))]
    q = [one if x in t else zero for x in range(len(bp.types))]
    hist = [tuple(q)] if keep_history else []
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        new = []
        for x, rs in enumerate(rules):
            if x in t:
                new.append(one)
                continue
            s = zero
            for p, rhs in rs:
                term = p
                for y in rhs:
                    term *= q[y]
                s += term
            new.append(min(max(s, zero), one))
        delta = max((a - b for a, b in zip(new, q)), default=zero)
        if any(a < b for a, b in zip(new, q)):
            raise AssertionError("Kleene iterates must be nondecreasing")
        q = new
        if keep_history:
            hist.append(tuple(q))
        if delta < tol:
            converged = True
            break
    return KleeneResult(tuple(q), it, converged, tuple(hist))


def write_kleene_csv(bp: BranchingProcess, result: KleeneResult, out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["iter", "type", "value"])
    rows = result.history or (result.values,)
    start = 0 if result.history else result.iterations
    for i, vec in enumerate(rows, start):
        for x, v in enumerate(vec):
            w.writerow([i, bp.types[x], repr(float(v))])


def write_curve_csv(curve: Iterable[tuple[int, float]], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["depth", "rate"])
    for d, r in curve:
        w.writerow([d, repr(r)])
