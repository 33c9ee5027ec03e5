import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpmc.automata import (
    Dpa,
    Nba,
    accepting_anchor_pairs,
    build_afxf,
    check_unambiguous,
    dump_automaton,
    lasso_membership,
    parse_automaton,
    product_with_bp,
    subset_construct_bdet,
    trim_useful,
)
from bpmc.bp import parse_bp, successor_graph, validate_bp
from bpmc.errors import AlphabetMismatch, AnchorNotOnCycle, EmptyPeriod, ParseError, PartialDpa
from randgen import random_bp, random_nba

AA = "bp; start a; a -> 1 : a a;"
LOOP_A = "nba; alphabet a; states q; initial q; accepting q; q -a-> q;"


def lassos(alphabet, max_u=3, max_v=3):
    for lu in range(max_u + 1):
        for u in itertools.product(alphabet, repeat=lu):
            for lv in range(1, max_v + 1):
                for v in itertools.product(alphabet, repeat=lv):
                    yield u, v


def words_equal(a, b, alphabet, max_u=3, max_v=3):
    return all(lasso_membership(a, u, v) == lasso_membership(b, u, v) for u, v in lassos(alphabet, max_u, max_v))


def check_witness(aut: Nba, w):
    letters = list(w.u) + list(w.v)
    si = {s: i for i, s in enumerate(aut.states)}
    for run in (w.run1, w.run2):
        idx = [si[s] for s in run]
        assert idx[0] in aut.initial
        for i, a in enumerate(letters):
            assert idx[i + 1] in aut.delta[idx[i]][aut.letter(a)]
        assert idx[len(w.u)] == idx[-1]
        assert any(q in aut.accepting for q in idx[len(w.u):])
    assert w.run1 != w.run2


class TestParseDump:
    def test_round_trip(self):
        aut = parse_automaton(LOOP_A)
        assert parse_automaton(dump_automaton(aut)) == aut

    def test_dpa(self):
        d = parse_automaton("dpa; alphabet a b; states p q; initial p; priority p 1; priority q 2;"
                            "p -a-> p; p -b-> q; q -a-> q; q -b-> q;")
        assert isinstance(d, Dpa) and d.priority == (1, 2)
        assert parse_automaton(dump_automaton(d)) == d

    def test_partial_dpa(self):
        with pytest.raises(PartialDpa):
            parse_automaton("dpa; alphabet a b; states p; initial p; priority p 0; p -a-> p;")

    def test_nondeterministic_dpa(self):
        with pytest.raises(ParseError):
            parse_automaton("dpa; alphabet a; states p q; initial p; priority p 0; priority q 0;"
                            "p -a-> p; p -a-> q; q -a-> q;")

    @pytest.mark.parametrize("text", [
        "nba; alphabet a; states q; initial r; q -a-> q;",
        "nba; alphabet a; states q; initial q; q -b-> q;",
        "nba; alphabet a; states q; initial q; q => q;",
        "buchi; alphabet a;",
    ])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_automaton(text)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_round_trip(self, seed):
        aut = random_nba(random.Random(seed), 4, ("a", "b"))
        assert parse_automaton(dump_automaton(aut)) == aut


class TestLasso:
    def test_self_loop(self):
        aut = parse_automaton(LOOP_A)
        assert lasso_membership(aut, (), ("a",))

    def test_missing_letter(self):
        aut = parse_automaton("nba; alphabet a b; states q; initial q; accepting q; q -a-> q;")
        assert not lasso_membership(aut, (), ("b",))

    def test_infinitely_many_visits(self):
        aut = parse_automaton("nba; alphabet a b; states p f; initial p; accepting f;"
                              "p -a-> p; p -b-> p; p -b-> f; f -a-> p;")
        assert lasso_membership(aut, ("a",), ("a", "b"))
        assert not lasso_membership(aut, ("b",), ("a",))

    def test_empty_period(self):
        with pytest.raises(EmptyPeriod):
            lasso_membership(parse_automaton(LOOP_A), ("a",), ())

    def test_dpa_max_even(self):
        d = parse_automaton("dpa; alphabet a b; states p q; initial p; priority p 1; priority q 2;"
                            "p -a-> p; p -b-> q; q -a-> p; q -b-> q;")
        assert lasso_membership(d, (), ("a", "b"))  # sees 1 and 2 forever: max is 2
        assert not lasso_membership(d, ("b",), ("a",))


class TestTrimAndUnambiguity:
    def test_unreachable_island_removed(self):
        aut = parse_automaton("nba; alphabet a; states q r; initial q; accepting q r; q -a-> q; r -a-> r;")
        trimmed, removed = trim_useful(aut)
        assert removed == ["r"] and trimmed.n == 1

    def test_dead_sink_removed(self):
        aut = parse_automaton("nba; alphabet a; states q d; initial q; accepting q; q -a-> q; q -a-> d; d -a-> d;")
        _, removed = trim_useful(aut)
        assert removed == ["d"]

    def test_all_useful_unchanged(self):
        aut = parse_automaton(LOOP_A)
        assert trim_useful(aut) == (aut, [])

    def test_deterministic_is_unambiguous(self):
        assert check_unambiguous(parse_automaton(LOOP_A))

    def test_duplicated_component(self):
        aut = parse_automaton("nba; alphabet a; states p q; initial p q; accepting p q; p -a-> p; q -a-> q;")
        res = check_unambiguous(aut)
        assert not res
        check_witness(aut, res.witness)

    def test_ambiguity_reached_late(self):
        aut = parse_automaton(
            "nba; alphabet a b; states s p q; initial s; accepting p q;"
            "s -a-> s; s -b-> p; s -b-> q; p -a-> p; q -a-> q;")
        res = check_unambiguous(aut)
        assert not res
        check_witness(aut, res.witness)
        assert res.witness.u[-1] == "b" or "b" in res.witness.v

    def test_nondeterministic_but_unambiguous(self):
        # guesses the last b; only one guess can be right
        aut = parse_automaton("nba; alphabet a b; states p f; initial p; accepting f;"
                              "p -a-> p; p -b-> p; p -b-> f; f -a-> f;")
        assert check_unambiguous(aut)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_witnesses_are_genuine(self, seed):
        rng = random.Random(seed)
        aut = random_nba(rng, rng.randint(1, 4), ("a", "b"), density=0.3)
        res = check_unambiguous(aut)
        if not res:
            check_witness(aut, res.witness)
        trimmed, _ = trim_useful(aut)
        assert bool(check_unambiguous(trimmed)) == bool(res)
        assert words_equal(aut, trimmed, ("a", "b"), 2, 2)


class TestProduct:
    def test_aa_example(self):
        bp = parse_bp(AA)
        prod = product_with_bp(parse_automaton(LOOP_A), bp)
        assert prod.nba.n == 1 and prod.nba.delta[0][0] == frozenset({0})
        assert accepting_anchor_pairs(prod) == [0]
        af = build_afxf(prod, 0)
        assert af.nba.n == 2
        assert af.nba.delta[0][0] == frozenset({1}) and af.nba.delta[1][0] == frozenset({1})
        bdet = subset_construct_bdet(af, bp)
        start_rules = bdet.bp.by_lhs[bdet.bp.start]
        assert len(start_rules) == 1 and start_rules[0].rhs == (bdet.bp.start, bdet.bp.start)
        assert bdet.bp.by_lhs[bdet.empty][0].rhs == (bdet.empty,)

    def test_empty_delta_has_no_successors(self):
        bp = parse_bp("bp; start X; X -> 1 : X;")
        aut = parse_automaton("nba; alphabet X; states q r; initial q; accepting q; r -X-> q;")
        prod = product_with_bp(aut, bp)
        assert prod.nba.delta[prod.index(0, 0)][0] == frozenset()

    def test_non_successor_letter(self, running):
        aut = Nba.build(["q"], running.types, [("q", a, "q") for a in running.types], ["q"], ["q"])
        prod = product_with_bp(aut, running)
        d = running.index("D")
        i = running.index("I")
        assert prod.nba.delta[prod.index(0, d)][i] == frozenset()

    def test_alphabet_mismatch(self, running):
        with pytest.raises(AlphabetMismatch):
            product_with_bp(parse_automaton(LOOP_A), running)

    def test_anchor_without_cycle(self):
        bp = parse_bp("bp; start X; X -> 1 : Y; Y -> 1 : Y;")
        aut = parse_automaton("nba; alphabet X Y; states f g; initial f; accepting f; f -X-> g; g -Y-> g;")
        prod = product_with_bp(aut, bp)
        assert accepting_anchor_pairs(prod) == []
        with pytest.raises(AnchorNotOnCycle):
            build_afxf(prod, prod.index(0, 0))

    def test_unreachable_cycle_excluded(self):
        bp = parse_bp("bp; start X; X -> 1 : X; Y -> 1 : Y;")
        aut = parse_automaton("nba; alphabet X Y; states q; initial q; accepting q; q -Y-> q;")
        assert accepting_anchor_pairs(product_with_bp(aut, bp)) == []

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_structural_invariants(self, seed):
        rng = random.Random(seed)
        bp = random_bp(rng, max_types=3)
        aut = random_nba(rng, rng.randint(1, 4), bp.types, density=0.3)
        prod = product_with_bp(aut, bp)
        m = len(bp.types)
        assert prod.nba.n == aut.n * m
        succ = successor_graph(bp).succ
        for v in range(prod.nba.n):
            q, x = prod.pair(v)
            for y, targets in enumerate(prod.nba.delta[v]):
                for t in targets:
                    r, y2 = prod.pair(t)
                    assert y2 == y and y in succ[x] and r in aut.delta[q][x]
        for f in accepting_anchor_pairs(prod):
            af = build_afxf(prod, f)
            assert len(af.nba.accepting) == 1
            assert all(not t for a, t in enumerate(af.nba.delta[0]) if a != prod.pair(f)[1])
            assert all(len(t) <= 1 for t in af.nba.delta[0])
            bdet = subset_construct_bdet(af, bp)
            assert validate_bp(bdet.bp) == []
            for i, sub in enumerate(bdet.subsets):
                if i != bdet.empty:
                    x = af.pairs[next(iter(sub)) - 1][1]
                    assert len(bdet.bp.by_lhs[i]) == len(bp.by_lhs[x])
