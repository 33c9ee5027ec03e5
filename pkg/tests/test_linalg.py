import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bpmc.errors import DimensionMismatch, NegativeEntry, NotIrreducible
from bpmc.linalg import (
    RationalMatrix,
    Trichotomy,
    null_space_basis,
    rho_trichotomy,
    rho_trichotomy_irreducible,
    solve_linear,
)
from oracles import eig_rho, power_iteration_rho

F = Fraction
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
nonneg = st.fractions(min_value=0, max_value=3, max_denominator=6)


def matvec(a, x):
    return [sum(F(a[i][j]) * x[j] for j in range(len(x))) for i in range(len(a))]


class TestSolve:
    def test_identity(self):
        assert solve_linear([[1, 0], [0, 1]], [F(3, 2), -1]) == [F(3, 2), -1]

    def test_inconsistent(self):
        assert solve_linear([[1, 1], [1, 1]], [1, 0]) is None

    def test_two_by_two(self):
        assert solve_linear([[2, 1], [1, 1]], [3, 2]) == [1, 1]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_linear([[1, 0], [0, 1]], [1, 2, 3])

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(
        st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n),
        st.lists(fracs, min_size=n, max_size=n))))
    def test_solution_checks_out(self, ab):
        a, b = ab
        x = solve_linear(a, b)
        if x is not None:
            assert matvec(a, x) == list(b)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(
        st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n),
        st.lists(fracs, min_size=n, max_size=n))))
    def test_consistent_systems_are_solved(self, ax):
        a, x0 = ax
        b = matvec(a, x0)
        x = solve_linear(a, b)
        assert x is not None and matvec(a, x) == b


class TestNullSpace:
    def test_identity(self):
        assert null_space_basis([[1, 0], [0, 1]]) == []

    def test_zero(self):
        basis = null_space_basis([[0, 0], [0, 0]])
        assert len(basis) == 2
        assert solve_linear([list(v) for v in zip(*basis)], [0, 0]) == [0, 0]

    def test_rank_one(self):
        (v,) = null_space_basis([[1, -1], [-1, 1]])
        assert v[0] == v[1] != 0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_vectors_in_kernel(self, a):
        for v in null_space_basis(a):
            assert any(v) and matvec(a, v) == [0] * len(a)


class TestTrichotomy:
    def test_half(self):
        assert rho_trichotomy_irreducible(RationalMatrix.from_rows([[F(1, 2)]])) is Trichotomy.LESS

    def test_permutation(self):
        assert rho_trichotomy_irreducible(RationalMatrix.from_rows([[0, 1], [1, 0]])) is Trichotomy.EQUAL

    def test_b_block(self):
        assert rho_trichotomy_irreducible(RationalMatrix.from_rows([[F(11, 10)]])) is Trichotomy.GREATER

    def test_running_mean_matrix(self, running):
        from bpmc.bp import mean_matrix

        assert rho_trichotomy(mean_matrix(running)) is Trichotomy.GREATER

    def test_zero(self):
        assert rho_trichotomy(RationalMatrix.from_rows([[0, 0], [0, 0]])) is Trichotomy.LESS

    def test_errors(self):
        with pytest.raises(NegativeEntry):
            rho_trichotomy(RationalMatrix.from_rows([[F(-1)]]))
        with pytest.raises(NotIrreducible):
            rho_trichotomy_irreducible(RationalMatrix.from_rows([[1, 1], [0, 1]]))
        with pytest.raises(NotIrreducible):
            rho_trichotomy_irreducible(RationalMatrix.from_rows([[0]]))

    def test_order(self):
        assert Trichotomy.LESS < Trichotomy.EQUAL < Trichotomy.GREATER
        assert str(Trichotomy.EQUAL) == "Equal"

    def test_reducible_takes_max_block(self):
        m = RationalMatrix.from_rows([[F(1, 2), 5], [0, F(1, 3)]])
        assert rho_trichotomy(m) is Trichotomy.LESS
        m = RationalMatrix.from_rows([[F(1, 2), 5], [0, 1]])
        assert rho_trichotomy(m) is Trichotomy.EQUAL

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(nonneg, min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_transpose_invariant(self, rows):
        m = RationalMatrix.from_rows(rows)
        assert rho_trichotomy(m) == rho_trichotomy(m.transpose())

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 5).flatmap(
            lambda n: st.lists(st.lists(nonneg, min_size=n, max_size=n), min_size=n, max_size=n)),
        st.fractions(min_value=F(1, 1), max_value=3, max_denominator=5),
    )
    def test_scaling_up_is_monotone(self, rows, c):
        assume(c > 1)
        m = RationalMatrix.from_rows(rows)
        assert rho_trichotomy(m.scale(c)) >= rho_trichotomy(m)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(nonneg, min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_agrees_with_float_oracle(self, rows):
        rho = eig_rho(rows)
        assume(abs(rho - 1) > 0.01)
        want = Trichotomy.GREATER if rho > 1 else Trichotomy.LESS
        assert rho_trichotomy(RationalMatrix.from_rows(rows)) is want

    def test_random_stochastic_irreducible_is_equal(self):
        rng = random.Random(5)
        for _ in range(30):
            n = rng.randint(1, 6)
            perm = list(range(n))
            rng.shuffle(perm)
            rows = []
            for i in range(n):
                w = [rng.randint(0, 3) for _ in range(n)]
                w[perm[(perm.index(i) + 1) % n]] += 1  # a Hamiltonian cycle keeps it irreducible
                rows.append([F(x, sum(w)) for x in w])
            assert rho_trichotomy_irreducible(RationalMatrix.from_rows(rows)) is Trichotomy.EQUAL

    def test_power_iteration_oracle_sane(self):
        assert abs(power_iteration_rho([[0, 2], [F(1, 2), 0]]) - 1) < 1e-9
        assert abs(power_iteration_rho([[F(11, 10)]]) - 1.1) < 1e-9
