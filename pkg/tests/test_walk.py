"""Random-walk sampling and exact convolution measures."""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import pytest

from mcgwalk import curve_graph, curves, walk
from mcgwalk.curve_graph import FiniteElementSet
from mcgwalk.curves import MappingClassWord, twist_word
from mcgwalk.errors import BudgetExceededError
from mcgwalk.surface import GeneratorSet, Surface, humphries_generators

S2 = Surface(2, 0)
GS = humphries_generators(S2)


def _sub_generators(count: int) -> GeneratorSet:
    sub = GS.generators[0:count]
    matrix = tuple(row[0:count] for row in GS.intersection_matrix[0:count])
    return GeneratorSet(S2, sub, matrix)


def test_make_step_distribution_defaults():
    mu = walk.make_step_distribution(GS)
    assert len(mu.support) == 10
    assert all(m == Fraction(1, 10) for m in mu.masses)
    assert sum(mu.masses) == 1
    # support pairs each generator with its inverse
    for g_word, inv_word in zip(mu.support[::2], mu.support[1::2]):
        assert (g_word * inv_word).letters == ()


def test_custom_weights_match_uniform_when_equal():
    mu_default = walk.make_step_distribution(GS)
    mu_weighted = walk.make_step_distribution(GS, weights=[Fraction(3)] * 5)
    assert mu_weighted.masses == mu_default.masses


def test_step_distribution_validation():
    with pytest.raises(ValueError):
        walk.make_step_distribution(GS, weights=[Fraction(1)] * 4)
    with pytest.raises(ValueError):
        walk.make_step_distribution(GS, weights=[Fraction(1)] * 4 + [Fraction(0)])
    with pytest.raises(ValueError):
        walk.StepDistribution((), ())
    w = MappingClassWord.make(2, ((1, 1),))
    with pytest.raises(ValueError):
        walk.StepDistribution((w, w), (Fraction(1, 2), Fraction(1, 3)))


def test_sample_path_is_deterministic_in_the_seed():
    mu = walk.make_step_distribution(GS)
    a = walk.sample_path(mu, 25, walk.sample_seed(7, 3))
    b = walk.sample_path(mu, 25, walk.sample_seed(7, 3))
    assert a.steps == b.steps
    c = walk.sample_path(mu, 25, walk.sample_seed(7, 4))
    assert a.steps != c.steps
    assert a.location(0).letters == ()
    assert a.location(25) is a.locations[-1]
    with pytest.raises(ValueError):
        walk.sample_path(mu, -1, "s")


def test_sampled_step_frequencies_match_the_law():
    mu = walk.make_step_distribution(_sub_generators(2))
    trials = 10_000
    counts: Counter = Counter()
    for i in range(trials):
        counts.update(walk.sample_path(mu, 1, walk.sample_seed(1, i)).steps)
    # each of the four atoms has mass 1/4; allow four sigmas
    expected = trials / 4
    sigma = (trials * 0.25 * 0.75) ** 0.5
    for index in range(4):
        assert abs(counts[index] - expected) < 4 * sigma


def test_one_twist_walk_two_step_measure():
    mu = walk.make_step_distribution(_sub_generators(1))
    m2 = walk.exact_convolution(mu, 2)
    assert m2.mass_of(MappingClassWord.make(2, ())) == Fraction(1, 2)
    assert m2.mass_of(twist_word(2, 1, 2)) == Fraction(1, 4)
    assert m2.mass_of(twist_word(2, 1, -2)) == Fraction(1, 4)
    assert len(m2) == 3


def test_convolution_total_mass_is_one():
    mu = walk.make_step_distribution(GS)
    for n in range(7):
        m = walk.exact_convolution(mu, n)
        assert sum(mass for (_k, mass) in m.masses) == 1


def _lattice_oracle(n: int) -> dict[tuple[int, int], Fraction]:
    """Independent oracle for the (T1, T3) walk: the twists commute, so
    the walk lives on the integer lattice of exponent pairs."""
    out: dict[tuple[int, int], Fraction] = {}
    moves = ((1, 0), (-1, 0), (0, 1), (0, -1))
    p = Fraction(1, 4) ** n
    for seq in itertools.product(moves, repeat=n):
        a = sum(m[0] for m in seq)
        b = sum(m[1] for m in seq)
        out[(a, b)] = out.get((a, b), Fraction(0)) + p
    return out


def test_convolution_matches_lattice_oracle_for_commuting_twists():
    sub = (GS.generators[0], GS.generators[2])
    gs = GeneratorSet(S2, sub, ((0, 0), (0, 0)))
    mu = walk.make_step_distribution(gs)
    for n in (1, 2, 3, 4):
        conv = walk.exact_convolution(mu, n)
        oracle = _lattice_oracle(n)
        assert len(conv) == len(oracle)
        for (a, b), mass in oracle.items():
            word = twist_word(2, 1, a) * twist_word(2, 3, b)
            assert conv.mass_of(word) == mass


def test_convolution_budget_guard():
    mu = walk.make_step_distribution(GS)
    with pytest.raises(BudgetExceededError) as err:
        walk.exact_convolution(mu, 10, budget=50)
    assert err.value.required > 50


def test_sup_mass_and_tie_breaking():
    mu = walk.make_step_distribution(_sub_generators(1))
    key, mass = walk.sup_mass(walk.exact_convolution(mu, 2))
    assert mass == Fraction(1, 2)
    assert key == curves.canonical_key(MappingClassWord.make(2, ()))
    # at n=1 both atoms have mass 1/2; the smaller canonical key wins
    m1 = walk.exact_convolution(mu, 1)
    key, mass = walk.sup_mass(m1)
    assert mass == Fraction(1, 2)
    assert key == m1.masses[0][0]


def test_separated_inequality_trivial_sets():
    mu = walk.make_step_distribution(_sub_generators(2))
    empty = FiniteElementSet.make([])
    report = walk.separated_inequality_check(mu, empty, 3, 1, 2)
    assert report.passed and report.lhs == 0
    single = FiniteElementSet.make([twist_word(2, 1, 2)])
    report = walk.separated_inequality_check(mu, single, 5, 1, 3)
    assert report.passed
    with pytest.raises(ValueError):
        walk.separated_inequality_check(mu, empty, 3, 2, 2)


def test_separated_inequality_rejects_unseparated_sets():
    mu = walk.make_step_distribution(_sub_generators(2))
    X = FiniteElementSet.make(
        [MappingClassWord.make(2, ()), twist_word(2, 1, 1)]
    )
    with pytest.raises(ValueError):
        walk.separated_inequality_check(mu, X, 3, 1, 2)


def test_separated_inequality_on_separated_sets():
    mu = walk.make_step_distribution(_sub_generators(2))
    m3 = walk.exact_convolution(mu, 3)
    for k in (3, 5):
        chosen: list[MappingClassWord] = []
        for rep in m3.representatives:
            if all(
                not curve_graph.ball_membership(a.inverse() * rep, k - 1)
                for a in chosen
            ):
                chosen.append(rep)
        X = FiniteElementSet.make(chosen)
        assert curve_graph.is_k_separated(X, k)
        report = walk.separated_inequality_check(mu, X, k, 1, 3)
        assert report.passed
        report = walk.separated_inequality_check(mu, X, k, 2, 3)
        assert report.passed


def test_even_k_radius_regression():
    """With radius floor(k/2) the inequality is false for even k: two
    points at distance exactly k both fit in one radius-k/2 ball.  The
    two-twist walk at k=2, m=1, n=3 witnesses this with a 2-separated
    set of mass 17/64 against a naive bound of 1/4.  The shipped radius
    floor((k-1)/2) keeps the check sound.
    """
    mu = walk.make_step_distribution(_sub_generators(2))
    m3 = walk.exact_convolution(mu, 3)
    reps = sorted(
        zip(m3.representatives, (mass for (_k, mass) in m3.masses)),
        key=lambda pair: (-pair[1], curves.canonical_key(pair[0])),
    )
    chosen: list[MappingClassWord] = []
    lhs = Fraction(0)
    for rep, mass in reps:
        if all(
            not curve_graph.ball_membership(a.inverse() * rep, 1) for a in chosen
        ):
            chosen.append(rep)
            lhs += mass
    X = FiniteElementSet.make(chosen)
    assert curve_graph.is_k_separated(X, 2)

    # naive right-hand side with radius floor(2/2) = 1: every atom of
    # mu^(1) lies in the radius-1 ball, so it is max-mass + zero tail
    m1 = walk.exact_convolution(mu, 1)
    ball = set(curve_graph.enumerate_ball(_sub_generators(2), 1))
    assert all(key in ball for (key, _mass) in m1.masses)
    naive_rhs = max(mass for (_k, mass) in m1.masses)
    assert naive_rhs == Fraction(1, 4)
    assert lhs >= Fraction(17, 64) > naive_rhs

    # the shipped check uses radius floor((k-1)/2) = 0 and stays sound
    report = walk.separated_inequality_check(mu, X, 2, 1, 3)
    assert report.passed
    assert report.lhs == lhs
