"""Random-walk engine: step distributions, sample paths, exact convolutions.

All measures are exact rationals; floating point never enters a
probability.  Group elements are identified by canonical keys (battery
action plus homology matrix), so convolution masses are aggregated per
mapping class, not per word.  Sampling is counter-based: the random
stream for a sample is derived from a seed string alone, so batches
reproduce exactly regardless of execution order or worker count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from . import curve_graph, curves, homology
from .curve_graph import FiniteElementSet
from .curves import MappingClassWord
from .engine.system import get_system
from .errors import BudgetExceededError
from .surface import GeneratorSet

DEFAULT_CONVOLUTION_BUDGET = 500_000


@dataclass(frozen=True)
class StepDistribution:
    """Finitely supported exact probability distribution on words."""

    support: tuple[MappingClassWord, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("empty support")
        if len(self.support) != len(self.masses):
            raise ValueError("support/mass length mismatch")
        if any(m <= 0 for m in self.masses):
            raise ValueError("masses must be positive")
        if sum(self.masses) != 1:
            raise ValueError("masses must sum to one")

    @property
    def genus(self) -> int:
        return self.support[0].genus


def make_step_distribution(
    gs: GeneratorSet, weights: Optional[Sequence[Fraction]] = None
) -> StepDistribution:
    """Uniform (or custom-weighted) steps on the generators and inverses.

    A weight applies to a generator/inverse pair; the default gives
    every signed generator equal mass.
    """
    genus = gs.surface.genus
    support: list[MappingClassWord] = []
    for g in gs.generators:
        w = MappingClassWord.make(genus, g.word)
        support.append(w)
        support.append(w.inverse())
    if weights is None:
        weights = [Fraction(1)] * len(gs.generators)
    if len(weights) != len(gs.generators):
        raise ValueError("need one weight per generator")
    weights = [Fraction(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    total = 2 * sum(weights)
    masses = []
    for w in weights:
        masses.extend([w / total, w / total])
    return StepDistribution(tuple(support), tuple(masses))


@dataclass(frozen=True)
class WalkSample:
    """One seeded trajectory w_k = s_1 s_2 ... s_k."""

    genus: int
    seed: str
    steps: tuple[int, ...]  # indices into the distribution support
    locations: tuple[MappingClassWord, ...]  # w_1 .. w_n

    def location(self, n: int) -> MappingClassWord:
        """w_n, with w_0 the empty word."""
        if n == 0:
            return MappingClassWord.make(self.genus, ())
        return self.locations[n - 1]


def sample_seed(master_seed: int, index: int) -> str:
    """The substream seed string for one sample index."""
    return f"{master_seed}/{index}"


def sample_path(mu: StepDistribution, n: int, seed) -> WalkSample:
    """Deterministic length-n trajectory of the mu-walk.

    Steps are drawn by exact integer inversion sampling: a uniform
    integer below the common mass denominator selects the atom, so the
    sampled law matches mu exactly, not merely to float precision.
    """
    if n < 0:
        raise ValueError("length must be nonnegative")
    rng = random.Random(str(seed))
    denominator = lcm(*(m.denominator for m in mu.masses))
    cutoffs = []
    acc = 0
    for m in mu.masses:
        acc += int(m * denominator)
        cutoffs.append(acc)
    assert acc == denominator
    genus = mu.genus
    steps = []
    locations = []
    current = MappingClassWord.make(genus, ())
    for _k in range(n):
        r = rng.randrange(denominator)
        index = next(i for i, c in enumerate(cutoffs) if r < c)
        steps.append(index)
        current = current * mu.support[index]
        locations.append(current)
    return WalkSample(genus, str(seed), tuple(steps), tuple(locations))


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Exact measure on canonicalized group elements."""

    masses: tuple[tuple[tuple, Fraction], ...]  # sorted by canonical key
    representatives: tuple[MappingClassWord, ...]

    def __post_init__(self):
        if sum(m for (_k, m) in self.masses) != 1:
            raise ValueError("total mass must be one")

    def as_dict(self) -> dict:
        return dict(self.masses)

    def mass_of(self, w: MappingClassWord) -> Fraction:
        return self.as_dict().get(curves.canonical_key(w), Fraction(0))

    def mass_of_key(self, key: tuple) -> Fraction:
        return self.as_dict().get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self.masses)


@dataclass(frozen=True)
class _ConvState:
    images: tuple[tuple[int, ...], ...]
    matrix: homology.SymplecticMatrix
    word: MappingClassWord
    mass: Fraction


def exact_convolution(
    mu: StepDistribution, n: int, budget: int = DEFAULT_CONVOLUTION_BUDGET
) -> EmpiricalMeasure:
    """The n-fold convolution mu^(n) with exact rational masses.

    Built by left extension mu^(n) = mu * mu^(n-1): the battery images
    and homology matrix of s*g follow from those of g by one generator
    application, so each element extends in constant work regardless of
    word length.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    genus = mu.genus
    system = get_system(genus)
    step_words = [tuple(w.letters) for w in mu.support]
    step_matrices = [homology.chain_word_matrix(genus, w) for w in step_words]
    ident = homology.SymplecticMatrix.identity(2 * genus)
    start = _ConvState(
        tuple(system.edge_battery), ident, MappingClassWord.make(genus, ()), Fraction(1)
    )
    states: dict[tuple, _ConvState] = {(start.images, ident.entries): start}
    for _level in range(n):
        next_states: dict[tuple, _ConvState] = {}
        required = len(states) * len(mu.support)
        if required > budget:
            raise BudgetExceededError("convolution over budget", required=required)
        for state in states.values():
            for (letters, matrix, s_word, s_mass) in zip(
                step_words, step_matrices, mu.support, mu.masses
            ):
                images = tuple(system.apply_word(letters, v) for v in state.images)
                new_matrix = matrix * state.matrix
                key = (images, new_matrix.entries)
                mass = s_mass * state.mass
                seen = next_states.get(key)
                if seen is None:
                    next_states[key] = _ConvState(
                        images, new_matrix, s_word * state.word, mass
                    )
                else:
                    next_states[key] = _ConvState(
                        seen.images, seen.matrix, seen.word, seen.mass + mass
                    )
        states = next_states
    items = sorted(states.items(), key=lambda kv: kv[0])
    return EmpiricalMeasure(
        masses=tuple((key, st.mass) for (key, st) in items),
        representatives=tuple(st.word for (_key, st) in items),
    )


def sup_mass(m: EmpiricalMeasure) -> tuple[tuple, Fraction]:
    """The maximal atom; ties broken by canonical key order."""
    if not m.masses:
        raise ValueError("empty measure")
    best_key, best_mass = m.masses[0]
    for (key, mass) in m.masses[1:]:
        if mass > best_mass:
            best_key, best_mass = key, mass
    return best_key, best_mass


@dataclass(frozen=True)
class SeparatedInequalityReport:
    k: int
    m: int
    n: int
    lhs: Fraction
    max_ball_mass: Fraction
    tail_mass: Fraction
    rhs: Fraction
    passed: bool


def separated_inequality_check(
    mu: StepDistribution,
    X: FiniteElementSet,
    k: int,
    m: int,
    n: int,
    gs: Optional[GeneratorSet] = None,
    budget: int = DEFAULT_CONVOLUTION_BUDGET,
) -> SeparatedInequalityReport:
    """Exact check of the separated-set mass inequality.

    For X k-separated (pairwise word distance >= k over gs, defaulting
    to the chain generators): mu^(n)(X) <= max of mu^(m) over the
    radius-floor((k-1)/2) ball plus the mu^(m) mass outside that ball.

    The radius must satisfy 2r < k so that a ball holds at most one
    point of any translate of X; floor(k/2) works for odd k but fails
    for even k, where two points at distance exactly k both fit in the
    radius-k/2 ball (witness: the two-twist walk at k=2, m=1, n=3 has a
    2-separated X with mu^(3)(X) = 17/64 > 1/4).  floor((k-1)/2) agrees
    with floor(k/2) for odd k and is the largest valid radius overall.
    """
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    if gs is None:
        from .surface import Surface, humphries_generators

        gs = humphries_generators(Surface(mu.genus, 0))
    if len(X) and not curve_graph.is_k_separated(X, k, gs=gs):
        raise ValueError("X is not k-separated")
    mu_n = exact_convolution(mu, n, budget=budget)
    mu_m = exact_convolution(mu, m, budget=budget)
    lhs = sum((mu_n.mass_of_key(key) for key in X.keys), Fraction(0))
    ball_keys = set(curve_graph.enumerate_ball(gs, (k - 1) // 2))
    ball_mass = Fraction(0)
    max_ball = Fraction(0)
    for (key, mass) in mu_m.masses:
        if key in ball_keys:
            ball_mass += mass
            if mass > max_ball:
                max_ball = mass
    tail = 1 - ball_mass
    rhs = max_ball + tail
    return SeparatedInequalityReport(
        k=k, m=m, n=n, lhs=lhs, max_ball_mass=max_ball, tail_mass=tail,
        rhs=rhs, passed=lhs <= rhs,
    )
