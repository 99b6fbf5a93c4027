"""Curve-graph distance bounds, word-metric balls, and set machinery.

Distances in the curve graph are reported as certified bound pairs:
exact values for distances 0 and 1, a lower bound of 2 whenever the
curves intersect, a lower bound of 3 for curated certified-filling
pairs, and the standard logarithmic upper bound 2 + 2*log2(i) for
intersecting curves (imported, not tight; tagged in the certificates).

Word-metric questions are decided exactly by ball enumeration over a
generator set, with group elements identified by their canonical keys
(battery action plus homology matrix).  Enumeration is guarded by an
explicit budget; there is no approximate fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from . import curves, homology
from .curves import CurveCoordinates, MappingClassWord
from .engine.system import get_system
from .errors import BudgetExceededError
from .surface import GeneratorSet, Surface, humphries_generators

DEFAULT_BALL_BUDGET = 500_000

LOG_BOUND_TAG = "log-upper-bound(imported)"


@dataclass(frozen=True)
class DistanceBounds:
    lower: int
    upper: int
    certificates: tuple[str, ...]

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError("need 0 <= lower <= upper")


def _log_upper(i: int) -> int:
    """ceil(2 + 2*log2(i)) for i >= 1."""
    return 2 + (i * i - 1).bit_length()


def distance_bounds(a: CurveCoordinates, b: CurveCoordinates) -> DistanceBounds:
    """Certified curve-graph distance bounds from intersection data."""
    if curves.is_same_curve(a, b):
        return DistanceBounds(0, 0, ("equal",))
    i = curves.intersection(a, b)
    if i == 0:
        return DistanceBounds(1, 1, ("disjoint",))
    tags = ["intersecting", LOG_BOUND_TAG]
    lower = 2
    key = frozenset(((a.vector, a.cover_type), (b.vector, b.cover_type)))
    if key in _filling_pair_keys(a.genus):
        lower = 3
        tags.insert(1, "certified-filling-pair")
    return DistanceBounds(lower, _log_upper(i), tuple(tags))


@lru_cache(maxsize=None)
def curated_filling_pairs(
    genus: int,
) -> tuple[tuple[CurveCoordinates, CurveCoordinates], ...]:
    """Curve pairs certified to fill the surface (currently none).

    A sound filling certificate for a pair needs a joint minimal-position
    analysis of the complement; the available one-sided tools cannot
    supply it.  Homology certificates are structurally useless here:
    any word in two twists acts trivially on the symplectic complement
    of the two curve classes, so its characteristic polynomial always
    carries a (x-1)^(2g-2) factor and is never irreducible.  The growth
    certificate is heuristic, and the classical pseudo-Anosov
    constructions all take filling as a hypothesis rather than
    certifying it.  Rather than issue unsound distance-3 lower bounds,
    the curated list stays empty and generic intersecting pairs get the
    certified lower bound 2.
    """
    return ()


@lru_cache(maxsize=None)
def _filling_pair_keys(genus: int) -> frozenset:
    return frozenset(
        frozenset(((a.vector, a.cover_type), (b.vector, b.cover_type)))
        for (a, b) in curated_filling_pairs(genus)
    )


def basepoint(genus: int) -> CurveCoordinates:
    """The curve-graph orbit basepoint x0 (the first chain curve)."""
    return curves.chain_curves(Surface(genus, 0))[0]


def rel_length_proxy(w: MappingClassWord) -> DistanceBounds:
    """d_C(x0, w(x0)) bounds, the computable relative-length proxy.

    True relative length differs from this by unknown quasi-isometry
    constants; the proxy is reported raw and never rescaled.
    """
    x0 = basepoint(w.genus)
    return distance_bounds(x0, curves.twist_action(w, x0))


@dataclass(frozen=True)
class FiniteElementSet:
    """Finite set of group elements with distinct canonical keys."""

    words: tuple[MappingClassWord, ...]
    keys: tuple[tuple, ...]

    @staticmethod
    def make(words: Iterable[MappingClassWord]) -> "FiniteElementSet":
        kept: list[MappingClassWord] = []
        keys: list[tuple] = []
        seen: set = set()
        for w in words:
            key = curves.canonical_key(w)
            if key not in seen:
                seen.add(key)
                kept.append(w)
                keys.append(key)
        return FiniteElementSet(tuple(kept), tuple(keys))

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: MappingClassWord) -> bool:
        return curves.canonical_key(w) in set(self.keys)


@dataclass(frozen=True)
class _BallState:
    images: tuple[tuple[int, ...], ...]
    matrix: homology.SymplecticMatrix
    word: tuple[tuple[int, int], ...]
    dist: int


def _signed_generator_words(gs: GeneratorSet) -> list[tuple[tuple[int, int], ...]]:
    out = []
    for g in gs.generators:
        inv = tuple((k, -s) for (k, s) in reversed(g.word))
        out.append(tuple(g.word))
        out.append(inv)
    return out


def _naive_ball_size(n_generators: int, k: int) -> int:
    a = 2 * n_generators
    return sum(a**j for j in range(k + 1))


@lru_cache(maxsize=64)
def enumerate_ball(
    gs: GeneratorSet, k: int, budget: int = DEFAULT_BALL_BUDGET
) -> dict[tuple, tuple[int, tuple[tuple[int, int], ...]]]:
    """Map from canonical key to (exact word-metric distance, witness word)
    for the radius-k ball around the identity.

    Runs breadth-first over canonical keys, so distances are exact word
    lengths over the generator set, not word lengths of chain letters.
    The result is cached per (gs, k, budget); callers must treat the
    returned mapping as read-only.
    """
    if k < 0:
        raise ValueError("radius must be nonnegative")
    naive = _naive_ball_size(len(gs.generators), k)
    if naive > budget:
        raise BudgetExceededError("ball enumeration over budget", required=naive)
    genus = gs.surface.genus
    system = get_system(genus)
    steps = _signed_generator_words(gs)
    matrices = [homology.chain_word_matrix(genus, w) for w in steps]
    start_images = tuple(system.edge_battery)
    ident = homology.SymplecticMatrix.identity(2 * genus)
    out: dict[tuple, tuple[int, tuple[tuple[int, int], ...]]] = {
        (start_images, ident.entries): (0, ())
    }
    frontier = [_BallState(start_images, ident, (), 0)]
    for dist in range(1, k + 1):
        next_frontier = []
        for state in frontier:
            for (letters, matrix) in zip(steps, matrices):
                images = tuple(system.apply_word(letters, v) for v in state.images)
                new_matrix = matrix * state.matrix
                key = (images, new_matrix.entries)
                if key in out:
                    continue
                word = letters + state.word
                out[key] = (dist, word)
                next_frontier.append(_BallState(images, new_matrix, word, dist))
        frontier = next_frontier
    return out


def ball_membership(
    w: MappingClassWord,
    k: int,
    gs: Optional[GeneratorSet] = None,
    budget: int = DEFAULT_BALL_BUDGET,
) -> bool:
    """True iff w equals some product of at most k signed generators."""
    if gs is None:
        gs = humphries_generators(Surface(w.genus, 0))
    ball = enumerate_ball(gs, k, budget=budget)
    return curves.canonical_key(w) in ball


def k_dense_subset(
    R: FiniteElementSet,
    k: int,
    gs: Optional[GeneratorSet] = None,
    budget: int = DEFAULT_BALL_BUDGET,
) -> FiniteElementSet:
    """The elements of R within word-metric distance k of another element.

    The difference r^{-1} r' is tested for ball membership against one
    shared radius-k key set, so the ball is enumerated once.
    """
    if len(R) <= 1:
        return FiniteElementSet.make(())
    genus = R.words[0].genus
    if gs is None:
        gs = humphries_generators(Surface(genus, 0))
    ball_keys = set(enumerate_ball(gs, k, budget=budget))
    dense_indices: set[int] = set()
    words = R.words
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            if i in dense_indices and j in dense_indices:
                continue
            diff = words[i].inverse() * words[j]
            if curves.canonical_key(diff) in ball_keys:
                dense_indices.add(i)
                dense_indices.add(j)
    return FiniteElementSet(
        tuple(words[i] for i in sorted(dense_indices)),
        tuple(R.keys[i] for i in sorted(dense_indices)),
    )


def is_k_separated(
    X: FiniteElementSet,
    k: int,
    gs: Optional[GeneratorSet] = None,
    budget: int = DEFAULT_BALL_BUDGET,
) -> bool:
    """True iff no two distinct elements are within word distance k - 1."""
    if k < 1:
        raise ValueError("separation constant must be positive")
    return len(k_dense_subset(X, k - 1, gs=gs, budget=budget)) == 0


def horoball_member(X: FiniteElementSet, L: int, y: MappingClassWord) -> bool:
    """Proxy horoball membership.

    Convention: both the distance from x to y and the length of x use
    the UPPER bound of the relative-length proxy, applied to x^{-1} y
    and to x respectively.
    """
    for x in X.words:
        dist = rel_length_proxy(x.inverse() * y).upper
        if dist <= rel_length_proxy(x).upper + L:
            return True
    return False
