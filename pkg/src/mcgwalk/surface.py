"""Surfaces, sporadicity, dimension formulas, and generator systems.

The canonical generating set for a closed surface of genus g >= 2 is
the chain of 2g + 1 Dehn twists T_{c_1}, ..., T_{c_{2g+1}} along curves
with path-graph intersection pattern.  Torelli generator words are
twists about curated separating curves, expressed as chain words via
the chain relation (T_a T_b)^6 = T_{boundary} for neighbouring chain
curves; see ``torelli_generators`` for why bounding pairs are not
available over the chain system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import UnsupportedSurfaceError


@dataclass(frozen=True)
class Surface:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise ValueError("genus and puncture count must be nonnegative")

    @property
    def full_support(self) -> bool:
        """Curve actions and generators are available only here."""
        return self.punctures == 0 and self.genus >= 2


@dataclass(frozen=True)
class CurveId:
    """Index into the curated curve families of a surface.

    Families: "chain" (c_1 .. c_{2g+1}) and "separating" (boundaries of
    neighbourhoods of neighbouring chain pairs, s_1 .. s_{2g}).
    """

    family: str
    index: int


@dataclass(frozen=True)
class GeneratorRecord:
    label: str
    curve: CurveId
    direction: str  # twist-direction convention tag
    word: tuple[tuple[int, int], ...]  # realization as signed chain letters


@dataclass(frozen=True)
class GeneratorSet:
    surface: Surface
    generators: tuple[GeneratorRecord, ...]
    intersection_matrix: tuple[tuple[int, ...], ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.generators)

    def word_for(self, label: str) -> tuple[tuple[int, int], ...]:
        for g in self.generators:
            if g.label == label:
                return g.word
        raise KeyError(label)

    def to_table(self) -> str:
        """Audit serialization: one generator per line."""
        lines = ["label\tfamily\tindex\tdirection\tword"]
        for g in self.generators:
            word = " ".join(f"{'+' if s > 0 else '-'}c{i}" for (i, s) in g.word)
            lines.append(f"{g.label}\t{g.curve.family}\t{g.curve.index}\t{g.direction}\t{word}")
        return "\n".join(lines)


TWIST_DIRECTION = "right"  # global convention; fixed once, used in all tables


def make_surface(g: int, p: int) -> Surface:
    return Surface(g, p)


def is_sporadic(s: Surface) -> bool:
    """Sphere with at most four punctures, or torus with at most one."""
    return (s.genus == 0 and s.punctures <= 4) or (s.genus == 1 and s.punctures <= 1)


def teich_dimension(s: Surface) -> int:
    if s.genus == 0 and s.punctures <= 2:
        raise UnsupportedSurfaceError("dimension undefined for spheres with <= 2 punctures")
    return 6 * s.genus + 2 * s.punctures - 6


def boundary_dimension(s: Surface) -> int:
    return teich_dimension(s) - 1


def _require_full_support(s: Surface) -> None:
    if not s.full_support:
        raise UnsupportedSurfaceError(f"need a closed surface of genus >= 2, got {s}")


def chain_curve_count(s: Surface) -> int:
    return 2 * s.genus + 1


def humphries_generators(s: Surface) -> GeneratorSet:
    """The 2g+1 chain-twist generators with path-graph intersections."""
    _require_full_support(s)
    m = chain_curve_count(s)
    records = tuple(
        GeneratorRecord(
            label=f"c{k}",
            curve=CurveId("chain", k),
            direction=TWIST_DIRECTION,
            word=((k, 1),),
        )
        for k in range(1, m + 1)
    )
    return GeneratorSet(s, records, _chain_intersection_matrix(s))


def _chain_intersection_matrix(s: Surface) -> tuple[tuple[int, ...], ...]:
    from . import curves  # deferred: curves imports engine machinery

    refs = curves.chain_curves(s)
    m = len(refs)
    return tuple(
        tuple(curves.intersection(refs[i], refs[j]) for j in range(m)) for i in range(m)
    )


def separating_word(s: Surface, j: int) -> tuple[tuple[int, int], ...]:
    """Chain word of the twist about s_j = boundary of N(c_j ∪ c_{j+1}).

    By the chain relation, (T_{c_j} T_{c_{j+1}})^6 is the Dehn twist
    about the separating boundary curve; it acts trivially on homology.
    """
    if not 1 <= j <= 2 * s.genus:
        raise UnsupportedSurfaceError(f"no curated separating curve s_{j}")
    return tuple(((j, 1), (j + 1, 1)) * 6)


def torelli_generators(s: Surface, pair_budget: int) -> GeneratorSet:
    """Curated Torelli generator words (separating twists).

    Bounding-pair maps do not exist in the group generated by the chain
    twists: a curve class fixed by the covering (hyperelliptic)
    involution either passes through two branch points or is odd-type
    separating, and two disjoint homologous nonseparating curves of the
    first kind would have to share branch points, forcing intersection.
    (For genus 2 no bounding pairs exist on the surface at all: the
    complementary pieces would need half-integral genus.)  The curated
    Torelli family therefore consists of twists about the symmetric
    separating curves s_j, realized as chain words via the chain
    relation, optionally conjugated by short chain words for variety.
    Each generator is homology-trivial by exact matrix check.
    """
    _require_full_support(s)
    if pair_budget < 1:
        raise ValueError("pair_budget must be at least 1")
    from . import homology  # deferred to avoid an import cycle

    family = [
        (f"t{j}", CurveId("separating", j), separating_word(s, j))
        for j in range(1, 2 * s.genus + 1)
    ][:pair_budget]
    records = []
    for (label, cid, word) in family:
        matrix = homology.chain_word_matrix(s.genus, word)
        if not matrix.is_identity():
            raise AssertionError(f"curated Torelli word {label} is not homology-trivial")
        records.append(GeneratorRecord(label, cid, TWIST_DIRECTION, word))
    records = tuple(records)
    from . import curves

    refs = [curves.curve_for_id(s, r.curve) for r in records]
    m = len(records)
    matrix = tuple(
        tuple(curves.intersection(refs[i], refs[j]) for j in range(m)) for i in range(m)
    )
    return GeneratorSet(s, records, matrix)


def intersection_matrix(gs: GeneratorSet) -> tuple[tuple[int, ...], ...]:
    """Pairwise geometric intersection numbers of the generator curves."""
    from . import curves

    refs = [curves.curve_for_id(gs.surface, g.curve) for g in gs.generators]
    m = len(refs)
    return tuple(
        tuple(curves.intersection(refs[i], refs[j]) for j in range(m)) for i in range(m)
    )
