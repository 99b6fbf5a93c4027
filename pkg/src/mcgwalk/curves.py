"""Exact curves, twist actions, intersections, and the identity test.

Curves are stored by the normal coordinates of their image in the
quotient sphere of the hyperelliptic double cover (the branched double
cover presentation of the closed surface; the chain twists cover half
twists of branch punctures).  Two kinds of curve occur:

* "pair" curves — nonseparating curves invariant under the covering
  involution; their quotient is an arc between two branch punctures and
  we store the boundary curve of the arc's neighbourhood.  Intersection
  numbers upstairs are half the downstairs ones, and intersections with
  chain curves are single coordinate lookups.
* "double" curves — symmetric separating curves; these cover their
  quotient curve two-to-one, so intersections with pair curves equal
  the downstairs count against the quotient curve.

A word acts trivially on every pair curve of the reference
triangulation's edges iff it is trivial downstairs, i.e. iff the
mapping class upstairs is the identity or the covering involution;
the homology matrix (-identity for the involution) settles which.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .engine.system import TwistSystem, get_system
from .errors import (
    IntersectionUnsupportedError,
    UnknownCurveError,
    UnsupportedSurfaceError,
)
from .surface import CurveId, Surface

Letter = tuple[int, int]

COORDINATE_SYSTEM_VERSION = "sphere-normal-1"


@dataclass(frozen=True)
class MappingClassWord:
    """A freely reduced word in the signed chain twists."""

    genus: int
    letters: tuple[Letter, ...]

    @staticmethod
    def make(genus: int, letters: Sequence[Letter]) -> "MappingClassWord":
        if genus < 2:
            raise UnsupportedSurfaceError("words require a closed surface of genus >= 2")
        limit = 2 * genus + 1
        reduced: list[Letter] = []
        for (k, sign) in letters:
            if not 1 <= k <= limit or sign not in (1, -1):
                raise ValueError(f"bad letter {(k, sign)}")
            if reduced and reduced[-1][0] == k and reduced[-1][1] == -sign:
                reduced.pop()
            else:
                reduced.append((k, sign))
        return MappingClassWord(genus, tuple(reduced))

    @property
    def length(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "MappingClassWord") -> "MappingClassWord":
        if other.genus != self.genus:
            raise ValueError("genus mismatch")
        return MappingClassWord.make(self.genus, self.letters + other.letters)

    def inverse(self) -> "MappingClassWord":
        return MappingClassWord(
            self.genus, tuple((k, -s) for (k, s) in reversed(self.letters))
        )


def empty_word(genus: int) -> MappingClassWord:
    return MappingClassWord.make(genus, ())


def twist_word(genus: int, index: int, power: int = 1) -> MappingClassWord:
    sign = 1 if power > 0 else -1
    return MappingClassWord.make(genus, ((index, sign),) * abs(power))


@dataclass(frozen=True)
class CurveCoordinates:
    """An isotopy class of essential curve/multicurve in canonical form."""

    genus: int
    vector: tuple[int, ...]
    component_count: int = 1
    cover_type: str = "pair"  # "pair" | "double"
    transport: Optional[tuple[tuple[Letter, ...], int]] = None  # (word, chain index)

    def __post_init__(self):
        system = get_system(self.genus)
        if len(self.vector) != system.n_edges or not system.base.is_admissible(
            list(self.vector)
        ):
            raise ValueError("inadmissible coordinate vector")

    @property
    def transportable(self) -> bool:
        return self.transport is not None


def _system(genus: int) -> TwistSystem:
    return get_system(genus)


def _require_closed(s: Surface) -> None:
    if not s.full_support:
        raise UnsupportedSurfaceError(f"need a closed surface of genus >= 2, got {s}")


def chain_curves(s: Surface) -> list[CurveCoordinates]:
    """The chain curves c_1 .. c_{2g+1} with golden coordinate vectors."""
    _require_closed(s)
    system = _system(s.genus)
    return [
        CurveCoordinates(
            genus=s.genus,
            vector=system.chain_vectors[k - 1],
            transport=((), k),
        )
        for k in range(1, 2 * s.genus + 2)
    ]


def _separating_vector(genus: int, j: int) -> tuple[int, ...]:
    """Quotient coordinates of s_j: the curve around branch punctures j-1..j+1."""
    system = _system(genus)
    base = system.base
    enclosed = {j - 1, j, j + 1}
    vec = [0] * base.n_edges
    for d in range(2 * base.n_edges):
        if base.start[d] in enclosed:
            e = d >> 1
            u, v = base.endpoints(e)
            if not (u in enclosed and v in enclosed):
                vec[e] += 1
    assert base.is_admissible(vec)
    return tuple(vec)


def separating_curve(s: Surface, j: int) -> CurveCoordinates:
    """The curated separating curve s_j = boundary of N(c_j ∪ c_{j+1})."""
    _require_closed(s)
    if not 1 <= j <= 2 * s.genus:
        raise UnknownCurveError(f"s_{j} out of range for genus {s.genus}")
    return CurveCoordinates(
        genus=s.genus,
        vector=_separating_vector(s.genus, j),
        cover_type="double",
    )


def curve_for_id(s: Surface, cid: CurveId) -> CurveCoordinates:
    if cid.family == "chain":
        return chain_curves(s)[cid.index - 1]
    if cid.family == "separating":
        return separating_curve(s, cid.index)
    raise UnknownCurveError(f"unknown curve family {cid.family!r}")


def battery_curves(s: Surface) -> list[CurveCoordinates]:
    """The identity-test battery: pair curves of every reference edge.

    Fixing the boundary curve of each edge's neighbourhood fixes the
    edge itself, and a mapping class fixing every edge of an ideal
    triangulation of the quotient sphere is trivial there; the battery
    therefore fills and pins the class up to the covering involution.
    """
    _require_closed(s)
    system = _system(s.genus)
    n_chain = 2 * s.genus + 1
    out = []
    for e, vec in enumerate(system.edge_battery):
        transport = ((), e + 1) if e < n_chain else None
        out.append(CurveCoordinates(genus=s.genus, vector=vec, transport=transport))
    return out


def reference_curves(s: Surface) -> list[CurveCoordinates]:
    """Chain curves followed by the rest of the filling battery."""
    return battery_curves(s)


def twist_action(w: MappingClassWord, c: CurveCoordinates) -> CurveCoordinates:
    """Coordinates of w(c), exact, convention ab(x) = a(b(x))."""
    if w.genus != c.genus:
        raise ValueError("genus mismatch")
    system = _system(c.genus)
    vector = system.apply_word(w.letters, c.vector)
    transport = None
    if c.transport is not None:
        (letters, k) = c.transport
        transport = (
            MappingClassWord.make(w.genus, tuple(w.letters) + tuple(letters)).letters,
            k,
        )
    return replace(c, vector=vector, transport=transport)


def _reference_intersection(
    system: TwistSystem, k: int, other_vector: tuple[int, ...], other_type: str
) -> int:
    """i(c_k, other) upstairs from downstairs coordinates."""
    w = other_vector[k - 1]
    # pair curves meet c_k in half the downstairs number (= the edge
    # coordinate); double curves meet it in the full downstairs number.
    return w if other_type == "pair" else 2 * w

def _transport_cost(c: CurveCoordinates) -> int:
    return len(c.transport[0]) if c.transport is not None else -1


def intersection(a: CurveCoordinates, b: CurveCoordinates) -> int:
    """Exact geometric intersection number via transport to a reference."""
    if a.genus != b.genus:
        raise ValueError("genus mismatch")
    if a.vector == b.vector and a.cover_type == b.cover_type:
        return 0
    system = _system(a.genus)
    candidates = [c for c in (a, b) if c.transport is not None and c.cover_type == "pair"]
    if not candidates:
        return _untransportable_intersection(a, b)
    src = min(candidates, key=_transport_cost)
    other = b if src is a else a
    (letters, k) = src.transport
    inv = tuple((i, -s) for (i, s) in reversed(letters))
    moved = system.apply_word(inv, other.vector)
    return _reference_intersection(system, k, moved, other.cover_type)


def _untransportable_intersection(a: CurveCoordinates, b: CurveCoordinates) -> int:
    """Curated fallback: the separating reference curves' pairwise table.

    The quotient of s_j is the curve around the branch-puncture triple
    {j-1, j, j+1}.  Two such triples sharing at least one puncture give
    linked curves meeting twice downstairs, hence four times upstairs;
    disjoint triples give disjoint curves.  (Coincidences such as the
    genus-2 waist, where a triple equals the complement of another, are
    caught earlier by coordinate equality.)
    """
    genus = a.genus
    if a.cover_type == b.cover_type == "double":
        tags = []
        for c in (a, b):
            for j in range(1, 2 * genus + 1):
                if c.vector == _separating_vector(genus, j):
                    tags.append(j)
                    break
        if len(tags) == 2:
            i, j = tags
            return 4 if abs(i - j) <= 2 else 0
    raise IntersectionUnsupportedError(
        "neither operand is transportable to a reference curve"
    )


def is_same_curve(a: CurveCoordinates, b: CurveCoordinates) -> bool:
    if a.genus != b.genus:
        raise ValueError("genus mismatch")
    return a.vector == b.vector and a.cover_type == b.cover_type


def disjoint_union(parts: Sequence[CurveCoordinates]) -> CurveCoordinates:
    """Formal multicurve from pairwise disjoint components."""
    if not parts:
        raise ValueError("empty multicurve")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if intersection(parts[i], parts[j]) != 0:
                raise ValueError("components are not disjoint")
    genus = parts[0].genus
    vec = tuple(sum(c.vector[e] for c in parts) for e in range(len(parts[0].vector)))
    return CurveCoordinates(
        genus=genus,
        vector=vec,
        component_count=sum(c.component_count for c in parts),
        cover_type="pair" if all(c.cover_type == "pair" for c in parts) else "double",
    )


def alexander_identity_test(w: MappingClassWord) -> bool:
    """True iff w is the identity mapping class.

    The word fixes the whole edge battery iff it is the identity or the
    covering involution; the homology matrix distinguishes the two (the
    involution acts as -identity).
    """
    system = _system(w.genus)
    if not system.fixes_battery(w.letters):
        return False
    from . import homology

    return homology.chain_word_matrix(w.genus, w.letters).is_identity()


def canonical_key(w: MappingClassWord) -> tuple:
    """Canonical group-element key: battery images plus homology matrix."""
    system = _system(w.genus)
    from . import homology

    return (
        system.battery_fingerprint(w.letters),
        homology.chain_word_matrix(w.genus, w.letters).entries,
    )
