"""Thurston-trichotomy classifier with exact one-sided certificates.

Certificate sources never conflict: a verified periodic or reducible
witness is exact, the homology certificate is sound for pseudo-Anosov,
and the growth certificate demands that the invariant-multicurve search
come up empty at the same budget.  The classifier therefore runs the
cheap exact screens first and returns the first certificate found;
``Unknown`` is an honest first-class outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import curves, homology
from .curves import CurveCoordinates, MappingClassWord
from .engine.system import get_system
from .errors import IntersectionUnsupportedError
from .surface import GeneratorSet, Surface, humphries_generators


@dataclass(frozen=True)
class Periodic:
    order: int


@dataclass(frozen=True)
class Reducible:
    invariant_multicurve: tuple[CurveCoordinates, ...]


@dataclass(frozen=True)
class PseudoAnosov:
    source: str  # "homology" | "growth" | "penner_form"
    dilatation_estimate: Optional[Fraction] = None


@dataclass(frozen=True)
class Unknown:
    reason: str = "no certificate within budgets"


Verdict = Periodic | Reducible | PseudoAnosov | Unknown


@dataclass(frozen=True)
class Budgets:
    max_order: Optional[int] = None  # default 4g + 2
    search_bound: int = 1
    iterations: int = 14
    threshold: Fraction = Fraction(1, 20)
    stabilization: Fraction = Fraction(1, 100)

    def order_bound(self, genus: int) -> int:
        return self.max_order if self.max_order is not None else 4 * genus + 2


@dataclass(frozen=True)
class GrowthReport:
    curve: CurveCoordinates
    iterations: int
    sequence: tuple[int, ...]
    ratios: tuple[Fraction, ...]
    stabilized_ratio: Optional[Fraction]
    verdict: bool


def periodic_order(w: MappingClassWord, max_order: Optional[int] = None) -> Optional[int]:
    """Least n <= max_order with w^n the identity, else None.

    The homology matrix prescreens candidate orders (w^n = 1 forces
    M^n = I), so the exact battery test runs only at plausible n.
    """
    genus = w.genus
    bound = max_order if max_order is not None else 4 * genus + 2
    matrix = homology.chain_word_matrix(genus, w.letters)
    ident = homology.SymplecticMatrix.identity(2 * genus)
    candidates = [n for n in range(1, bound + 1) if matrix.power(n) == ident]
    if not candidates:
        return None
    system = get_system(genus)
    probe = system.chain_vectors[0]
    images = {0: probe}
    cur = probe
    for n in range(1, bound + 1):
        cur = system.apply_word(w.letters, cur)
        images[n] = cur
    for n in candidates:
        if images[n] != probe:
            continue
        power = MappingClassWord.make(genus, tuple(w.letters) * n)
        if curves.alexander_identity_test(power):
            return n
    return None


def _candidate_curves(genus: int, search_bound: int, cap: int = 128) -> list[CurveCoordinates]:
    """Curated curves plus images under short words, deterministically."""
    s = Surface(genus, 0)
    base = curves.chain_curves(s)
    out = list(base)
    seen = {c.vector for c in base}
    if search_bound >= 1:
        m = 2 * genus + 1
        frontier = [((), c) for c in base]
        for _depth in range(search_bound):
            next_frontier = []
            for (letters, c) in frontier:
                for k in range(1, m + 1):
                    for sign in (1, -1):
                        img = curves.twist_action(
                            MappingClassWord.make(genus, ((k, sign),)), c
                        )
                        if img.vector not in seen:
                            seen.add(img.vector)
                            out.append(img)
                            next_frontier.append((img.transport[0], img))
                        if len(out) >= cap:
                            return out
            frontier = next_frontier
    return out


def find_invariant_multicurve(
    w: MappingClassWord, search_bound: int
) -> Optional[tuple[CurveCoordinates, ...]]:
    """A set-wise invariant multicurve from curated candidates, or None.

    For each candidate the w-orbit is followed; if it closes within the
    bound and the orbit curves are pairwise disjoint, the orbit is a
    verified set-wise invariant multicurve.  None is not a proof of
    irreducibility.
    """
    if search_bound < 1:
        raise ValueError("search_bound must be at least 1")
    genus = w.genus
    orbit_cap = max(4, 2 * search_bound)
    size_cap = 64 * max(
        sum(c.vector) for c in curves.chain_curves(Surface(genus, 0))
    )
    for cand in _candidate_curves(genus, search_bound):
        orbit = [cand]
        vectors = {cand.vector: 0}
        cur = cand
        closed = False
        for _step in range(orbit_cap):
            cur = curves.twist_action(w, cur)
            if cur.vector in vectors:
                closed = vectors[cur.vector] == 0
                break
            if sum(cur.vector) > size_cap:
                break
            vectors[cur.vector] = len(orbit)
            orbit.append(cur)
        if not closed:
            continue
        ok = True
        for i in range(len(orbit)):
            for j in range(i + 1, len(orbit)):
                if curves.intersection(orbit[i], orbit[j]) != 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return tuple(orbit)
    return None


def penner_form(w: MappingClassWord) -> bool:
    """Positive twists on the odd chain curves, negative on the even ones.

    The odd and even chain families jointly fill the surface, so such
    words are pseudo-Anosov by the standard two-family construction
    provided every curve appears.
    """
    if not w.letters:
        return False
    needed = set(range(1, 2 * w.genus + 2))
    for (k, sign) in w.letters:
        expected = 1 if k % 2 == 1 else -1
        if sign != expected:
            return False
        needed.discard(k)
    return not needed


def growth_certificate(
    w: MappingClassWord,
    c: CurveCoordinates,
    iterations: int = 14,
    threshold: Fraction = Fraction(1, 20),
    stabilization: Fraction = Fraction(1, 100),
    search_bound: int = 1,
) -> GrowthReport:
    """Exact intersection-growth report for i(w^n(c), c)."""
    if iterations < 4:
        raise ValueError("need at least four iterations")
    if not c.transportable:
        raise IntersectionUnsupportedError("growth curve must be transportable")
    seq = []
    cur = c
    for _n in range(iterations):
        cur = curves.twist_action(w, cur)
        seq.append(curves.intersection(cur, c))
    ratios = tuple(
        Fraction(seq[i + 1], seq[i]) for i in range(len(seq) - 1) if seq[i] != 0
    )
    stabilized: Optional[Fraction] = None
    verdict = False
    if len(ratios) >= 3 and 0 not in seq:
        last = ratios[-3:]
        lo, hi = min(last), max(last)
        if lo > 0 and (hi - lo) / hi <= stabilization and last[-1] > 1 + threshold:
            stabilized = last[-1]
            if find_invariant_multicurve(w, search_bound) is None:
                verdict = True
    return GrowthReport(
        curve=c,
        iterations=iterations,
        sequence=tuple(seq),
        ratios=ratios,
        stabilized_ratio=stabilized,
        verdict=verdict,
    )


def classify(w: MappingClassWord, budgets: Budgets = Budgets()) -> Verdict:
    """First certificate among periodic, homology-pA, Penner-form,
    reducible, and growth-pA; else Unknown.

    Sound certificates are mutually exclusive, so the check order is a
    cost choice, not a semantic one: the cheap exact screens (periodic
    prescreen, characteristic polynomial, Penner form) run before the
    invariant-multicurve search, which applies the word to every
    candidate curve.
    """
    genus = w.genus
    order = periodic_order(w, budgets.order_bound(genus))
    if order is not None:
        return Periodic(order)
    gs = humphries_generators(Surface(genus, 0))
    cert = homology.casson_bleiler_certificate(w, gs)
    if cert.certified:
        return PseudoAnosov("homology")
    if penner_form(w):
        return PseudoAnosov("penner_form")
    multicurve = find_invariant_multicurve(w, budgets.search_bound)
    if multicurve is not None:
        return Reducible(multicurve)
    basepoint = curves.chain_curves(Surface(genus, 0))[0]
    report = growth_certificate(
        w,
        basepoint,
        iterations=budgets.iterations,
        threshold=budgets.threshold,
        stabilization=budgets.stabilization,
        search_bound=budgets.search_bound,
    )
    if report.verdict:
        return PseudoAnosov("growth", dilatation_estimate=report.stabilized_ratio)
    return Unknown()
