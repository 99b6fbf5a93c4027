"""Exact homology actions and the characteristic-polynomial certificate.

Dehn twists act on H_1 of the surface by symplectic transvections
x -> x + <x,[c]>[c].  A word whose characteristic polynomial is
irreducible, not cyclotomic, and not a polynomial in t^k for k >= 2 is
pseudo-Anosov (a one-sided certificate; the converse fails, e.g. on the
Torelli group, where the matrix is the identity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import UnknownCurveError
from .surface import CurveId, GeneratorSet, Surface


@dataclass(frozen=True)
class SymplecticMatrix:
    """Exact integer matrix acting on (a_1, b_1, ..., a_g, b_g)."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @staticmethod
    def identity(dim: int) -> "SymplecticMatrix":
        return SymplecticMatrix(
            tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
        )

    def is_identity(self) -> bool:
        return self == SymplecticMatrix.identity(self.dimension)

    def __mul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        a, b = self.entries, other.entries
        dim = len(a)
        bt = tuple(zip(*b))
        return SymplecticMatrix(
            tuple(
                tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
            )
        )

    def __neg__(self) -> "SymplecticMatrix":
        return SymplecticMatrix(tuple(tuple(-x for x in row) for row in self.entries))

    def power(self, k: int) -> "SymplecticMatrix":
        if k < 0:
            raise ValueError("negative powers not needed; invert the word instead")
        out = SymplecticMatrix.identity(self.dimension)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * v for r, v in zip(row, vec)) for row in self.entries)


def symplectic_form(g: int) -> SymplecticMatrix:
    """Block-diagonal J with blocks [[0, 1], [-1, 0]] per handle."""
    dim = 2 * g
    rows = []
    for i in range(dim):
        row = [0] * dim
        if i % 2 == 0:
            row[i + 1] = 1
        else:
            row[i - 1] = -1
        rows.append(tuple(row))
    return SymplecticMatrix(tuple(rows))


def is_symplectic(m: SymplecticMatrix) -> bool:
    g = m.dimension // 2
    j = symplectic_form(g)
    mt = SymplecticMatrix(tuple(zip(*m.entries)))
    return mt * j * m == j


def pairing(g: int, x: Sequence[int], y: Sequence[int]) -> int:
    """The algebraic intersection pairing <x, y> = x^T J y."""
    j = symplectic_form(g)
    return sum(a * b for a, b in zip(x, j.apply(y)))


def chain_class(g: int, k: int) -> tuple[int, ...]:
    """Homology class of chain curve c_k in the (a_i, b_i) basis.

    Odd chain curves run along consecutive handles (c_1 = a_1,
    c_{2i+1} = a_i + a_{i+1}, c_{2g+1} = a_g); even ones are the handle
    meridians (c_{2i} = b_i).
    """
    if not 1 <= k <= 2 * g + 1:
        raise UnknownCurveError(f"c_{k} out of range for genus {g}")
    vec = [0] * (2 * g)
    if k % 2 == 0:
        vec[2 * (k // 2 - 1) + 1] = 1
    else:
        i = (k - 1) // 2  # 0 .. g
        if i > 0:
            vec[2 * (i - 1)] = 1
        if i < g:
            vec[2 * i] = 1
    return tuple(vec)


def curve_class(s: Surface, c: CurveId) -> tuple[int, ...]:
    if c.family == "chain":
        return chain_class(s.genus, c.index)
    if c.family == "separating":
        return tuple([0] * (2 * s.genus))
    raise UnknownCurveError(f"no homology class table for family {c.family!r}")


def transvection_by(g: int, vec: Sequence[int]) -> SymplecticMatrix:
    """Matrix of x -> x + <x, v> v (a positive twist about a curve in class v)."""
    j = symplectic_form(g)
    jv = j.apply(vec)
    dim = 2 * g
    rows = []
    for i in range(dim):
        row = [1 if i == c else 0 for c in range(dim)]
        for c in range(dim):
            row[c] += vec[i] * jv[c]
        rows.append(tuple(row))
    return SymplecticMatrix(tuple(rows))


def transvection_matrix(s: Surface, c: CurveId) -> SymplecticMatrix:
    m = transvection_by(s.genus, curve_class(s, c))
    assert is_symplectic(m)
    return m


def chain_word_matrix(g: int, letters: Sequence[tuple[int, int]]) -> SymplecticMatrix:
    """Homology action of a signed chain-letter word, convention ab(x) = a(b(x))."""
    out = SymplecticMatrix.identity(2 * g)
    inverses: dict[int, SymplecticMatrix] = {}
    positives: dict[int, SymplecticMatrix] = {}
    for (k, sign) in letters:
        if sign > 0:
            m = positives.get(k)
            if m is None:
                m = positives.setdefault(k, transvection_by(g, chain_class(g, k)))
        else:
            m = inverses.get(k)
            if m is None:
                m = inverses.setdefault(k, _inverse_transvection(g, chain_class(g, k)))
        out = out * m
    return out


def _inverse_transvection(g: int, vec: Sequence[int]) -> SymplecticMatrix:
    """Inverse of a transvection: x -> x - <x, v> v."""
    j = symplectic_form(g)
    jv = j.apply(vec)
    dim = 2 * g
    rows = []
    for i in range(dim):
        row = [1 if i == c else 0 for c in range(dim)]
        for c in range(dim):
            row[c] -= vec[i] * jv[c]
        rows.append(tuple(row))
    return SymplecticMatrix(tuple(rows))


def word_to_matrix(w, gs: GeneratorSet) -> SymplecticMatrix:
    """Homology action of a word over a generator set's chain letters."""
    g = gs.surface.genus
    if w.genus != g:
        raise ValueError("word and generator set disagree on the surface")
    limit = 2 * g + 1
    for (k, _sign) in w.letters:
        if not 1 <= k <= limit:
            raise UnknownCurveError(f"letter c_{k} not in the generator set")
    return chain_word_matrix(g, w.letters)


# -- polynomials -----------------------------------------------------------


@dataclass(frozen=True)
class IntPolynomial:
    """Coefficients low to high; normalized (no trailing zeros)."""

    coeffs: tuple[int, ...]

    @staticmethod
    def make(coeffs: Sequence[int]) -> "IntPolynomial":
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return IntPolynomial(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __call__(self, x: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def is_palindromic_up_to_sign(self) -> bool:
        rev = tuple(reversed(self.coeffs))
        neg = tuple(-c for c in rev)
        return self.coeffs in (rev, neg)

    def __str__(self) -> str:
        terms = []
        for e, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*t^{e}")
        return " + ".join(terms) or "0"


def char_poly(m: SymplecticMatrix) -> IntPolynomial:
    """Exact characteristic polynomial by the Faddeev-LeVerrier scheme.

    Integer-preserving: every division below is exact.
    """
    dim = m.dimension
    ident = SymplecticMatrix.identity(dim)
    coeffs = [0] * (dim + 1)
    coeffs[dim] = 1
    n_mat = m
    c = -sum(n_mat.entries[i][i] for i in range(dim))
    coeffs[dim - 1] = c
    for step in range(2, dim + 1):
        shifted = SymplecticMatrix(
            tuple(
                tuple(n_mat.entries[i][j] + (c if i == j else 0) for j in range(dim))
                for i in range(dim)
            )
        )
        n_mat = m * shifted
        tr = sum(n_mat.entries[i][i] for i in range(dim))
        assert tr % step == 0
        c = -tr // step
        coeffs[dim - step] = c
    return IntPolynomial.make(coeffs)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def _has_rational_root(q: IntPolynomial) -> bool:
    # monic, so rational roots are integer divisors of the constant term
    c0 = q.coeffs[0]
    if c0 == 0:
        return True  # root at 0
    for d in _divisors(c0):
        if q(d) == 0 or q(-d) == 0:
            return True
    return False


def _degree4_quadratic_split(q: IntPolynomial) -> bool:
    """Does a monic integer quartic factor into two integer quadratics?

    With q = t^4 + p3 t^3 + p2 t^2 + p1 t + p0, any such factorization
    (t^2 + a t + b)(t^2 + c t + d) has b d = p0 with b, d integer
    divisors, a + c = p3, and ac = p2 - b - d, so (a, c) are integer
    roots of z^2 - p3 z + (p2 - b - d); the remaining coefficient p1
    cross-checks the candidate.
    """
    p0, p1, p2, p3 = q.coeffs[0], q.coeffs[1], q.coeffs[2], q.coeffs[3]
    if p0 == 0:
        return True
    for b in _divisors(p0) + [-d for d in _divisors(p0)]:
        if p0 % b != 0:
            continue
        d = p0 // b
        s = p2 - b - d
        disc = p3 * p3 - 4 * s
        if disc < 0:
            continue
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for a in {(p3 + r) // 2, (p3 - r) // 2}:
            c = p3 - a
            if a * c == s and a * d + b * c == p1:
                return True
    return False


def is_irreducible(q: IntPolynomial) -> bool:
    """Exact irreducibility over the rationals for monic q."""
    if not q.is_monic or q.degree < 1:
        raise ValueError("expected a monic polynomial of positive degree")
    if q.degree == 1:
        return True
    if _has_rational_root(q):
        return False
    if q.degree <= 3:
        return True
    if q.degree == 4:
        return not _degree4_quadratic_split(q)
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(q.coeffs)), t)
    _, factors = poly.factor_list()
    return len(factors) == 1 and factors[0][1] == 1


def _poly_divides(q: IntPolynomial, target: IntPolynomial) -> bool:
    """Exact division test for monic q."""
    rem = list(target.coeffs)
    dq = q.degree
    while len(rem) - 1 >= dq:
        lead = rem[-1]
        if lead == 0:
            rem.pop()
            continue
        shift = len(rem) - 1 - dq
        for i, c in enumerate(q.coeffs):
            rem[shift + i] -= lead * c
        assert rem[-1] == 0
        rem.pop()
    return all(c == 0 for c in rem)


def is_cyclotomic(q: IntPolynomial) -> bool:
    """True iff q divides t^n - 1 for some n with phi(n) <= deg q.

    Euler phi satisfies phi(n) >= sqrt(n/2), so n <= 2 deg^2 suffices.
    """
    if not q.is_monic:
        raise ValueError("expected a monic polynomial")
    d = q.degree
    if d < 1:
        return False
    for n in range(1, 2 * d * d + 2):
        target = IntPolynomial.make([-1] + [0] * (n - 1) + [1])
        if target.degree < d:
            continue
        if _poly_divides(q, target):
            return True
    return False


def power_substitution(q: IntPolynomial) -> Optional[int]:
    """k >= 2 such that q(t) = r(t^k), detected from the exponent support."""
    exps = [e for e, c in enumerate(q.coeffs) if c != 0 and e > 0]
    if not exps:
        return None
    k = 0
    for e in exps:
        k = math.gcd(k, e)
    return k if k >= 2 else None


@dataclass(frozen=True)
class HomologyCertificate:
    verdict: str  # "CertifiedPA" | "Inconclusive"
    char_poly: IntPolynomial
    failed_subtest: Optional[str]  # None when certified

    @property
    def certified(self) -> bool:
        return self.verdict == "CertifiedPA"


def casson_bleiler_certificate(w, gs: GeneratorSet) -> HomologyCertificate:
    """One-sided pseudo-Anosov certificate from the homology action."""
    q = char_poly(word_to_matrix(w, gs))
    if not is_irreducible(q):
        return HomologyCertificate("Inconclusive", q, "reducible")
    if is_cyclotomic(q):
        return HomologyCertificate("Inconclusive", q, "cyclotomic")
    if power_substitution(q) is not None:
        return HomologyCertificate("Inconclusive", q, "power_substitution")
    return HomologyCertificate("CertifiedPA", q, None)
