"""Exact checks for the flip engine: triangulations, programs, kernels."""

from __future__ import annotations

import random

import pytest

from mcgwalk.engine import kernel, kernel_py
from mcgwalk.engine.build import half_twist_search, rotation_program
from mcgwalk.engine.system import get_system
from mcgwalk.engine.triangulation import (
    FlipProgram,
    necklace_edge,
    necklace_triangulation,
)


def _random_admissible(tri, rng, scale=6):
    """Rejection-sample an admissible vector on the triangulation."""
    while True:
        vec = [rng.randrange(0, scale) * 2 for _ in range(tri.n_edges)]
        if tri.is_admissible(vec) and any(vec):
            return vec


def test_necklace_triangulation_shape():
    for n in (5, 6, 8, 10):
        tri = necklace_triangulation(n)
        assert tri.n_edges == 3 * n - 6
        assert tri.n_punctures == n


def test_double_flip_is_identity_on_coordinates():
    tri = necklace_triangulation(8)
    rng = random.Random(0)
    for _trial in range(25):
        e = rng.randrange(tri.n_edges)
        if not tri.is_flippable(e):
            continue
        copy = tri.copy()
        steps = [copy.flip(e), copy.flip(e)]
        prog = FlipProgram(tri.n_edges, tuple(steps), tuple(range(tri.n_edges)))
        for _v in range(5):
            vec = _random_admissible(tri, rng)
            assert prog.apply(vec) == tuple(vec)


def test_flip_preserves_admissibility():
    rng = random.Random(1)
    tri = necklace_triangulation(6)
    prog = rotation_program(6)
    for _trial in range(20):
        vec = _random_admissible(tri, rng)
        out = prog.apply(vec)
        assert tri.is_admissible(list(out))


def test_rotation_program_has_order_n():
    for n in (6, 8):
        prog = rotation_program(n)
        power = prog.power(n)
        tri = necklace_triangulation(n)
        rng = random.Random(n)
        for _trial in range(10):
            vec = _random_admissible(tri, rng)
            assert power.apply(vec) == tuple(vec)


def test_rotation_shifts_necklace_curves():
    n = 6
    system = get_system((n - 2) // 2)
    prog = rotation_program(n)
    tri = necklace_triangulation(n)
    for i in range(n):
        curve = tri.pair_curve(necklace_edge(i, n))
        shifted = tri.pair_curve(necklace_edge((i - 1) % n, n))
        assert prog.apply(list(curve)) == shifted
    del system


def test_half_twist_search_is_short_and_fixes_far_curves():
    prog, chirality = half_twist_search(6)
    assert len(prog.steps) <= 6
    assert chirality in ("inner", "outer")
    tri = necklace_triangulation(6)
    # the found half twist exchanges punctures 1 and 2; necklace arcs
    # away from both are untouched
    for i in (3, 4):
        far = tri.pair_curve(necklace_edge(i, 6))
        assert prog.apply(list(far)) == far


def test_program_composition_and_inverse():
    rng = random.Random(3)
    system = get_system(2)
    tri = necklace_triangulation(6)
    a = system.compile_word(((1, 1), (2, -1), (3, 1)))
    b = system.compile_word(((5, 1), (4, 1)))
    word_ab = system.compile_word(((5, 1), (4, 1), (1, 1), (2, -1), (3, 1)))
    for _trial in range(10):
        vec = _random_admissible(tri, rng)
        assert word_ab.apply(vec) == b.apply(a.apply(vec))
    inv = system.compile_word(((3, -1), (2, 1), (1, -1)))
    for _trial in range(10):
        vec = _random_admissible(tri, rng)
        assert inv.apply(list(a.apply(vec))) == tuple(vec)


@pytest.mark.parametrize("genus", [2, 3])
def test_braid_and_commutation_relations_on_battery(genus):
    system = get_system(genus)
    m = 2 * genus + 1
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if j == i + 1:
                word = (
                    (i, 1), (j, 1), (i, 1),
                    (j, -1), (i, -1), (j, -1),
                )
            else:
                word = ((i, 1), (j, 1), (i, -1), (j, -1))
            assert system.fixes_battery(word), (genus, i, j)


@pytest.mark.parametrize("n", [6, 8])
def test_classical_chain_relations(n):
    genus = (n - 2) // 2
    system = get_system(genus)
    m = 2 * genus + 1
    up = tuple((k, 1) for k in range(1, m + 1))
    down = tuple((k, 1) for k in range(m, 0, -1))
    # (s_1 ... s_{m}) ** (m + 1) is trivial downstairs
    assert system.fixes_battery(up * (m + 1))
    # s_1 ... s_m s_m ... s_1 is trivial downstairs
    assert system.fixes_battery(up + down)


def test_square_of_half_twist_is_full_twist():
    system = get_system(2)
    d0 = system.chain_vectors[1 - 1]
    image = system.apply_word(((2, 1), (2, 1)), d0)
    # full twist about the neighbouring curve: i(T_b^2(a), a) is twice
    # the squared intersection number, here 2 * 1
    assert system.chain_intersection(image, 1) == 2


def test_compiled_and_python_kernels_agree():
    system = get_system(2)
    rng = random.Random(7)
    tri = necklace_triangulation(6)
    word = tuple((rng.randrange(1, 6), rng.choice((1, -1))) for _ in range(40))
    prog = system.compile_word(word)
    for _trial in range(10):
        vec = _random_admissible(tri, rng)
        fast = kernel.replay(list(vec), prog.steps, prog.perm)
        slow = kernel_py.replay(list(vec), prog.steps, prog.perm)
        assert fast == slow


def test_flip_program_identity_roundtrip():
    prog = FlipProgram.identity(12)
    assert prog.apply(list(range(12))) == tuple(range(12))
