"""Derivation of the generator flip programs on the punctured sphere.

The half twist exchanging punctures 1 and 2 is found once, by breadth
first search over short flip sequences supported near the necklace arc
E_1, and validated against hand-computed curve images.  All other half
twists are conjugates by the rotation program, which re-fans the two
necklace disks and relabels.  Everything is verified combinatorially at
build time; nothing is trusted from memory.
"""

from __future__ import annotations

from typing import Optional

from .triangulation import (
    FlipProgram,
    SphereTriangulation,
    inner_edge,
    necklace_edge,
    necklace_triangulation,
    outer_edge,
)


def _program_from_path(
    n: int,
    steps: list[tuple[int, int, int, int, int]],
    end: SphereTriangulation,
    vertex_map: list[int],
    base: Optional[SphereTriangulation] = None,
) -> Optional[FlipProgram]:
    """Close a flip path into a program via an isomorphism back to base.

    ``vertex_map`` prescribes where each puncture of the end state must
    go in the base triangulation.  Returns None when no orientation
    preserving isomorphism exists.
    """
    if base is None:
        base = necklace_triangulation(n)
    for m in end.isomorphisms_to(base, vertex_map):
        perm = tuple(m[2 * e] >> 1 for e in range(end.n_edges))
        return FlipProgram(end.n_edges, tuple(steps), perm)
    return None


def rotation_program(n: int) -> FlipProgram:
    """The coordinate action of the rotation taking puncture i to i - 1.

    Realized by re-fanning both complementary disks of the necklace from
    apex n-1 to apex 0 and closing up with the vertex relabelling
    i -> i - 1 (mod n), which carries the re-fanned triangulation back
    onto the reference one.
    """
    tri = necklace_triangulation(n)
    steps = []
    for j in range(1, n - 2):
        steps.append(tri.flip(inner_edge(j, n)))
    for j in range(1, n - 2):
        steps.append(tri.flip(outer_edge(j, n)))
    vertex_map = [(v - 1) % n for v in range(n)]
    prog = _program_from_path(n, steps, tri, vertex_map)
    if prog is None:
        raise RuntimeError("rotation closure failed")
    return prog


def _local_edges(n: int) -> list[int]:
    """Edges meeting the support disk of the half twist about E_1."""
    return [
        necklace_edge(0, n),
        necklace_edge(1, n),
        necklace_edge(2, n),
        inner_edge(1, n),
        inner_edge(2, n),
        outer_edge(1, n),
        outer_edge(2, n),
    ]


def _half_twist_targets(n: int) -> dict[str, dict[int, int]]:
    """Hand-computed images of the pair curves around {0,1} and {2,3}.

    A half twist swapping punctures 1 and 2 drags one of them through
    the inner disk and the other through the outer disk, so the images
    of the neighbouring pair curves are the curves around {0,2} and
    {1,3} whose connecting corridors pass on opposite sides of the
    necklace.  Both chiralities are listed; a candidate program must
    realize one of the two consistent pairings.
    """
    e = lambda i: necklace_edge(i, n)
    d = lambda j: inner_edge(j, n)
    o = lambda j: outer_edge(j, n)
    around_02_inner = {e(n - 1): 1, e(0): 1, e(1): 1, e(2): 1, d(1): 2, d(2): 1, o(2): 1}
    around_02_outer = {e(n - 1): 1, e(0): 1, e(1): 1, e(2): 1, o(1): 2, o(2): 1, d(2): 1}
    around_13_inner = {e(0): 1, e(1): 1, e(2): 1, e(3): 1, d(1): 1, d(2): 2, d(3): 1, o(1): 1, o(3): 1}
    around_13_outer = {e(0): 1, e(1): 1, e(2): 1, e(3): 1, o(1): 1, o(2): 2, o(3): 1, d(1): 1, d(3): 1}
    return {
        "02_inner": around_02_inner,
        "02_outer": around_02_outer,
        "13_inner": around_13_inner,
        "13_outer": around_13_outer,
    }


def _as_vector(n: int, sparse: dict[int, int]) -> tuple[int, ...]:
    vec = [0] * (3 * n - 6)
    for k, v in sparse.items():
        vec[k] = v
    return tuple(vec)


def _candidate_is_half_twist(n: int, prog: FlipProgram) -> Optional[str]:
    """Validate a closed flip path as the half twist about E_1.

    Returns the chirality tag ("inner" if the image of the {0,1} curve
    runs through the inner disk) or None if the program is not the half
    twist.
    """
    base = necklace_triangulation(n)
    targets = _half_twist_targets(n)
    curve = lambda i: base.pair_curve(necklace_edge(i, n))
    if prog.apply(curve(1)) != curve(1):
        return None
    for i in range(3, n):
        if prog.apply(curve(i)) != curve(i):
            return None
    img0 = prog.apply(curve(0))
    img2 = prog.apply(curve(2))
    if img0 == _as_vector(n, targets["02_inner"]) and img2 == _as_vector(n, targets["13_outer"]):
        return "inner"
    if img0 == _as_vector(n, targets["02_outer"]) and img2 == _as_vector(n, targets["13_inner"]):
        return "outer"
    return None


def half_twist_search(n: int, max_flips: int = 6) -> tuple[FlipProgram, str]:
    """Find the half twist exchanging punctures 1 and 2 by flip search.

    Breadth first over flip sequences confined to the seven edges
    meeting the support disk, closed up by an isomorphism that swaps
    punctures 1 and 2 and fixes every other puncture.
    """
    base = necklace_triangulation(n)
    local = _local_edges(n)
    vertex_map = list(range(n))
    vertex_map[1], vertex_map[2] = 2, 1
    start = base.copy()
    frontier: list[tuple[SphereTriangulation, list[tuple[int, int, int, int, int]]]] = [
        (start, [])
    ]
    seen = {start.key()}
    for _depth in range(max_flips):
        next_frontier = []
        for (tri, steps) in frontier:
            for e in local:
                if not tri.is_flippable(e):
                    continue
                t2 = tri.copy()
                step = t2.flip(e)
                k = t2.key()
                if k in seen:
                    continue
                seen.add(k)
                path = steps + [step]
                prog = _program_from_path(n, path, t2, vertex_map, base)
                if prog is not None:
                    tag = _candidate_is_half_twist(n, prog)
                    if tag is not None:
                        return prog, tag
                next_frontier.append((t2, path))
        frontier = next_frontier
    raise RuntimeError("half twist not found within the flip budget")
