"""Pure-Python replay kernel for flip programs.

Reference implementation of the hot loop; a compiled twin lives in
``_replay.pyx``.  Values are arbitrary-precision integers throughout.
"""

from __future__ import annotations


def replay(vec, steps, perm):
    """Run flattened flip steps on ``vec`` and apply the slot relabelling.

    ``steps`` is a flat sequence of (e, a, b, c, d) groups; ``perm``
    sends slot f of the final state to output index perm[f].
    """
    v = list(vec)
    for i in range(0, len(steps), 5):
        e = steps[i]
        s = v[steps[i + 1]] + v[steps[i + 3]]
        t = v[steps[i + 2]] + v[steps[i + 4]]
        v[e] = (s if s >= t else t) - v[e]
    out = [0] * len(v)
    for f, g in enumerate(perm):
        out[g] = v[f]
    return tuple(out)
