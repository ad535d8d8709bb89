"""Compiled inner loops.

Every output entry is accumulated over ``y`` in ascending order with no
fast-math, so any split of rows across threads gives the same bits.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def nonlocal_rows(g, w, out, r0, r1):
    n = g.shape[1]
    for i in range(r0, r1):
        for x in range(n):
            gx = g[i, x]
            acc = 0.0
            for y in range(n):
                acc += w[x - y + n - 1] * (g[i, y] - gx)
            out[i, x] = acc


@numba.njit(cache=True, nogil=True)
def euler_rows(g, w, dt, sgn, out, r0, r1, bound):
    """Advance rows ``r0:r1`` by one step into ``out``.

    Returns ``(max |out - g|, diverged)`` over those rows.
    """
    n = g.shape[1]
    maxdiff = 0.0
    diverged = False
    for i in range(r0, r1):
        for x in range(n):
            gx = g[i, x]
            acc = 0.0
            for y in range(n):
                acc += w[x - y + n - 1] * (g[i, y] - gx)
            new = gx + dt * (sgn * acc - (gx * gx * gx - gx))
            out[i, x] = new
            if not np.isfinite(new) or abs(new) > bound:
                diverged = True
            diff = abs(new - gx)
            if diff > maxdiff:
                maxdiff = diff
    return maxdiff, diverged
