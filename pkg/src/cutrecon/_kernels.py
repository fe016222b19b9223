"""Compiled inner loops for the Metropolis-Hastings samplers.

A target is a one-cut contraction between an "upstream" table ``up[row, a, beta]``
and a "downstream" table ``down[row, e, beta]``. Rows are looked up from the
chain state through bit runs; a non-empty ``keys`` array makes the table
sparse (sorted row keys, missing keys read as zero).
"""
import numpy as np
from numba import njit


@njit(cache=True)
def gather(x, runs):
    out = 0
    for r in range(runs.shape[0]):
        out |= ((x >> runs[r, 0]) & runs[r, 1]) << runs[r, 2]
    return out


@njit(cache=True)
def lookup(keys, b):
    if keys.shape[0] == 0:
        return b
    i = np.searchsorted(keys, b)
    if i < keys.shape[0] and keys[i] == b:
        return i
    return -1


@njit(cache=True)
def target(x, up, up_keys, up_runs, down, down_keys, down_runs, gamma):
    iu = lookup(up_keys, gather(x, up_runs))
    if iu < 0:
        return 0.0
    idn = lookup(down_keys, gather(x, down_runs))
    if idn < 0:
        return 0.0
    s = 0.0
    for a in range(2):
        for e in range(2):
            for b in range(3):
                s += gamma[a, e, b] * up[iu, a, b] * down[idn, e, b]
    return 0.5 * s


@njit(cache=True)
def run_chain(x0, flips, uniforms, burn, floor, up, up_keys, up_runs, down, down_keys, down_runs, gamma, recorded):
    """Advance one walker ``flips.size`` steps; states from step ``burn`` on go to ``recorded``.

    Returns ``(final state, accepts, floor hits, saw positive mass)``.
    """
    x = x0
    px = target(x, up, up_keys, up_runs, down, down_keys, down_runs, gamma)
    positive = px > floor
    accepts = 0
    floor_hits = 0
    for n in range(flips.shape[0]):
        y = x ^ (np.int64(1) << flips[n])
        py = target(y, up, up_keys, up_runs, down, down_keys, down_runs, gamma)
        if py <= floor:
            floor_hits += 1
        num = py if py > floor else floor
        den = px if px > floor else floor
        if uniforms[n] < num / den:
            x = y
            px = py
            accepts += 1
            if px > floor:
                positive = True
        if n >= burn:
            recorded[n - burn] = x
    return x, accepts, floor_hits, positive
