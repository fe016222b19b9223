"""Exact reconstruction of the full output distribution from subcircuit tensors."""
from __future__ import annotations

import numpy as np

from .simulator import SubcircuitTensor
from .tensors import DENSE_LIMIT, GAMMA, JoinPlan, QuasiDistribution, negativity_report, plan_cuts, query_batch

CHUNK = 1 << 16


def _check_width(width: int):
    if width > DENSE_LIMIT:
        raise ValueError(f"exact reconstruction is limited to {DENSE_LIMIT} qubits, got {width}")


def reconstruct_from_queries(tensors, width: int | None = None) -> QuasiDistribution:
    """Evaluate every one of the ``2**m`` output strings through the per-string contraction."""
    plan = JoinPlan.from_tensors(tensors, width)
    _check_width(plan.width)
    out = np.empty(2**plan.width)
    for start in range(0, out.size, CHUNK):
        xs = np.arange(start, min(start + CHUNK, out.size), dtype=np.int64)
        out[start : start + xs.size] = query_batch(xs, plan, tensors)
    q = QuasiDistribution(plan.width, out)
    q.report = negativity_report(q)
    return q


def reconstruct_exact_one_cut(pA: SubcircuitTensor, pB: SubcircuitTensor) -> QuasiDistribution:
    if len(pA.terminals) != 1 or len(pB.terminals) != 1:
        raise ValueError("one-cut reconstruction needs exactly one terminal on each tensor")
    (ra, ca), (rb, cb) = pA.terminals[0], pB.terminals[0]
    if ca != cb or {ra, rb} != {"a", "e"}:
        raise ValueError(f"terminals {pA.terminals} and {pB.terminals} do not form one cut")
    return reconstruct_from_queries([pA, pB])


def join_pair_exact(upstream: SubcircuitTensor, downstream: SubcircuitTensor, cut: int | None = None) -> SubcircuitTensor:
    """Contract one cut shared by two tensors (or take the outer product when ``cut`` is None).

    The result keeps every other terminal of both operands; its bit axis
    lists ``upstream.output_wires`` followed by ``downstream.output_wires``.
    Its scale carries the 1/2 of the contracted cut.
    """
    if cut is not None:
        if ("a", cut) not in upstream.terminals:
            raise ValueError(f"upstream tensor has no connection bit for cut {cut}")
        if ("e", cut) not in downstream.terminals:
            raise ValueError(f"downstream tensor has no preparation for cut {cut}")
    shared = set(upstream.cuts) & set(downstream.cuts)
    if shared - ({cut} if cut is not None else set()):
        raise ValueError(f"tensors share cuts {sorted(shared)} but only {cut} is being contracted")

    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    bu, bd = next(letters), next(letters)
    names = {}

    def subs(t):
        s = ""
        for term in t.terminals:
            if term[1] == cut:
                key_bit, key_basis = ("bit", term), ("basis", cut)
            else:
                key_bit, key_basis = ("bit", term), ("basis", term)
            for key in (key_bit, key_basis):
                if key not in names:
                    names[key] = next(letters)
                s += names[key]
        return s

    su, sd = bu + subs(upstream), bd + subs(downstream)
    kept = [term for term in upstream.terminals + downstream.terminals if term[1] != cut]
    kept.sort(key=lambda t: (t[1], t[0]))
    out = bd + bu + "".join(names[("bit", t)] + names[("basis", t)] for t in kept)
    operands = [upstream.values, downstream.values]
    spec = f"{su},{sd}"
    scale = 1.0
    if cut is not None:
        spec += "," + names[("bit", ("a", cut))] + names[("bit", ("e", cut))] + names[("basis", cut)]
        operands.append(GAMMA)
        scale = 0.5
    values = scale * np.einsum(f"{spec}->{out}", *operands, optimize="greedy")
    n_bits = 2 ** (len(upstream.output_wires) + len(downstream.output_wires))
    values = values.reshape((n_bits,) + values.shape[2:])
    return SubcircuitTensor(
        values,
        upstream.output_wires + downstream.output_wires,
        tuple(kept),
        mode="exact" if upstream.mode == downstream.mode == "exact" else "shots",
    )


def to_distribution(tensor: SubcircuitTensor, width: int | None = None) -> QuasiDistribution:
    """Reorder the bit axis of a rank-1 tensor into original wire order."""
    if tensor.terminals:
        raise ValueError(f"tensor still has open cut terminals {tensor.terminals}")
    wires = tensor.output_wires
    width = len(wires) if width is None else width
    if sorted(wires) != list(range(width)):
        raise ValueError(f"output wires {wires} do not cover 0..{width - 1}")
    _check_width(width)
    n = len(wires)
    # axis j of the reshaped array is bit n-1-j, i.e. wire wires[n-1-j]
    arr = tensor.values.reshape((2,) * n) if n else tensor.values.reshape(())
    src_axis_of_wire = {w: n - 1 - j for j, w in enumerate(wires)}
    order = [src_axis_of_wire[w] for w in reversed(range(width))]
    dense = np.ascontiguousarray(arr.transpose(order)).reshape(-1)
    q = QuasiDistribution(width, dense)
    q.report = negativity_report(q)
    return q


def join_all_exact(tensors, order=None) -> SubcircuitTensor:
    """Contract every cut, leftmost cut first unless ``order`` (a list of cut ids) is given.

    Tensors not touched by any cut are folded in by outer product at the end.
    """
    plans = plan_cuts(tensors)
    cut_order = [p.cut for p in plans] if order is None else list(order)
    if sorted(cut_order) != sorted(p.cut for p in plans):
        raise ValueError(f"join order {cut_order} must list each cut exactly once")
    # groups of original tensors merged so far: group id -> tensor
    pool = {i: t for i, t in enumerate(tensors)}
    owner = {}
    for i, t in enumerate(tensors):
        for term in t.terminals:
            owner[term] = i
    for cut in cut_order:
        u, d = owner[("a", cut)], owner[("e", cut)]
        if u == d:
            raise ValueError(f"cut {cut} closes a loop; only tree-shaped cut sets are supported")
        joined = join_pair_exact(pool.pop(u), pool.pop(d), cut)
        pool[u] = joined
        for term in joined.terminals:
            owner[term] = u
    result = None
    for key in sorted(pool):
        result = pool[key] if result is None else join_pair_exact(result, pool[key])
    return result


def reconstruct_exact(tensors, order=None) -> QuasiDistribution:
    """Full distribution by sequential pairwise joins; raw weights with a negativity report."""
    return to_distribution(join_all_exact(tensors, order))
