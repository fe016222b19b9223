"""The gamma coefficient table, single-bitstring queries and quasi-distributions.

Contracting one cut's ``(a, e, beta)`` triple is

    0.5 * sum_{a, e, beta} gamma[a, e, beta] * up[.., a, beta] * down[.., e, beta]

The 0.5 per cut comes from the Pauli decomposition rho = 1/2 sum_P Tr(P rho) P;
without it an exact reconstruction sums to 2**K.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from .simulator import PauliBasis, SubcircuitTensor

DENSE_LIMIT = 24


def gamma(a: int, e: int, basis) -> int:
    delta = 1 if a == e else 0
    if PauliBasis(basis) == PauliBasis.Z:
        return 2 * delta
    return 2 * delta - 1


GAMMA = np.array([[[gamma(a, e, b) for b in PauliBasis] for e in (0, 1)] for a in (0, 1)], dtype=float)
GAMMA.setflags(write=False)


# ---------------------------------------------------------------------------
# bit bookkeeping


def bit_runs(wires, positions=None) -> np.ndarray:
    """Runs ``(src_shift, mask, dst_shift)`` that gather bits ``positions[wires[j]]`` into bit ``j``.

    ``positions`` maps a wire to its bit in the source integer (identity by
    default). Consecutive source bits collapse into one run, so a contiguous
    block of wires costs a single shift-and-mask.
    """
    src = [w if positions is None else positions[w] for w in wires]
    runs = []
    j = 0
    while j < len(src):
        start = j
        while j + 1 < len(src) and src[j + 1] == src[j] + 1:
            j += 1
        length = j - start + 1
        runs.append((src[start], (1 << length) - 1, start))
        j += 1
    return np.array(runs, dtype=np.int64).reshape(-1, 3)


def gather_bits(x, runs):
    """Apply :func:`bit_runs` to an int or an integer array."""
    out = x & 0
    for src, mask, dst in runs.tolist():
        out = out | (((x >> src) & mask) << dst)
    return out


def bits_to_int(bitstring: str) -> int:
    """Character ``k`` of the string is qubit ``k``."""
    if any(c not in "01" for c in bitstring):
        raise ValueError(f"not a bit string: {bitstring!r}")
    return int(bitstring[::-1], 2) if bitstring else 0


def int_to_bits(x: int, width: int) -> str:
    return format(x, f"0{width}b")[::-1] if width else ""


# ---------------------------------------------------------------------------
# join plans


@dataclass(frozen=True)
class CutJoinPlan:
    """Contraction of one cut: an upstream ``(a, beta)`` pair against a downstream ``(e, beta)`` pair."""

    cut: int
    upstream: int
    up_position: int
    downstream: int
    down_position: int
    contracted: int = 0


def plan_cuts(tensors) -> list[CutJoinPlan]:
    ups, downs = {}, {}
    for i, t in enumerate(tensors):
        for pos, (role, cut) in enumerate(t.terminals):
            table = ups if role == "a" else downs
            if cut in table:
                raise ValueError(f"cut {cut} has two {'upstream' if role == 'a' else 'downstream'} terminals")
            table[cut] = (i, pos)
    if set(ups) != set(downs):
        raise ValueError(f"unpaired cut terminals: {sorted(set(ups) ^ set(downs))}")
    plans = []
    for n, cut in enumerate(sorted(ups)):
        (u, up), (d, dp) = ups[cut], downs[cut]
        if u == d:
            raise ValueError(f"cut {cut} joins a tensor to itself")
        plans.append(CutJoinPlan(cut, u, up, d, dp, n))
    return plans


@dataclass(frozen=True)
class JoinPlan:
    """Everything needed to evaluate one output string: cut pairings, bit splitting, contraction."""

    width: int
    cuts: tuple[CutJoinPlan, ...]
    runs: tuple[np.ndarray, ...]
    subscripts: str
    batch_subscripts: str
    scale: float
    _operands: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_tensors(cls, tensors, width: int | None = None) -> JoinPlan:
        cuts = tuple(plan_cuts(tensors))
        wires = [w for t in tensors for w in t.output_wires]
        if len(set(wires)) != len(wires):
            raise ValueError("output wires overlap between tensors")
        if width is None:
            width = len(wires)
        if sorted(wires) != list(range(width)):
            raise ValueError(f"output wires {sorted(wires)} do not cover 0..{width - 1}")
        runs = tuple(bit_runs(t.output_wires) for t in tensors)

        letters = iter(string.ascii_letters)
        bit_letter = {}
        basis_letter = {}
        for plan in cuts:
            bit_letter[("a", plan.cut)] = next(letters)
            bit_letter[("e", plan.cut)] = next(letters)
            basis_letter[plan.cut] = next(letters)
        batch = next(letters)
        terms = []
        for t in tensors:
            terms.append("".join(bit_letter[term] + basis_letter[term[1]] for term in t.terminals))
        gammas = [bit_letter[("a", p.cut)] + bit_letter[("e", p.cut)] + basis_letter[p.cut] for p in cuts]
        subscripts = ",".join(terms + gammas) + "->"
        batch_subscripts = ",".join([batch + s for s in terms] + gammas) + "->" + batch
        return cls(width, cuts, runs, subscripts, batch_subscripts, 0.5 ** len(cuts), (GAMMA,) * len(cuts))


def _as_int(bitstring, width: int) -> int:
    if isinstance(bitstring, str):
        if len(bitstring) != width:
            raise ValueError(f"bit string has length {len(bitstring)}, expected {width}")
        return bits_to_int(bitstring)
    x = int(bitstring)
    if not 0 <= x < 2**width:
        raise ValueError(f"bit string index {x} out of range for width {width}")
    return x


def query_joint(bitstring, plan: JoinPlan, tensors) -> float:
    """Quasi-probability of one full output string: 12 gamma-weighted products per cut."""
    x = _as_int(bitstring, plan.width)
    slices = [t.values[gather_bits(x, runs)] for t, runs in zip(tensors, plan.runs)]
    if not plan.cuts:
        return float(np.prod(slices))
    return plan.scale * float(np.einsum(plan.subscripts, *slices, *plan._operands))


def query_batch(xs: np.ndarray, plan: JoinPlan, tensors) -> np.ndarray:
    """:func:`query_joint` over an integer array of output strings."""
    xs = np.asarray(xs, dtype=np.int64)
    slices = [t.values[gather_bits(xs, runs)] for t, runs in zip(tensors, plan.runs)]
    if not plan.cuts:
        return np.prod(slices, axis=0)
    return plan.scale * np.einsum(plan.batch_subscripts, *slices, *plan._operands, optimize="greedy")


# ---------------------------------------------------------------------------
# quasi-distributions


@dataclass
class QuasiDistribution:
    """Weights over ``2**width`` output strings, dense array or sparse ``{int: weight}``.

    Raw weights may be negative and need not sum to one.
    """

    width: int
    weights: np.ndarray | dict
    normalized: bool = False
    report: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_dense(self) -> bool:
        return isinstance(self.weights, np.ndarray)

    def dense(self) -> np.ndarray:
        if self.is_dense:
            return self.weights
        if self.width > DENSE_LIMIT:
            raise ValueError(f"refusing to densify {self.width} qubits")
        out = np.zeros(2**self.width)
        for x, w in self.weights.items():
            out[x] = w
        return out

    def items(self):
        """``(int, weight)`` pairs in ascending integer order, zero entries of dense storage skipped."""
        if self.is_dense:
            nz = np.flatnonzero(self.weights)
            return list(zip(nz.tolist(), self.weights[nz].tolist()))
        return sorted(self.weights.items())

    def __getitem__(self, bitstring) -> float:
        x = _as_int(bitstring, self.width)
        if self.is_dense:
            return float(self.weights[x])
        return float(self.weights.get(x, 0.0))

    def total(self) -> float:
        if self.is_dense:
            return float(self.weights.sum())
        return float(sum(self.weights.values()))

    def normalize(self) -> QuasiDistribution:
        """Clamp negative weights to zero and rescale to unit sum."""
        report = negativity_report(self)
        if self.is_dense:
            w = np.clip(self.weights, 0.0, None)
            s = w.sum()
        else:
            w = {x: v for x, v in self.weights.items() if v > 0}
            s = sum(w.values())
        if s <= 0:
            raise FloatingPointError("distribution has no positive mass to normalize")
        w = w / s if self.is_dense else {x: v / s for x, v in w.items()}
        return QuasiDistribution(self.width, w, normalized=True, report=report, diagnostics=dict(self.diagnostics))


def negativity_report(q) -> dict:
    """Negative mass, minimum entry and raw sum of a quasi-distribution (or mapping / array)."""
    if isinstance(q, QuasiDistribution):
        q = q.weights
    vals = np.fromiter(q.values(), dtype=float) if isinstance(q, dict) else np.asarray(q, dtype=float)
    if vals.size == 0:
        return {"negative_mass": 0.0, "min_entry": 0.0, "raw_sum": 0.0}
    return {
        "negative_mass": float(vals[vals < 0].sum()),
        "min_entry": float(vals.min()),
        "raw_sum": float(vals.sum()),
    }
