"""Approximate reconstruction by Metropolis-Hastings sampling over output strings.

The walker flips one uniformly chosen bit per step (a symmetric proposal) and
accepts with ``min(1, P(y) / P(x))`` where ``P`` is the per-string cut
contraction. Quasi-probabilities at or below ``ratio_floor`` are replaced by
the floor on both sides of the ratio, so a walker started on a zero plateau
wanders until it meets positive mass and essentially never steps back off it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .simulator import PauliBasis, SubcircuitTensor
from .tensors import GAMMA, QuasiDistribution, bit_runs, bits_to_int, int_to_bits

_GAMMA = np.ascontiguousarray(GAMMA)
_NO_KEYS = np.empty(0, dtype=np.int64)
SLICES = [(e, b) for e in (0, 1) for b in PauliBasis]


class ZeroTargetError(FloatingPointError):
    """A walker never found a string with positive quasi-probability."""


@dataclass(frozen=True)
class MhConfig:
    samples: int
    burn_in: float = 0.2
    chains: int = 4
    seed: int = 0
    ratio_floor: float = 1e-12
    init: str = "uniform"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 0 <= self.burn_in < 1:
            raise ValueError("burn_in must lie in [0, 1)")
        if self.chains < 1:
            raise ValueError("chains must be positive")
        if not self.ratio_floor > 0:
            raise ValueError("ratio_floor must be positive")
        if self.init not in ("uniform", "prescan"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.burn_steps >= self.samples:
            raise ValueError("burn-in leaves no samples to record")

    @property
    def burn_steps(self) -> int:
        return math.ceil(self.burn_in * self.samples)


@dataclass
class ChainState:
    x: int
    steps: int = 0
    accepts: int = 0
    floor_hits: int = 0
    rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def acceptance_rate(self) -> float:
        return self.accepts / self.steps if self.steps else 0.0


@dataclass
class Histogram:
    """Counts of recorded walker states; keys are ints over ``wires`` (bit ``j`` is ``wires[j]``)."""

    wires: tuple[int, ...]
    counts: dict = field(default_factory=dict)
    total: int = 0
    chains: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def frequencies(self) -> dict:
        keys = list(self.counts)
        freqs = np.fromiter(self.counts.values(), dtype=float, count=len(keys)) / self.total
        return dict(zip(keys, freqs.tolist()))

    def to_distribution(self, width: int | None = None) -> QuasiDistribution:
        width = len(self.wires) if width is None else width
        if tuple(self.wires) != tuple(range(width)):
            raise ValueError("histogram wires are not the full circuit in order")
        return QuasiDistribution(width, self.frequencies(), normalized=True, diagnostics=dict(self.diagnostics))


def propose(x, rng: np.random.Generator, width: int | None = None):
    """Flip one uniformly chosen bit of ``x`` (a bit string, or an int with ``width``)."""
    if isinstance(x, str):
        if not x:
            raise ValueError("cannot propose from an empty bit string")
        y = propose(bits_to_int(x), rng, len(x))
        return int_to_bits(y, len(x))
    if width is None or width < 1:
        raise ValueError("integer states need a positive width")
    return x ^ (1 << int(rng.integers(width)))


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class SparseTensor:
    """Sampled table over visited strings only: ``values[i]`` belongs to bit string ``keys[i]``."""

    keys: np.ndarray
    values: np.ndarray
    output_wires: tuple[int, ...]
    terminals: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class _Target:
    """One-cut contraction between two tables, seen from a walker over ``wires``."""

    wires: tuple[int, ...]
    up: np.ndarray
    up_keys: np.ndarray
    up_runs: np.ndarray
    down: np.ndarray
    down_keys: np.ndarray
    down_runs: np.ndarray

    @classmethod
    def build(cls, up_values, up_wires, down_values, down_wires, up_keys=None, down_keys=None):
        wires = tuple(sorted(set(up_wires) | set(down_wires)))
        if set(up_wires) & set(down_wires):
            raise ValueError("tables share output wires")
        if len(wires) > 62:
            raise ValueError("walker state limited to 62 bits")
        pos = {w: i for i, w in enumerate(wires)}
        return cls(
            wires,
            np.ascontiguousarray(up_values, dtype=float).reshape(-1, 2, 3),
            _NO_KEYS if up_keys is None else np.ascontiguousarray(up_keys, dtype=np.int64),
            bit_runs(up_wires, pos),
            np.ascontiguousarray(down_values, dtype=float).reshape(-1, 2, 3),
            _NO_KEYS if down_keys is None else np.ascontiguousarray(down_keys, dtype=np.int64),
            bit_runs(down_wires, pos),
        )

    def __call__(self, x: int) -> float:
        return _kernels.target(
            np.int64(x), self.up, self.up_keys, self.up_runs, self.down, self.down_keys, self.down_runs, _GAMMA
        )


def _one_cut_pair(pA, pB):
    if len(pA.terminals) != 1 or len(pB.terminals) != 1:
        raise ValueError("one-cut sampling needs one terminal per tensor")
    if pA.terminals[0][0] == "e":
        pA, pB = pB, pA
    (ra, ca), (rb, cb) = pA.terminals[0], pB.terminals[0]
    if (ra, rb) != ("a", "e") or ca != cb:
        raise ValueError(f"terminals {pA.terminals} and {pB.terminals} do not form one cut")
    return pA, pB


def _one_cut_target(pA, pB) -> _Target:
    pA, pB = _one_cut_pair(pA, pB)
    return _Target.build(
        pA.values,
        pA.output_wires,
        pB.values,
        pB.output_wires,
        getattr(pA, "keys", None),
        getattr(pB, "keys", None),
    )


# ---------------------------------------------------------------------------
# walkers


def _initial_state(target: _Target, rng: np.random.Generator, init: str) -> int:
    nbits = len(target.wires)

    def draw():
        bits = rng.integers(0, 2, size=nbits)
        return int((bits.astype(np.int64) << np.arange(nbits, dtype=np.int64)).sum())

    x = draw()
    if init == "prescan":
        best, best_p = x, target(x)
        for _ in range(8 * nbits):
            y = draw()
            p = target(y)
            if p > best_p:
                best, best_p = y, p
        x = best
    return x


def _walk(target: _Target, steps: int, burn: int, rng, floor: float, init: str):
    """Run one walker; returns its ``ChainState`` and the recorded states."""
    nbits = len(target.wires)
    x0 = _initial_state(target, rng, init)
    flips = rng.integers(0, nbits, size=steps).astype(np.int64)
    uniforms = rng.random(steps)
    recorded = np.empty(max(steps - burn, 0), dtype=np.int64)
    x, accepts, floor_hits, positive = _kernels.run_chain(
        np.int64(x0), flips, uniforms, burn, floor,
        target.up, target.up_keys, target.up_runs,
        target.down, target.down_keys, target.down_runs,
        _GAMMA, recorded,
    )
    if not positive:
        raise ZeroTargetError(f"walker found no positive quasi-probability in {steps} steps")
    state = ChainState(int(x), steps, int(accepts), int(floor_hits), rng)
    return state, recorded


def _split_rhat(traces) -> float:
    """Split-R-hat of the Hamming weight trace across chains (nan when undefined)."""
    halves = []
    for t in traces:
        n = len(t) // 2
        if n < 2:
            return float("nan")
        halves += [t[:n], t[n : 2 * n]]
    halves = np.array(halves, dtype=float)
    n = halves.shape[1]
    within = halves.var(axis=1, ddof=1).mean()
    between = n * halves.mean(axis=1).var(ddof=1)
    if within == 0:
        return 1.0 if between == 0 else float("inf")
    var_hat = (n - 1) / n * within + between / n
    return float(np.sqrt(var_hat / within))


_BYTE_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _popcount(xs: np.ndarray) -> np.ndarray:
    as_bytes = np.ascontiguousarray(xs, dtype=np.int64).view(np.uint8).reshape(-1, 8)
    return _BYTE_POPCOUNT[as_bytes].sum(axis=1)


def _count(recorded: np.ndarray) -> dict:
    keys, n = np.unique(recorded, return_counts=True)
    return dict(zip(keys.tolist(), n.tolist()))


def _sample(target: _Target, cfg: MhConfig, seed_seq: np.random.SeedSequence) -> Histogram:
    hist = Histogram(target.wires)
    runs = []
    burn = cfg.burn_steps
    for child in seed_seq.spawn(cfg.chains):
        rng = np.random.default_rng(child)
        state, recorded = _walk(target, cfg.samples, burn, rng, cfg.ratio_floor, cfg.init)
        hist.chains.append(state)
        runs.append(recorded)
    hist.counts = _count(np.concatenate(runs))
    hist.total = int(sum(r.size for r in runs))
    hist.diagnostics = {
        "acceptance_rate": [c.acceptance_rate for c in hist.chains],
        "floor_hits": int(sum(c.floor_hits for c in hist.chains)),
        "recorded_per_chain": cfg.samples - burn,
        "split_rhat": _split_rhat([_popcount(r) for r in runs]),
    }
    return hist


def mh_one_cut(pA, pB, cfg: MhConfig) -> Histogram:
    """Sample the one-cut reconstruction with ``cfg.chains`` independent walkers, counts merged."""
    return _sample(_one_cut_target(pA, pB), cfg, np.random.SeedSequence(cfg.seed))


# ---------------------------------------------------------------------------
# two cuts


def _cascade(pA, pB, pC):
    if len(pA.terminals) != 1 or len(pB.terminals) != 2 or len(pC.terminals) != 1:
        raise ValueError("two-cut sampling needs a rank-3, rank-5, rank-3 cascade")
    (ra, c1) = pA.terminals[0]
    (rb1, b1), (rb2, b2) = pB.terminals
    (rc, c2) = pC.terminals[0]
    if not (ra == "a" and rb1 == "e" and b1 == c1 and rb2 == "a" and b2 == c2 and rc == "e"):
        raise ValueError(f"tensors {pA.terminals}, {pB.terminals}, {pC.terminals} are not an A -> B -> C cascade")
    return c1, c2


def _slice_target(pB, pC, e1: int, beta1: int) -> _Target:
    # pB axes: bits, e1, beta1, a2, beta2
    return _Target.build(pB.values[:, e1, beta1], pB.output_wires, pC.values, pC.output_wires)


def _assemble_bc(pB, pC, slice_hists, cut1: int) -> SparseTensor:
    wires = slice_hists[0].wires
    keys = np.array(sorted(set().union(*(h.counts for h in slice_hists))), dtype=np.int64)
    values = np.zeros((keys.size, 2, 3))
    index = {k: i for i, k in enumerate(keys.tolist())}
    for (e, b), hist in zip(SLICES, slice_hists):
        for x, c in hist.counts.items():
            values[index[x], e, int(b)] = c / hist.total
    return SparseTensor(keys, values, wires, (("e", cut1),))


def _slice_histogram(target, steps, burn, rng, cfg):
    state, recorded = _walk(target, steps, burn, rng, cfg.ratio_floor, cfg.init)
    hist = Histogram(target.wires, _count(recorded), int(recorded.size), [state])
    if hist.total == 0:
        raise ZeroTargetError("slice recorded no samples; lower the burn-in or raise the sample count")
    return hist


def _finish(pA, p_bc, cfg, final_seq, slice_hists, width) -> QuasiDistribution:
    final = _sample(_one_cut_target(pA, p_bc), cfg, final_seq)
    q = final.to_distribution(width)
    q.diagnostics = {
        "final": final.diagnostics,
        "slice_counts": [h.chains[0].steps for h in slice_hists],
        "slice_recorded": [h.total for h in slice_hists],
        "slice_acceptance_rate": [h.chains[0].acceptance_rate for h in slice_hists],
        "slice_floor_hits": [h.chains[0].floor_hits for h in slice_hists],
    }
    return q


def _width(*tensors) -> int:
    return sum(len(t.output_wires) for t in tensors)


def mh_two_cut_full(pA, pB, pC, cfg: MhConfig) -> QuasiDistribution:
    """Two-cut cascade: one walker per ``(e1, beta1)`` slice of the B-C contraction, then one-cut sampling.

    Every slice walker takes ``cfg.samples`` steps; its histogram divided by
    its recorded count becomes that slice of the sampled B-C table.
    """
    cut1, _ = _cascade(pA, pB, pC)
    slice_seq, final_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    hists = []
    for (e, b), child in zip(SLICES, slice_seq.spawn(len(SLICES))):
        target = _slice_target(pB, pC, e, int(b))
        hists.append(_slice_histogram(target, cfg.samples, cfg.burn_steps, np.random.default_rng(child), cfg))
    p_bc = _assemble_bc(pB, pC, hists, cut1)
    return _finish(pA, p_bc, cfg, final_seq, hists, _width(pA, pB, pC))


def slice_schedule(n: int, rng: np.random.Generator, k: int = len(SLICES)) -> np.ndarray:
    """Draw slices uniformly until every one has been chosen ``n`` times; returns steps per slice."""
    draws = np.empty(0, dtype=np.int64)
    while True:
        draws = np.concatenate([draws, rng.integers(0, k, size=k * n + 64)])
        if np.all(np.bincount(draws, minlength=k) >= n):
            break
    # the run stops at the step where the last slice reaches n
    stop = max(np.flatnonzero(draws == i)[n - 1] for i in range(k)) + 1
    return np.bincount(draws[:stop], minlength=k)


def mh_two_cut_randomized(pA, pB, pC, cfg: MhConfig) -> QuasiDistribution:
    """As :func:`mh_two_cut_full`, but each iteration advances one uniformly drawn slice walker.

    Iteration stops once every slice has taken ``cfg.samples`` steps. Walkers
    are independent, so each slice is run for its drawn number of steps.
    """
    cut1, _ = _cascade(pA, pB, pC)
    slice_seq, final_seq, schedule_seq = np.random.SeedSequence(cfg.seed).spawn(3)
    steps = slice_schedule(cfg.samples, np.random.default_rng(schedule_seq))
    hists = []
    for (e, b), child, n in zip(SLICES, slice_seq.spawn(len(SLICES)), steps):
        target = _slice_target(pB, pC, e, int(b))
        hists.append(_slice_histogram(target, int(n), cfg.burn_steps, np.random.default_rng(child), cfg))
    p_bc = _assemble_bc(pB, pC, hists, cut1)
    return _finish(pA, p_bc, cfg, final_seq, hists, _width(pA, pB, pC))


def mh_reconstruct(tensors, cfg: MhConfig, randomized: bool = False) -> QuasiDistribution:
    """Dispatch on the number of cuts: one cut samples directly, a two-cut cascade goes slice-wise."""
    tensors = list(tensors)
    if len(tensors) == 2:
        if randomized:
            raise ValueError("randomized indexing applies to two-cut cascades only")
        return mh_one_cut(*tensors, cfg).to_distribution(_width(*tensors))
    if len(tensors) == 3:
        # order by role in the cascade: A has only ("a", c1), C has only ("e", c2)
        ends = [t for t in tensors if len(t.terminals) == 1]
        mids = [t for t in tensors if len(t.terminals) == 2]
        if len(ends) != 2 or len(mids) != 1:
            raise ValueError("expected a three-tensor cascade")
        pA = next(t for t in ends if t.terminals[0][0] == "a")
        pC = next(t for t in ends if t.terminals[0][0] == "e")
        pB = mids[0]
        run = mh_two_cut_randomized if randomized else mh_two_cut_full
        return run(pA, pB, pC, cfg)
    raise ValueError(f"sampling supports one or two cuts, got {len(tensors)} tensors")
