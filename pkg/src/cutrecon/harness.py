"""Experiment driver: random cut cascades, reconstruction sweeps, CSV reports.

A cascade of ``K + 1`` random subcircuits shares one wire between neighbours.
Subcircuit ``i + 1`` starts with a CX whose control is the shared wire and
whose target is its next wire; the cut sits on the shared wire just before
that CX. With subcircuit widths ``w_0 .. w_K`` the circuit has
``sum(w) - K`` qubits.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import Circuit, CutMarker, Gate, partition_circuit
from .metrics import avg_variational_distance
from .reconstruct_exact import reconstruct_from_queries
from .reconstruct_mcmc import MhConfig, mh_reconstruct
from .simulator import born_probabilities, build_tensors
from .tensors import DENSE_LIMIT

ONE_QUBIT_KINDS = ("H", "S", "T", "RX", "RY", "RZ")
METHODS = ("exact", "mcmc_full", "mcmc_randomized")
SAMPLES_PER_QUBIT = 4096
ROW_FIELDS = [
    "width", "trial", "trial_seed", "cuts", "qubits", "method", "samples",
    "avd_abs", "avd_literal", "tv", "seconds", "status", "note",
]
TIMING_FIELDS = ("seconds",)


def random_subcircuit(width: int, depth: int, rng: np.random.Generator) -> list[Gate]:
    """Layers of one random single-qubit gate per qubit followed by random disjoint CX pairs."""
    if width < 1 or depth < 1:
        raise ValueError("width and depth must be positive")
    gates = []
    for _ in range(depth):
        for q in range(width):
            kind = ONE_QUBIT_KINDS[rng.integers(len(ONE_QUBIT_KINDS))]
            angle = float(rng.uniform(0, 2 * np.pi)) if kind.startswith("R") else None
            gates.append(Gate(kind, (q,), angle))
        order = rng.permutation(width)
        for i in range(0, width - 1, 2):
            if rng.random() < 0.5:
                gates.append(Gate("CX", (int(order[i]), int(order[i + 1]))))
    return gates


def _connected(width: int, gates, extra_edges=()) -> bool:
    parent = list(range(width))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in [g.qubits for g in gates if g.arity == 2] + list(extra_edges):
        parent[find(a)] = find(b)
    return len({find(q) for q in range(width)}) == 1


def _connected_fragment(width, depth, rng, extra_edges=(), attempts=1000):
    for _ in range(attempts):
        gates = random_subcircuit(width, depth, rng)
        if _connected(width, gates, extra_edges):
            return gates
    raise RuntimeError(f"could not draw a connected {width}-qubit fragment in {attempts} attempts")


def cascade_circuit(widths, depth: int | None, rng: np.random.Generator) -> Circuit:
    """Random cascade of ``len(widths)`` subcircuits with one cut between neighbours."""
    widths = list(widths)
    if len(widths) < 2:
        raise ValueError("a cut experiment needs at least two subcircuits (one cut)")
    if any(w < 2 for w in widths[1:]) or widths[0] < 1:
        raise ValueError("downstream subcircuits need at least two qubits")
    gates: list[Gate] = []
    cuts = []
    offset = 0
    for i, w in enumerate(widths):
        d = depth if depth is not None else w
        if i == 0:
            local = _connected_fragment(w, d, rng)
        else:
            shared = offset
            last_on_shared = max(j for j, g in enumerate(gates) if shared in g.qubits)
            cuts.append(CutMarker(shared, last_on_shared))
            local = [Gate("CX", (0, 1))] + _connected_fragment(w, d, rng, extra_edges=[(0, 1)])
        gates += [Gate(g.kind, tuple(q + offset for q in g.qubits), g.angle) for g in local]
        offset += w - 1
    return Circuit(offset + 1, gates, cuts)


@dataclass(frozen=True)
class ExperimentSpec:
    cuts: int = 1
    subcircuit_width: int = 3
    depth: int | None = None
    trials: int = 30
    samples: int | None = None
    burn_in: float = 0.2
    chains: int = 4
    shots: int | None = None
    seed: int = 0
    methods: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.cuts < 1:
            raise ValueError("experiment requires at least one cut")
        if self.cuts > 2:
            raise ValueError("experiments cover one or two cuts")
        if self.subcircuit_width < 2:
            raise ValueError("subcircuit width must be at least 2")
        if self.total_width > DENSE_LIMIT and "exact" in self.method_list:
            raise ValueError(f"exact reconstruction limited to {DENSE_LIMIT} qubits")
        for m in self.method_list:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")

    @property
    def total_width(self) -> int:
        return (self.cuts + 1) * self.subcircuit_width - self.cuts

    @property
    def method_list(self) -> tuple[str, ...]:
        if self.methods is not None:
            return tuple(self.methods)
        return METHODS if self.cuts == 2 else METHODS[:2]

    @property
    def sample_count(self) -> int:
        return self.samples if self.samples is not None else SAMPLES_PER_QUBIT * self.subcircuit_width

    def mh_config(self, seed: int) -> MhConfig:
        return MhConfig(self.sample_count, self.burn_in, self.chains, seed)


def build_cut_experiment(spec: ExperimentSpec, rng: np.random.Generator) -> tuple[Circuit, tuple[CutMarker, ...]]:
    circuit = cascade_circuit([spec.subcircuit_width] * (spec.cuts + 1), spec.depth, rng)
    return circuit.without_cuts(), circuit.cuts


def trial_seed(master: int, width: int, trial: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(width, trial)).generate_state(1, np.uint64)[0] >> 1)


@dataclass
class ExperimentRecord:
    width: int
    trial: int
    trial_seed: int
    cuts: int
    qubits: int
    results: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for method, res in self.results.items():
            row = {f: "" for f in ROW_FIELDS}
            row.update(width=self.width, trial=self.trial, trial_seed=self.trial_seed,
                       cuts=self.cuts, qubits=self.qubits, method=method)
            row.update(res)
            out.append(row)
        return out


def _run_method(method, tensors, spec, seed):
    if method == "exact":
        start = time.perf_counter()
        raw = reconstruct_from_queries(tensors)
        seconds = time.perf_counter() - start
        return raw.normalize(), seconds, ""
    if method == "mcmc_randomized" and spec.cuts != 2:
        return None, None, "randomized indexing needs two cuts"
    cfg = spec.mh_config(seed)
    start = time.perf_counter()
    q = mh_reconstruct(tensors, cfg, randomized=method == "mcmc_randomized")
    return q, time.perf_counter() - start, ""


def run_trial(spec: ExperimentSpec, trial: int) -> ExperimentRecord:
    seed = trial_seed(spec.seed, spec.subcircuit_width, trial)
    rng = np.random.default_rng(seed)
    circuit, cuts = build_cut_experiment(spec, rng)
    record = ExperimentRecord(spec.subcircuit_width, trial, seed, spec.cuts, circuit.width)
    try:
        oracle = born_probabilities(circuit)
        tensors = build_tensors(partition_circuit(circuit.with_cuts(cuts)), shots=spec.shots, seed=seed)
    except Exception as exc:  # noqa: BLE001 - recorded per trial
        for method in spec.method_list:
            record.results[method] = {"status": "error", "note": f"{type(exc).__name__}: {exc}"}
        return record
    for method in spec.method_list:
        try:
            q, seconds, skip = _run_method(method, tensors, spec, seed)
        except Exception as exc:  # noqa: BLE001 - recorded per trial
            record.results[method] = {"status": "error", "note": f"{type(exc).__name__}: {exc}"}
            continue
        if q is None:
            record.results[method] = {"status": "skipped", "note": skip}
            continue
        dist = avg_variational_distance(q, oracle)
        record.results[method] = {
            "samples": spec.sample_count if method != "exact" else "",
            "status": "ok",
            "seconds": seconds,
            **dist.as_dict(),
        }
    return record


def run_sweep(spec: ExperimentSpec, widths) -> list[dict]:
    """Every trial at every subcircuit width; long-format rows, one per (width, trial, method)."""
    rows = []
    for w in widths:
        ws = replace(spec, subcircuit_width=int(w))
        for trial in range(ws.trials):
            rows += run_trial(ws, trial).rows()
    return rows


def summarize(rows, value: str = "avd_abs") -> list[dict]:
    """Median and 25th/75th percentiles of ``value`` (and median seconds) per width and method."""
    groups = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        groups.setdefault((int(row["width"]), row["method"]), []).append(row)
    out = []
    for (width, method), group in sorted(groups.items()):
        vals = np.array([float(r[value]) for r in group])
        secs = np.array([float(r["seconds"]) for r in group])
        q25, med, q75 = np.percentile(vals, [25, 50, 75])
        out.append({
            "width": width, "method": method, "n": len(group), "metric": value,
            "median": float(med), "q25": float(q25), "q75": float(q75),
            "median_seconds": float(np.median(secs)),
        })
    return out


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def write_rows(rows, path, fields=None) -> None:
    fields = fields or (ROW_FIELDS if rows and set(rows[0]) <= set(ROW_FIELDS) else list(rows[0]) if rows else ROW_FIELDS)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in fields})


def parse_widths(text: str) -> list[int]:
    """``"2-5"`` or ``"2,4,6"`` (or a mix) to a list of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out += list(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError(f"no widths in {text!r}")
    return out
