"""File formats: subcircuit tensors, distributions and partition descriptors.

Tensor files come in two flavours with the same header
``{rank, shape, labels, output_wires, terminals, mode, shots, seed}``:

* JSON: ``{"header": {...}, "values": [row-major floats]}``
* binary: ``b"CUTT"``, little-endian uint32 header length, UTF-8 JSON header,
  then row-major little-endian float64 values.

Distributions are CSV ``bitstring,weight`` sorted by bit string, where
character ``k`` of the bit string is qubit ``k``, or JSON
``{"width", "normalized", "weights": {bitstring: weight}}``.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .circuit import Circuit, Partition, render_circuit
from .simulator import SubcircuitTensor
from .tensors import QuasiDistribution, bits_to_int, int_to_bits

MAGIC = b"CUTT"


class FormatError(ValueError):
    """A file that does not follow one of the formats above."""


# ---------------------------------------------------------------------------
# tensors


def tensor_header(t: SubcircuitTensor) -> dict:
    return {
        "rank": t.rank,
        "shape": list(t.values.shape),
        "labels": list(t.labels),
        "output_wires": list(t.output_wires),
        "terminals": [[role, cut] for role, cut in t.terminals],
        "mode": t.mode,
        "shots": t.shots,
        "seed": t.seed,
    }


def _tensor_from(header: dict, values) -> SubcircuitTensor:
    try:
        shape = tuple(header["shape"])
        arr = np.asarray(values, dtype=float).reshape(shape)
        t = SubcircuitTensor(
            arr,
            tuple(int(w) for w in header["output_wires"]),
            tuple((str(r), int(c)) for r, c in header["terminals"]),
            mode=header.get("mode", "exact"),
            shots=header.get("shots"),
            seed=header.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad tensor data: {exc}") from exc
    if header.get("rank", t.rank) != t.rank or list(header.get("labels", t.labels)) != list(t.labels):
        raise FormatError("tensor header rank/labels disagree with its layout")
    return t


def save_tensor(t: SubcircuitTensor, path) -> None:
    path = Path(path)
    header = tensor_header(t)
    if path.suffix == ".json":
        path.write_text(json.dumps({"header": header, "values": t.values.ravel().tolist()}))
        return
    blob = json.dumps(header).encode()
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(t.values, dtype="<f8").tobytes())


def load_tensor(path) -> SubcircuitTensor:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == MAGIC:
        (n,) = struct.unpack("<I", data[4:8])
        header = json.loads(data[8 : 8 + n])
        values = np.frombuffer(data[8 + n :], dtype="<f8")
        return _tensor_from(header, values)
    try:
        doc = json.loads(data)
        return _tensor_from(doc["header"], doc["values"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"{path}: not a tensor file ({exc})") from exc


# ---------------------------------------------------------------------------
# distributions


def _sorted_rows(q: QuasiDistribution, include_zeros: bool):
    if q.is_dense and include_zeros:
        rows = ((int_to_bits(x, q.width), float(w)) for x, w in enumerate(q.weights.tolist()))
    else:
        rows = ((int_to_bits(x, q.width), float(w)) for x, w in q.items())
    return sorted(rows)


def write_distribution_csv(q: QuasiDistribution, path, include_zeros: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bitstring", "weight"])
        for bits, w in _sorted_rows(q, include_zeros):
            writer.writerow([bits, repr(w)])


def read_distribution_csv(path) -> QuasiDistribution:
    weights = {}
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["bitstring", "weight"]:
            raise FormatError(f"{path}: expected header 'bitstring,weight', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected two columns")
            bits, w = row
            if width is None:
                width = len(bits)
            elif len(bits) != width:
                raise FormatError(f"{path}:{lineno}: bit string length {len(bits)} != {width}")
            try:
                weights[bits_to_int(bits)] = float(w)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if width is None:
        raise FormatError(f"{path}: no rows")
    return QuasiDistribution(width, weights)


def write_distribution_json(q: QuasiDistribution, path) -> None:
    doc = {
        "width": q.width,
        "normalized": q.normalized,
        "weights": {bits: w for bits, w in _sorted_rows(q, include_zeros=False)},
    }
    if q.report is not None:
        doc["report"] = q.report
    Path(path).write_text(json.dumps(doc, indent=1))


def read_distribution_json(path) -> QuasiDistribution:
    try:
        doc = json.loads(Path(path).read_text())
        width = int(doc["width"])
        weights = {bits_to_int(b): float(w) for b, w in doc["weights"].items()}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: not a distribution file ({exc})") from exc
    return QuasiDistribution(width, weights, normalized=bool(doc.get("normalized", False)), report=doc.get("report"))


def read_distribution(path) -> QuasiDistribution:
    if str(path).endswith(".json"):
        return read_distribution_json(path)
    return read_distribution_csv(path)


def write_distribution(q: QuasiDistribution, path) -> None:
    if str(path).endswith(".json"):
        write_distribution_json(q, path)
    else:
        write_distribution_csv(q, path)


# ---------------------------------------------------------------------------
# partitions


def partition_to_dict(partition: Partition) -> dict:
    subs = []
    for sub in partition.subcircuits:
        local = Circuit(sub.width, sub.gates) if sub.width else None
        subs.append({
            "index": sub.index,
            "width": sub.width,
            "segments": [
                {"wire": s.wire, "piece": s.piece, "init_cut": s.init_cut, "meas_cut": s.meas_cut}
                for s in sub.segments
            ],
            "gate_indices": list(sub.gate_indices),
            "output_wires": list(sub.output_wires),
            "terminals": [[r, c] for r, c in sub.terminals],
            "rank": sub.rank,
            "circuit": render_circuit(local) if local is not None else "",
        })
    return {
        "width": partition.width,
        "circuit": render_circuit(partition.circuit),
        "cut_roles": [{"cut": k, "upstream": u, "downstream": d} for k, (u, d) in enumerate(partition.cut_roles)],
        "subcircuits": subs,
    }

