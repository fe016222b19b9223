"""Distances between output distributions.

``avd_literal`` is sum_x (p(x) - q(x)) * mu(x) with mu = (p + q) / 2, which
simplifies to (sum p^2 - sum q^2) / 2 and is antisymmetric in its arguments.
``avd_abs`` uses |p(x) - q(x)| instead and is what experiments report.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import QuasiDistribution

NORM_TOL = 1e-6


@dataclass(frozen=True)
class DistanceReport:
    avd_literal: float
    avd_abs: float
    tv: float

    def as_dict(self) -> dict:
        return {"avd_abs": self.avd_abs, "avd_literal": self.avd_literal, "tv": self.tv}


def _aligned(p, q):
    """Two arrays over the union of supports; missing entries read as zero."""
    def as_map_or_array(d):
        if isinstance(d, QuasiDistribution):
            return d.weights
        return d

    p, q = as_map_or_array(p), as_map_or_array(q)
    if isinstance(p, dict) or isinstance(q, dict):
        if not isinstance(p, dict):
            p = {i: v for i, v in enumerate(np.asarray(p, dtype=float).tolist()) if v != 0}
        if not isinstance(q, dict):
            q = {i: v for i, v in enumerate(np.asarray(q, dtype=float).tolist()) if v != 0}
        keys = sorted(set(p) | set(q))
        return (
            np.array([p.get(k, 0.0) for k in keys], dtype=float),
            np.array([q.get(k, 0.0) for k in keys], dtype=float),
        )
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distributions over different spaces: {p.shape} vs {q.shape}")
    return p, q


def avg_variational_distance(p, q, tol: float = NORM_TOL) -> DistanceReport:
    """Compare two normalized distributions (arrays, ``{key: weight}`` maps or QuasiDistributions)."""
    p, q = _aligned(p, q)
    for name, d in (("p", p), ("q", q)):
        s = d.sum()
        if abs(s - 1.0) > tol:
            raise ValueError(f"{name} is not normalized (sum = {s!r})")
    diff = p - q
    mu = 0.5 * (p + q)
    return DistanceReport(
        avd_literal=float(np.dot(diff, mu)),
        avd_abs=float(np.dot(np.abs(diff), mu)),
        tv=float(0.5 * np.abs(diff).sum()),
    )


def total_variation(p, q) -> float:
    p, q = _aligned(p, q)
    return float(0.5 * np.abs(p - q).sum())
