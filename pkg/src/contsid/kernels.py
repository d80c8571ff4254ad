"""Gaussian RBF kernels on real columns: scalar and product evaluation, Gram
assembly, and the pairwise-median bandwidth rule.

The convention is k(x, y) = exp(-(x - y)^2 / (2 * gamma^2)) with one length
scale gamma per data column.  Kernels over several columns are plain products
of the per-column kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityError, DegenerateColumnError, DomainError

KERNEL_FAMILIES = ("gaussian_rbf",)
BANDWIDTH_RULES = ("median_heuristic", "fixed")


def _checked_bandwidth(bandwidth) -> float:
    b = float(bandwidth)
    if not np.isfinite(b) or b <= 0.0:
        raise DomainError(f"bandwidth must be positive and finite, got {bandwidth!r}")
    return b


@dataclass(frozen=True)
class KernelConfig:
    """Kernel choices pinned once for a whole computation.

    ``bandwidths`` maps column index -> RBF length scale.  Columns without an
    entry are resolved through ``bandwidth_rule``: ``median_heuristic`` fills
    them from data (see :func:`median_bandwidth`), ``fixed`` uses
    ``fixed_bandwidth`` everywhere.
    """

    family: str = "gaussian_rbf"
    bandwidths: Mapping[int, float] = field(default_factory=dict)
    regularization: float = 1e-2
    bandwidth_rule: str = "median_heuristic"
    fixed_bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if self.bandwidth_rule not in BANDWIDTH_RULES:
            raise DomainError(f"unknown bandwidth rule {self.bandwidth_rule!r}")
        lam = float(self.regularization)
        if not np.isfinite(lam) or lam <= 0.0:
            raise DomainError(f"regularization must be positive, got {self.regularization!r}")
        object.__setattr__(self, "regularization", lam)
        object.__setattr__(self, "fixed_bandwidth", _checked_bandwidth(self.fixed_bandwidth))
        clean = {int(c): _checked_bandwidth(b) for c, b in dict(self.bandwidths).items()}
        object.__setattr__(self, "bandwidths", clean)

    def bandwidth_for(self, column: int) -> float:
        """Bandwidth of ``column``; only the ``fixed`` rule can invent one."""
        if column in self.bandwidths:
            return self.bandwidths[column]
        if self.bandwidth_rule == "fixed":
            return self.fixed_bandwidth
        raise DomainError(f"no bandwidth resolved for column {column}")

    def with_bandwidths(self, mapping: Mapping[int, float]) -> "KernelConfig":
        merged = dict(self.bandwidths)
        merged.update(mapping)
        return KernelConfig(self.family, merged, self.regularization,
                            self.bandwidth_rule, self.fixed_bandwidth)


@dataclass(frozen=True)
class GramMatrix:
    """Kernel matrix between two point lists; ``symmetric`` marks self-Grams."""

    values: np.ndarray
    symmetric: bool = False

    @property
    def shape(self):
        return self.values.shape


def rbf_eval(x, y, bandwidth) -> float:
    """Gaussian RBF kernel between two reals, in (0, 1]."""
    b = _checked_bandwidth(bandwidth)
    xf, yf = float(x), float(y)
    if not (np.isfinite(xf) and np.isfinite(yf)):
        raise DomainError(f"kernel inputs must be finite, got {x!r}, {y!r}")
    return float(np.exp(-((xf - yf) ** 2) / (2.0 * b * b)))


def product_eval(point_a: Sequence[float], point_b: Sequence[float],
                 config: KernelConfig, columns: Sequence[int]) -> float:
    """Product of per-column RBF kernels over the listed columns."""
    a = np.asarray(point_a, dtype=float).ravel()
    b = np.asarray(point_b, dtype=float).ravel()
    if a.size != len(columns) or b.size != len(columns):
        raise ArityError(
            f"points of arity {a.size} and {b.size} do not match {len(columns)} columns")
    out = 1.0
    for k, col in enumerate(columns):
        out *= rbf_eval(a[k], b[k], config.bandwidth_for(col))
    return out


def gram(points_a, points_b, config: KernelConfig, columns: Sequence[int]) -> GramMatrix:
    """Product-kernel Gram matrix between two point lists.

    Each point is a tuple whose k-th coordinate lives on column
    ``columns[k]``; the result has one row per point of ``points_a`` and one
    column per point of ``points_b``.
    """
    same = points_a is points_b
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if len(columns) == 1 else a.reshape(1, -1)
    if b.ndim == 1:
        b = b.reshape(-1, 1) if len(columns) == 1 else b.reshape(1, -1)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != len(columns) or b.shape[1] != len(columns):
        raise ArityError(
            f"point arrays of shape {a.shape} and {b.shape} do not match "
            f"{len(columns)} columns")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DomainError("gram inputs must be finite")
    values = np.ones((a.shape[0], b.shape[0]))
    for k, col in enumerate(columns):
        g = config.bandwidth_for(col)
        diff = a[:, k][:, None] - b[:, k][None, :]
        values *= np.exp(-(diff * diff) / (2.0 * g * g))
    return GramMatrix(values=values, symmetric=same)


def median_bandwidth(column) -> float:
    """Median of all pairwise absolute differences of a column (lower median).

    Deterministic given the column.  Raises
    :class:`~contsid.errors.DegenerateColumnError` when fewer than two samples
    exist or the median gap is zero (all values equal, or mostly tied); the
    sensible fallback for degenerate columns is a fixed bandwidth of 1.0, but
    that choice is left to the caller.
    """
    x = np.asarray(column, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateColumnError("need at least two samples for the median heuristic")
    if not np.isfinite(x).all():
        raise DomainError("column contains non-finite values")
    iu = np.triu_indices(x.size, k=1)
    diffs = np.abs(x[:, None] - x[None, :])[iu]
    diffs.sort()
    med = float(diffs[(diffs.size - 1) // 2])
    if med <= 0.0:
        raise DegenerateColumnError("median pairwise gap is zero (degenerate column)")
    return med
