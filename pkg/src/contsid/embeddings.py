"""Conditional-mean-embedding machinery.

Fitting the embedding of X_j given conditioning variables is ridge regression
in a vector-valued RKHS; with the identity-scaled product kernel the fitted
coefficients collapse to W = (K + N*lambda*I)^{-1} applied to kernel vectors.
W is kept as a Cholesky factorization and applied by triangular solves, never
materialized in the hot path.

An intervention mean embedding for do(X_i = x_hat) in a graph with adjustment
set Z averages the fitted conditional embedding over the observed marginal of
Z: the resulting RKHS element is sum_n alpha[n] * k(x_j^(n), .) with

    alpha = W v,     v[n] = k_i(x_i^(n), x_hat) * mean_m prod_{d in Z}
                                              k_d(z_d^(n), z_d^(m))

so one weight matrix per (graph, intervened node) serves every target column
and every intervention value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import (
    ColumnMismatchError,
    DomainError,
    FactorizationError,
    SizeMismatchError,
)
from .kernels import GramMatrix, KernelConfig


@dataclass(frozen=True)
class RegressionWeights:
    """W = (K + N*lambda*I)^{-1} for one (graph, intervened node) pair.

    Stored as a lower Cholesky factor of K + N*lambda*I; ``solve`` applies W,
    ``dense`` reconstitutes it (tests only).
    """

    factor: np.ndarray
    lam: float
    n: int
    conditioning_columns: tuple[int, ...] = ()
    graph_tag: str | None = None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Return W @ rhs for a vector or matrix right-hand side."""
        b = np.asarray(rhs, dtype=float)
        if b.shape[0] != self.n:
            raise SizeMismatchError(f"rhs has {b.shape[0]} rows, weights expect {self.n}")
        return cho_solve((self.factor, True), b)

    def dense(self) -> np.ndarray:
        return self.solve(np.eye(self.n))


def _gram_values(k) -> np.ndarray:
    values = k.values if isinstance(k, GramMatrix) else np.asarray(k, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise SizeMismatchError(f"expected a square Gram matrix, got shape {values.shape}")
    return values


def fit_regression_weights(k, lam: float, conditioning_columns: Iterable[int] = (),
                           graph_tag: str | None = None) -> RegressionWeights:
    """Factorize K + N*lambda*I for a symmetric self-Gram K.

    A failed Cholesky factorization is retried once with 1e-8 * N jitter on
    the diagonal, then surfaces as FactorizationError (lambda too small or a
    corrupt Gram).
    """
    values = _gram_values(k)
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise DomainError(f"regularization must be positive, got {lam!r}")
    n = values.shape[0]
    system = values + n * lam * np.eye(n)
    try:
        factor, _ = cho_factor(system, lower=True)
    except LinAlgError:
        try:
            factor, _ = cho_factor(system + 1e-8 * n * np.eye(n), lower=True)
        except LinAlgError as exc:
            raise FactorizationError(
                f"kernel system of size {n} is not positive definite "
                f"(lambda={lam:g})") from exc
    return RegressionWeights(factor=factor, lam=lam, n=n,
                             conditioning_columns=tuple(conditioning_columns),
                             graph_tag=graph_tag)


@dataclass(frozen=True)
class EmbeddingCoefficients:
    """RKHS element sum_n alpha[n] * k(x_j^(n), .) over one anchor sample."""

    alpha: np.ndarray
    anchor_column: int | None = None

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float).ravel()
        if a.size == 0 or not np.isfinite(a).all():
            raise DomainError("coefficients must be a non-empty finite vector")
        object.__setattr__(self, "alpha", a)


def observational_coefficients(n: int) -> EmbeddingCoefficients:
    """Uniform 1/N coefficients: the empirical mean embedding."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    return EmbeddingCoefficients(alpha=np.full(n, 1.0 / n))


def ime_coefficients(x_hat: float, data: np.ndarray, i: int, adj: Iterable[int],
                     weights: RegressionWeights, config: KernelConfig,
                     marginal_rows: np.ndarray | None = None) -> EmbeddingCoefficients:
    """Coefficients of the intervention mean embedding for do(X_i = x_hat).

    ``weights`` must have been fitted on the conditioning columns
    (i, *sorted(adj)) of this dataset.  ``marginal_rows`` restricts the rows
    used for the outer average over the adjustment marginal; by default the
    same N in-sample rows that fitted the weights are reused.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise SizeMismatchError(f"data must be 2-D, got shape {x.shape}")
    n = x.shape[0]
    cols = (int(i), *sorted(int(a) for a in set(adj)))
    if weights.conditioning_columns and tuple(weights.conditioning_columns) != cols:
        raise ColumnMismatchError(
            f"weights fitted on columns {weights.conditioning_columns}, need {cols}")
    if weights.n != n:
        raise ColumnMismatchError(f"weights fitted on {weights.n} rows, data has {n}")
    xf = float(x_hat)
    if not np.isfinite(xf):
        raise DomainError(f"intervention value must be finite, got {x_hat!r}")

    gi = config.bandwidth_for(cols[0])
    c = np.exp(-((x[:, cols[0]] - xf) ** 2) / (2.0 * gi * gi))

    rows = np.arange(n) if marginal_rows is None else np.asarray(marginal_rows, dtype=int)
    if rows.size == 0:
        raise SizeMismatchError("marginal_rows must be non-empty")
    r = np.ones(n)
    if len(cols) > 1:
        block = np.ones((n, rows.size))
        for d in cols[1:]:
            gd = config.bandwidth_for(d)
            diff = x[:, d][:, None] - x[rows, d][None, :]
            block *= np.exp(-(diff * diff) / (2.0 * gd * gd))
        r = block.mean(axis=1)

    alpha = weights.solve(c * r)
    return EmbeddingCoefficients(alpha=alpha)


def _distance_parts(a: EmbeddingCoefficients, b: EmbeddingCoefficients, k) -> tuple:
    values = _gram_values(k)
    if a.alpha.size != values.shape[0] or b.alpha.size != values.shape[0]:
        raise SizeMismatchError(
            f"coefficient lengths {a.alpha.size}, {b.alpha.size} do not match "
            f"Gram of size {values.shape[0]}")
    ka = values @ a.alpha
    return a.alpha, b.alpha, ka, values


def rkhs_distance(a: EmbeddingCoefficients, b: EmbeddingCoefficients, k) -> float:
    """RKHS norm of the difference of two embeddings sharing one anchor sample.

    The radicand can dip a hair below zero from rounding; it is clamped at
    zero before the square root.
    """
    alpha, beta, ka, values = _distance_parts(a, b, k)
    kb = values @ beta
    sq = float(alpha @ ka + beta @ kb - 2.0 * (alpha @ kb))
    return float(np.sqrt(max(sq, 0.0)))


def embedding_norm(a: EmbeddingCoefficients, k) -> float:
    """RKHS norm of one embedding; for uniform coefficients this is
    sqrt(sum of the Gram) / N."""
    values = _gram_values(k)
    if a.alpha.size != values.shape[0]:
        raise SizeMismatchError(
            f"coefficient length {a.alpha.size} does not match Gram of size "
            f"{values.shape[0]}")
    sq = float(a.alpha @ (values @ a.alpha))
    return float(np.sqrt(max(sq, 0.0)))
