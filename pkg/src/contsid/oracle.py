"""Closed-form ground truth for linear-Gaussian models.

Every quantity here is independent of the kernel-embedding estimators it is
used to check: interventional and adjusted marginals come from exact
mean/covariance propagation, and the RBF kernel distance between univariate
Gaussians comes from the Gaussian integral

    E exp(-(X - Y)^2 / (2 g^2)) = g / sqrt(g^2 + v1 + v2)
                                  * exp(-(m1 - m2)^2 / (2 (g^2 + v1 + v2)))

for independent X ~ N(m1, v1), Y ~ N(m2, v2), which follows from completing
the square in the N(m1 - m2, v1 + v2) integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError, EmptyInputError, NonGaussianError, OverlapError
from .synth import LinearScm


@dataclass(frozen=True)
class GaussianLaw:
    mean: float
    variance: float

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.variance)):
            raise DomainError("Gaussian parameters must be finite")
        if self.variance < 0:
            raise DomainError(f"variance must be nonnegative, got {self.variance!r}")


def _require_gaussian(scm: LinearScm) -> None:
    for d, spec in enumerate(scm.noise):
        if spec.family != "gaussian":
            raise NonGaussianError(f"node {d} has {spec.family} noise")


def _weight_matrix(scm: LinearScm) -> np.ndarray:
    n = scm.dag.num_nodes
    w = np.zeros((n, n))
    for (i, j), coeff in scm.coefficients.items():
        w[i, j] = coeff
    return w


def gaussian_moments(scm: LinearScm) -> tuple[np.ndarray, np.ndarray]:
    """Observational mean vector and covariance matrix of an all-Gaussian SEM."""
    _require_gaussian(scm)
    n = scm.dag.num_nodes
    m = np.eye(n) - _weight_matrix(scm).T
    minv = np.linalg.solve(m, np.eye(n))
    noise_mean = np.array([spec.mean for spec in scm.noise])
    noise_var = np.array([spec.std ** 2 for spec in scm.noise])
    mean = minv @ noise_mean
    cov = minv @ np.diag(noise_var) @ minv.T
    return mean, cov


def observational_gaussian(scm: LinearScm, j: int) -> GaussianLaw:
    """Observational marginal of node j."""
    mean, cov = gaussian_moments(scm)
    return GaussianLaw(float(mean[j]), float(cov[j, j]))


def interventional_gaussian(scm: LinearScm, i: int, x_hat: float, j: int) -> GaussianLaw:
    """Marginal of node j after clamping node i to ``x_hat``.

    Propagates moments through the mutilated graph: edges into i removed,
    X_i made deterministic.
    """
    _require_gaussian(scm)
    n = scm.dag.num_nodes
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"nodes ({i}, {j}) out of range for {n} nodes")
    if i == j:
        raise ValueError("i and j must differ")
    w = _weight_matrix(scm)
    w[:, i] = 0.0
    m = np.eye(n) - w.T
    minv = np.linalg.solve(m, np.eye(n))
    noise_mean = np.array([spec.mean for spec in scm.noise])
    noise_var = np.array([spec.std ** 2 for spec in scm.noise])
    noise_mean[i] = x_hat
    noise_var[i] = 0.0
    mean = minv @ noise_mean
    cov = minv @ np.diag(noise_var) @ minv.T
    return GaussianLaw(float(mean[j]), float(cov[j, j]))


def adjusted_gaussian(scm: LinearScm, i: int, x_hat: float, j: int,
                      adjustment: Iterable[int]) -> GaussianLaw:
    """Law of the adjustment formula integral p(x_j | x_hat, z) p(z) dz.

    This is what a graph claiming adjustment set ``adjustment`` for the pair
    (i, j) predicts for the intervention; it equals the true interventional
    marginal exactly when the set is valid.
    """
    z = tuple(sorted(int(v) for v in set(adjustment)))
    if i in z or j in z:
        raise OverlapError(f"adjustment set {z} intersects {{{i}, {j}}}")
    if i == j:
        raise ValueError("i and j must differ")
    mean, cov = gaussian_moments(scm)
    cond = (i, *z)
    scc = cov[np.ix_(cond, cond)]
    scj = cov[np.ix_(cond, (j,))].ravel()
    beta = np.linalg.solve(scc, scj)
    var_cond = float(cov[j, j] - scj @ beta)
    adj_mean = float(mean[j] + beta[0] * (x_hat - mean[i]))
    adj_var = var_cond
    if z:
        beta_z = beta[1:]
        adj_var += float(beta_z @ cov[np.ix_(z, z)] @ beta_z)
    return GaussianLaw(adj_mean, max(adj_var, 0.0))


def _expected_rbf(m1: float, v1: float, m2: float, v2: float, bandwidth: float) -> float:
    s = bandwidth * bandwidth + v1 + v2
    return bandwidth / np.sqrt(s) * np.exp(-((m1 - m2) ** 2) / (2.0 * s))


def gaussian_rbf_mmd(p: GaussianLaw, q: GaussianLaw, bandwidth: float) -> float:
    """Exact RBF kernel distance between two univariate Gaussians.

    The naive radicand T(p,p) + T(q,q) - 2 T(p,q) cancels catastrophically
    for nearby laws (equal inputs would come out around 1e-8 instead of 0),
    so it is rewritten using (g^2 + 2 v1)(g^2 + 2 v2) = s^2 - (v1 - v2)^2
    with s = g^2 + v1 + v2:

        MMD^2 = (sqrt(T_pp) - sqrt(T_qq))^2
                + 2 g / sqrt(s) * [(1 - u^2)^(-1/4) - exp(-t)]

    where u = (v1 - v2) / s and t = (m1 - m2)^2 / (2 s).  Both summands are
    nonnegative and vanish exactly for equal laws.
    """
    b = float(bandwidth)
    if not np.isfinite(b) or b <= 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth!r}")
    s = b * b + p.variance + q.variance
    t_pp = b / np.sqrt(b * b + 2.0 * p.variance)
    t_qq = b / np.sqrt(b * b + 2.0 * q.variance)
    u = (p.variance - q.variance) / s
    t = (p.mean - q.mean) ** 2 / (2.0 * s)
    bracket = np.expm1(-0.25 * np.log1p(-u * u)) - np.expm1(-t)
    mmd2 = (np.sqrt(t_pp) - np.sqrt(t_qq)) ** 2 + 2.0 * (b / np.sqrt(s)) * bracket
    return float(np.sqrt(max(mmd2, 0.0)))


def _mean_kernel(xs: np.ndarray, ys: np.ndarray, bandwidth: float,
                 block: int = 4096) -> float:
    # Blockwise with in-place ops so sample counts in the tens of thousands
    # stay cheap on memory; exp dominates the cost either way.
    scale = -1.0 / (2.0 * bandwidth * bandwidth)
    total = 0.0
    for s in range(0, xs.size, block):
        xa = xs[s:s + block][:, None]
        for t in range(0, ys.size, block):
            work = xa - ys[t:t + block][None, :]
            np.multiply(work, work, out=work)
            work *= scale
            np.exp(work, out=work)
            total += float(work.sum())
    return total / (xs.size * ys.size)


def _checked_samples(samples_a, samples_b, bandwidth) -> tuple:
    b = float(bandwidth)
    if not np.isfinite(b) or b <= 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth!r}")
    xs = np.asarray(samples_a, dtype=float).ravel()
    ys = np.asarray(samples_b, dtype=float).ravel()
    if xs.size == 0 or ys.size == 0:
        raise EmptyInputError("both sample lists must be non-empty")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise DomainError("samples must be finite")
    return xs, ys, b


def empirical_mmd(samples_a, samples_b, bandwidth: float) -> float:
    """Biased (V-statistic) RBF kernel distance between two sample lists."""
    xs, ys, b = _checked_samples(samples_a, samples_b, bandwidth)
    mmd2 = (
        _mean_kernel(xs, xs, b)
        + _mean_kernel(ys, ys, b)
        - 2.0 * _mean_kernel(xs, ys, b)
    )
    return float(np.sqrt(max(mmd2, 0.0)))


def _kernel_row_means(xs: np.ndarray, ys: np.ndarray, bandwidth: float,
                      block: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    scale = -1.0 / (2.0 * bandwidth * bandwidth)
    rows = np.zeros(xs.size)
    cols = np.zeros(ys.size)
    for s in range(0, xs.size, block):
        xa = xs[s:s + block][:, None]
        for t in range(0, ys.size, block):
            work = xa - ys[t:t + block][None, :]
            np.multiply(work, work, out=work)
            work *= scale
            np.exp(work, out=work)
            rows[s:s + block] += work.sum(axis=1)
            cols[t:t + block] += work.sum(axis=0)
    return rows / ys.size, cols / xs.size


def empirical_mmd_with_error(samples_a, samples_b, bandwidth: float) -> tuple[float, float]:
    """Empirical MMD plus its first-order Monte-Carlo standard error.

    The error comes from the Hajek projection of the V-statistic: with
    u_i = mean_j k(x_i, x_j), w_i = mean_j k(x_i, y_j) (and v, z the same
    roles for the second sample), Var(MMD^2) ~ 4 Var(u - w)/n + 4 Var(v - z)/m
    and the delta method divides by 2 MMD.  Useful for judging whether an
    observed discrepancy from a closed form is explained by sampling noise.
    """
    xs, ys, b = _checked_samples(samples_a, samples_b, bandwidth)
    u, _ = _kernel_row_means(xs, xs, b)
    v, _ = _kernel_row_means(ys, ys, b)
    w, z = _kernel_row_means(xs, ys, b)
    mmd2 = float(u.mean() + v.mean() - 2.0 * w.mean())
    mmd = float(np.sqrt(max(mmd2, 0.0)))
    var2 = 4.0 * float(np.var(u - w)) / xs.size + 4.0 * float(np.var(v - z)) / ys.size
    if mmd < 1e-8:
        return mmd, float("inf")
    return mmd, float(np.sqrt(max(var2, 0.0)) / (2.0 * mmd))
