"""Synthetic ground truth: random DAGs, linear structural equation models,
and ancestral sampling for observational and interventional draws.

Randomness is PCG64 seeded through ``numpy.random.SeedSequence``; every
sampler spawns one child stream per node so that datasets are reproducible
bit-for-bit across platforms and interventions leave non-descendant streams
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .graph import Dag, build_dag

NOISE_FAMILIES = ("gaussian", "exponential", "shifted_exponential")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise distribution of one structural equation.

    ``gaussian`` uses (mean, std); the exponential families use ``scale``
    (the raw exponential is supported on [0, inf); the shifted variant is
    recentred to mean zero).
    """

    family: str = "gaussian"
    mean: float = 0.0
    std: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise DomainError(f"unknown noise family {self.family!r}")
        if self.family == "gaussian" and not self.std > 0:
            raise DomainError(f"gaussian std must be positive, got {self.std!r}")
        if self.family != "gaussian" and not self.scale > 0:
            raise DomainError(f"exponential scale must be positive, got {self.scale!r}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "gaussian":
            return rng.normal(self.mean, self.std, size)
        draw = rng.exponential(self.scale, size)
        if self.family == "shifted_exponential":
            draw = draw - self.scale
        return draw

    def to_dict(self) -> dict:
        if self.family == "gaussian":
            return {"family": "gaussian", "params": {"mean": self.mean, "std": self.std}}
        return {"family": self.family, "params": {"scale": self.scale}}

    @classmethod
    def from_dict(cls, payload: Mapping) -> "NoiseSpec":
        params = dict(payload.get("params", {}))
        return cls(family=str(payload["family"]), **params)


@dataclass(frozen=True)
class LinearScm:
    """Linear SEM: X_d = sum over parents p of w[p, d] * X_p + noise_d."""

    dag: Dag
    coefficients: Mapping[tuple[int, int], float]
    noise: tuple[NoiseSpec, ...] = field(default=())

    def __post_init__(self):
        coeffs = {(int(i), int(j)): float(w) for (i, j), w in dict(self.coefficients).items()}
        if set(coeffs) != set(self.dag.edges):
            raise DomainError("coefficient keys must be exactly the DAG edges")
        noise = tuple(self.noise) or tuple(NoiseSpec() for _ in range(self.dag.num_nodes))
        if len(noise) != self.dag.num_nodes:
            raise DomainError(
                f"need one noise spec per node, got {len(noise)} for {self.dag.num_nodes}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "noise", noise)

    def weight(self, i: int, j: int) -> float:
        return self.coefficients[(i, j)]

    def to_dict(self) -> dict:
        return {
            "nodes": self.dag.num_nodes,
            "edges": [
                {"from": i, "to": j, "weight": self.coefficients[(i, j)]}
                for i, j in sorted(self.dag.edges)
            ],
            "noise": [
                {"node": d, **self.noise[d].to_dict()}
                for d in range(self.dag.num_nodes)
            ],
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "LinearScm":
        n = int(payload["nodes"])
        edges = [(int(e["from"]), int(e["to"])) for e in payload["edges"]]
        coeffs = {(int(e["from"]), int(e["to"])): float(e["weight"]) for e in payload["edges"]}
        noise = [NoiseSpec() for _ in range(n)]
        for entry in payload.get("noise", []):
            noise[int(entry["node"])] = NoiseSpec.from_dict(entry)
        return cls(dag=build_dag(n, edges), coefficients=coeffs, noise=tuple(noise))


def erdos_renyi_dag(p: int, edge_prob: float, seed: int) -> Dag:
    """Random DAG: permute the nodes, then keep each forward pair with
    probability ``edge_prob``.  Acyclic by construction, deterministic per seed."""
    if p < 1:
        raise ValueError(f"need at least one node, got {p}")
    if not 0.0 <= edge_prob <= 1.0:
        raise DomainError(f"edge probability must lie in [0, 1], got {edge_prob!r}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(p)
    edges = []
    for a in range(p):
        for b in range(a + 1, p):
            if rng.random() < edge_prob:
                edges.append((int(perm[a]), int(perm[b])))
    return build_dag(p, edges)


def random_linear_scm(dag: Dag, coeff_low: float, coeff_high: float,
                      noise: NoiseSpec, seed: int) -> LinearScm:
    """Edge weights i.i.d. uniform on [coeff_low, coeff_high); the same noise
    spec is used for every node.  Deterministic per seed."""
    if not coeff_low < coeff_high:
        raise DomainError(f"need coeff_low < coeff_high, got [{coeff_low}, {coeff_high}]")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    coeffs = {edge: float(rng.uniform(coeff_low, coeff_high)) for edge in sorted(dag.edges)}
    return LinearScm(dag=dag, coefficients=coeffs,
                     noise=tuple(noise for _ in range(dag.num_nodes)))


def _node_noise(scm: LinearScm, n: int, seed: int, skip: int | None = None) -> list:
    streams = np.random.SeedSequence(seed).spawn(scm.dag.num_nodes)
    return [
        None if d == skip else scm.noise[d].sample(np.random.default_rng(streams[d]), n)
        for d in range(scm.dag.num_nodes)
    ]


def sample_observational(scm: LinearScm, n: int, seed: int) -> np.ndarray:
    """N x D dataset drawn by ancestral sampling in topological order."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    eps = _node_noise(scm, n, seed)
    data = np.empty((n, scm.dag.num_nodes))
    for d in scm.dag.topological_order:
        col = eps[d].copy()
        for p in scm.dag.parents(d):
            col += scm.weight(p, d) * data[:, p]
        data[:, d] = col
    return data


def sample_interventional(scm: LinearScm, i: int, value: float, n: int, seed: int) -> np.ndarray:
    """N x D draw from the mutilated model: edges into node i dropped and
    X_i clamped to ``value``."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    if not 0 <= i < scm.dag.num_nodes:
        raise IndexError(f"node {i} out of range for {scm.dag.num_nodes} nodes")
    eps = _node_noise(scm, n, seed, skip=i)
    data = np.empty((n, scm.dag.num_nodes))
    for d in scm.dag.topological_order:
        if d == i:
            data[:, d] = value
            continue
        col = eps[d].copy()
        for p in scm.dag.parents(d):
            col += scm.weight(p, d) * data[:, p]
        data[:, d] = col
    return data


def intro_example() -> tuple[Dag, Dag, Dag, LinearScm]:
    """Three-node running example: true graph V1 -> V3 <- V2 with edge
    weights 10 and 1 and unit Gaussian noise, plus the two learnt graphs that
    each miss one of the edges."""
    g1 = build_dag(3, [(0, 2), (1, 2)])
    g2 = build_dag(3, [(0, 2)])
    g3 = build_dag(3, [(1, 2)])
    scm = LinearScm(
        dag=g1,
        coefficients={(0, 2): 10.0, (1, 2): 1.0},
        noise=tuple(NoiseSpec() for _ in range(3)),
    )
    return g1, g2, g3, scm
