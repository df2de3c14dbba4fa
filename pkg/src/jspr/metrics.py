"""Scoring recovered supports and reducing Monte Carlo trial records."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class TrialRecord:
    """Outcome of one algorithm on one trial."""

    algorithm: str
    true_support: tuple
    per_node_supports: list   # one tuple per node
    iterations: list          # per-node round counts
    local_scalars: int
    global_scalars: int
    trial_seed: int


@dataclass
class AggregateStats:
    """Reduced statistics over the records of one (sweep point, algorithm)."""

    p_d: float
    p_d_stderr: float
    fraction: float
    mean_iterations: float
    iterations_min: int
    iterations_max: int
    mean_local_scalars: float
    mean_global_scalars: float
    n_records: int
    p_d_node_min: float       # node-level detection rates bracket the mean
    p_d_node_max: float


def exact_recovery(estimated, truth) -> bool:
    """True iff the two index sets are equal (indicator vectors match)."""
    return set(estimated) == set(truth)


def support_fraction(estimated, truth) -> float:
    """Fraction of the true support present in the estimate."""
    truth = set(truth)
    if not truth:
        raise ValueError("true support must be nonempty")
    return len(set(estimated) & truth) / len(truth)


def table1_expected(algorithm: str, l_count: int, k: int, n: int,
                    neighborhoods, t_observed) -> tuple:
    """Expected (local, global) scalar totals for one full run.

    s-omp: each node ships k*N correlation summaries network-wide.
    d-omp: each node ships its k final indices network-wide.
    dc-omp1: one index to each neighbor per round -> sum_l |G_l| * T_l local.
    dc-omp2: N values to each neighbor plus one global index per round.

    `t_observed` is the run's per-node round count (a scalar is broadcast).
    """
    t_nodes = np.broadcast_to(np.asarray(t_observed, dtype=int), (l_count,))
    degrees = np.asarray([len(nbrs) for nbrs in neighborhoods], dtype=int)
    if degrees.shape != (l_count,):
        raise ValueError("neighborhoods must list each node's neighbor set")
    if algorithm == "s-omp":
        return 0, l_count * (l_count - 1) * k * n
    if algorithm == "d-omp":
        return 0, k * (l_count - 1) * l_count
    if algorithm in ("dc-omp1", "dc-omp1-nbr"):
        return int(np.sum(degrees * t_nodes)), 0
    if algorithm == "dc-omp2":
        return (int(np.sum(degrees * t_nodes)) * n,
                int((l_count - 1) * np.sum(t_nodes)))
    if algorithm == "mac-omp":
        return 0, 0
    raise ValueError(f"unknown algorithm tag {algorithm!r}")


def aggregate(records) -> AggregateStats:
    """Means and errors over trial records; per-node stats are averaged over
    nodes with node-level min/max detection rates retained for error bars."""
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")

    node_counts = {len(r.per_node_supports) for r in records}
    if len(node_counts) != 1:
        raise ValueError("records disagree on node count")
    l_count = node_counts.pop()

    success = np.empty((len(records), l_count))
    frac = np.empty((len(records), l_count))
    iters = np.empty((len(records), l_count))
    local = np.empty(len(records))
    glob = np.empty(len(records))
    for i, rec in enumerate(records):
        for l, est in enumerate(rec.per_node_supports):
            success[i, l] = exact_recovery(est, rec.true_support)
            frac[i, l] = support_fraction(est, rec.true_support)
        iters[i] = rec.iterations
        local[i] = rec.local_scalars
        glob[i] = rec.global_scalars

    p_d = float(success.mean())
    node_rates = success.mean(axis=0)
    n = len(records)
    return AggregateStats(
        p_d=p_d,
        p_d_stderr=math.sqrt(max(p_d * (1.0 - p_d), 0.0) / n),
        fraction=float(frac.mean()),
        mean_iterations=float(iters.mean()),
        iterations_min=int(iters.min()),
        iterations_max=int(iters.max()),
        mean_local_scalars=float(local.mean()),
        mean_global_scalars=float(glob.mean()),
        n_records=n,
        p_d_node_min=float(node_rates.min()),
        p_d_node_max=float(node_rates.max()),
    )
