"""Config-driven Monte Carlo sweeps, bound reports, and a brute-force oracle.

Every trial draws a fresh ensemble, measurement matrices, and noise from
purpose-split seed streams, so runs are reproducible byte-for-byte (also
under parallel trial execution) and all algorithms at a sweep point consume
identical data (paired trials).
"""

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import seeding
from .config import ExperimentConfig
from .decentralized import RecoveryResult, dcomp1, dcomp2, domp_majority
from .ensembles import gen_measurements, gen_signals, gen_support, mac_aggregate, measure
from .errors import ConfigError, EnumerationTooLargeError, SingularProjectionError
from .greedy import omp, somp
from .macbounds import bound_report, mac_omp
from .metrics import TrialRecord, aggregate
from .network import MessageLedger, Topology, build_topology, complete_topology

CSV_HEADER = ("sweep_var,algorithm,p_d,p_d_stderr,fraction,mean_iters,"
              "iters_min,iters_max,local_scalars,global_scalars,trials,"
              "failed_trials,seed")
ORACLE_CAP = 10 ** 5
MAX_FAILED_FRACTION = 0.01


@dataclass(frozen=True)
class TrialTask:
    """Everything one trial needs; picklable for process pools."""

    n: int
    k: int
    l_count: int
    m: int
    sigma2: float
    amp_low: float
    amp_high: float
    shared_matrix: bool
    algorithms: tuple
    topology: Topology
    master_seed: int
    trial_index: int


def _somp_result(obs, meas, topology: Topology, k: int) -> RecoveryResult:
    """Centralized simultaneous OMP, charged as each node shipping its k*N
    correlation summaries network-wide."""
    selected = tuple(sorted(somp(obs, meas, k)))
    n = meas.matrices.shape[2]
    ledger = MessageLedger(topology)
    for l in range(topology.node_count):
        ledger.send_global(l, k * n)
    l_count = topology.node_count
    return RecoveryResult(per_node_support=[selected] * l_count,
                          iterations=[k] * l_count, ledger=ledger)


def _mac_result(obs, meas, topology: Topology, k: int) -> RecoveryResult:
    """OMP on the sum-channel output; no node-to-node messages to charge."""
    z = mac_aggregate(obs)
    selected = tuple(sorted(mac_omp(z, meas.matrices[0], k)))
    l_count = topology.node_count
    return RecoveryResult(per_node_support=[selected] * l_count,
                          iterations=[k] * l_count, ledger=MessageLedger(topology))


def _run_algorithm(alg: str, obs, meas, topology: Topology, k: int) -> RecoveryResult:
    if alg == "d-omp":
        return domp_majority(obs, meas, topology, k)
    if alg == "dc-omp1":
        return dcomp1(obs, meas, complete_topology(topology.node_count), k, mode="full")
    if alg == "dc-omp1-nbr":
        return dcomp1(obs, meas, topology, k, mode="neighborhood")
    if alg == "dc-omp2":
        return dcomp2(obs, meas, topology, k)
    if alg == "s-omp":
        return _somp_result(obs, meas, topology, k)
    if alg == "mac-omp":
        return _mac_result(obs, meas, topology, k)
    raise ValueError(f"unknown algorithm tag {alg!r}")


def run_trial(task: TrialTask) -> dict:
    """One paired trial; per algorithm a TrialRecord, or None on a
    singular-projection failure."""
    support = gen_support(task.n, task.k,
                          seeding.stream(task.master_seed, seeding.SUPPORT, task.trial_index))
    ensemble = gen_signals(support, task.n, task.l_count, task.amp_low, task.amp_high,
                           seeding.stream(task.master_seed, seeding.AMPLITUDES, task.trial_index))
    meas = gen_measurements(task.n, task.m, task.l_count, task.sigma2,
                            seeding.stream(task.master_seed, seeding.MATRICES, task.trial_index),
                            shared=task.shared_matrix)
    obs = measure(ensemble, meas,
                  seeding.stream(task.master_seed, seeding.NOISE, task.trial_index))

    out = {}
    for alg in task.algorithms:
        try:
            result = _run_algorithm(alg, obs, meas, task.topology, task.k)
        except SingularProjectionError:
            out[alg] = None
            continue
        out[alg] = TrialRecord(
            algorithm=alg,
            true_support=ensemble.support,
            per_node_supports=result.per_node_support,
            iterations=list(result.iterations),
            local_scalars=result.ledger.local_scalar_count,
            global_scalars=result.ledger.global_scalar_count,
            trial_seed=task.trial_index,
        )
    return out


def _point_topology(cfg: ExperimentConfig, l_count: int, n0: int | None) -> Topology:
    rng = seeding.stream(cfg.master_seed, seeding.TOPOLOGY)
    return build_topology(cfg.topology_kind, l_count, rng=rng, n0=n0, p=cfg.edge_p)


def _single(values, name: str) -> int:
    if len(values) != 1:
        raise ConfigError(f"key '{name}': exactly one value expected here, got {values}")
    return values[0]


def run_point(cfg: ExperimentConfig, *, sweep_var: int, l_count: int, m: int,
              topology: Topology) -> list:
    """All configured algorithms on `trials` paired trials at one sweep point."""
    if cfg.k > m:
        raise ConfigError(f"sweep point m={m}: greedy recovery requires k <= M (k={cfg.k})")
    tasks = [TrialTask(n=cfg.n, k=cfg.k, l_count=l_count, m=m, sigma2=cfg.sigma2,
                       amp_low=cfg.amp_low, amp_high=cfg.amp_high,
                       shared_matrix=cfg.mac_mode, algorithms=tuple(cfg.algorithms),
                       topology=topology, master_seed=cfg.master_seed, trial_index=t)
             for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_trial, tasks,
                                    chunksize=max(1, cfg.trials // (cfg.workers * 4))))
    else:
        results = [run_trial(task) for task in tasks]

    rows = []
    for alg in cfg.algorithms:
        records = [res[alg] for res in results if res[alg] is not None]
        failed = cfg.trials - len(records)
        if failed > MAX_FAILED_FRACTION * cfg.trials:
            raise RuntimeError(
                f"sweep point {sweep_var}, algorithm {alg}: {failed}/{cfg.trials} "
                "trials hit singular projections; the configuration is degenerate")
        stats = aggregate(records)
        rows.append({
            "sweep_var": sweep_var,
            "algorithm": alg,
            "p_d": stats.p_d,
            "p_d_stderr": stats.p_d_stderr,
            "fraction": stats.fraction,
            "mean_iters": stats.mean_iterations,
            "iters_min": stats.iterations_min,
            "iters_max": stats.iterations_max,
            "local_scalars": stats.mean_local_scalars,
            "global_scalars": stats.mean_global_scalars,
            "trials": stats.n_records,
            "failed_trials": failed,
            "seed": cfg.master_seed,
        })
    return rows


def run_sweep(cfg: ExperimentConfig, sweep: str) -> list:
    """Row dicts for a sweep over m, l, or n0 (one row per point x algorithm)."""
    rows = []
    if sweep == "m":
        l_count = _single(cfg.l_values, "l")
        n0 = _single(cfg.n0_values, "n0") if cfg.topology_kind == "ring" else None
        topology = _point_topology(cfg, l_count, n0)
        for m in cfg.m_values:
            rows.extend(run_point(cfg, sweep_var=m, l_count=l_count, m=m,
                                  topology=topology))
    elif sweep == "l":
        m = _single(cfg.m_values, "m")
        n0 = _single(cfg.n0_values, "n0") if cfg.topology_kind == "ring" else None
        for l_count in cfg.l_values:
            topology = _point_topology(cfg, l_count, n0)
            rows.extend(run_point(cfg, sweep_var=l_count, l_count=l_count, m=m,
                                  topology=topology))
    elif sweep == "n0":
        if cfg.topology_kind != "ring":
            raise ConfigError("key 'topology': neighborhood sweeps require ring topology")
        if not cfg.n0_values:
            raise ConfigError("key 'n0': required for a neighborhood sweep")
        m = _single(cfg.m_values, "m")
        l_count = _single(cfg.l_values, "l")
        for n0 in cfg.n0_values:
            topology = _point_topology(cfg, l_count, n0)
            rows.extend(run_point(cfg, sweep_var=n0, l_count=l_count, m=m,
                                  topology=topology))
    else:
        raise ValueError(f"unknown sweep kind {sweep!r}")
    return rows


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join([
            str(row["sweep_var"]),
            row["algorithm"],
            f"{row['p_d']:.6f}",
            f"{row['p_d_stderr']:.6f}",
            f"{row['fraction']:.6f}",
            f"{row['mean_iters']:.4f}",
            str(row["iters_min"]),
            str(row["iters_max"]),
            f"{row['local_scalars']:.10g}",
            f"{row['global_scalars']:.10g}",
            str(row["trials"]),
            str(row["failed_trials"]),
            str(row["seed"]),
        ]))
    return "\n".join(lines) + "\n"


def rows_to_json(rows) -> str:
    return json.dumps(rows, indent=2, sort_keys=False) + "\n"


def exhaustive_oracle(ys, dictionaries, k: int, cap: int = ORACLE_CAP) -> tuple:
    """Support minimizing the total least-squares residual over all C(N,k)
    candidates (summed over nodes when several observations are given).

    Independent of the greedy path: per-candidate solves use np.linalg.lstsq.
    Ties keep the lexicographically smallest support.
    """
    ys = np.asarray(ys, dtype=float)
    dictionaries = np.asarray(dictionaries, dtype=float)
    if ys.ndim == 1:
        ys = ys[None, :]
        dictionaries = dictionaries[None, :, :]
    l_count, _ = ys.shape
    n = dictionaries.shape[2]
    if math.comb(n, k) > cap:
        raise EnumerationTooLargeError(
            f"C({n},{k}) = {math.comb(n, k)} candidate supports exceed the cap {cap}")
    best_support = None
    best_cost = np.inf
    for support in itertools.combinations(range(n), k):
        cost = 0.0
        for l in range(l_count):
            sub = dictionaries[l][:, support]
            coef, *_ = np.linalg.lstsq(sub, ys[l], rcond=None)
            resid = ys[l] - sub @ coef
            cost += float(resid @ resid)
        if cost < best_cost:
            best_cost = cost
            best_support = support
    return tuple(best_support)


def bounds_report(cfg: ExperimentConfig) -> dict:
    """JSON-ready document with every analytical quantity, each labeled with
    the formula it evaluates."""
    if cfg.sigma2 <= 0:
        raise ConfigError("key 'sigma2': bound reports need positive noise variance")
    l_count = _single(cfg.l_values, "l")
    m = _single(cfg.m_values, "m")
    support = gen_support(cfg.n, cfg.k, seeding.stream(cfg.master_seed, seeding.SUPPORT))
    ensemble = gen_signals(support, cfg.n, l_count, cfg.amp_low, cfg.amp_high,
                           seeding.stream(cfg.master_seed, seeding.AMPLITUDES))
    meas = gen_measurements(cfg.n, m, l_count, cfg.sigma2,
                            seeding.stream(cfg.master_seed, seeding.MATRICES), shared=True)
    exact_fits = math.comb(cfg.n, cfg.k) ** 2 <= 10 ** 6
    report = bound_report(
        ensemble, meas, delta0=cfg.delta0, slack_t=cfg.slack_t,
        sample_pairs=None if exact_fits else cfg.xi_pairs,
        rng=seeding.stream(cfg.master_seed, seeding.SAMPLING))

    def entry(value, formula, **extra):
        doc = {"value": value, "formula": formula}
        doc.update(extra)
        return doc

    xi_extra = {"exact": report.xi_exact, "pairs": report.xi_pairs}
    return {
        "params": {
            "n": cfg.n, "k": cfg.k, "l": l_count, "m": m, "sigma2": cfg.sigma2,
            "amp_low": cfg.amp_low, "amp_high": cfg.amp_high,
            "delta0": cfg.delta0, "slack_t": cfg.slack_t, "seed": cfg.master_seed,
        },
        "bounds": {
            "m_block_rip": entry(
                report.m_block_rip,
                "ceil((36/(7*delta0)) * (ln(2*C(N,k)) + k*L*ln(12/delta0) + t))"),
            "m_gauss_lower": entry(
                report.m_gauss_lower,
                "ceil(max(ln(C(N,k))/(8*k*L*gamma_c_min), ln(N-k)/(4*L*gamma_c_min)))"),
            "fano_pe_lower": entry(
                report.fano_pe_lower,
                "max(0, 1 - (xi_mac + ln 2)/ln(C(N,k)))"),
            "xi_mac": entry(report.xi_mac,
                            "mean over support pairs of ||sum_l (B_Un s_l,Un - "
                            "B_Um s_l,Um)||^2 / (2*sigma2*L)",
                            stderr=report.xi_mac_stderr, **xi_extra),
            "xi_pac": entry(report.xi_pac,
                            "mean over support pairs of sum_l ||B_Un s_l,Un - "
                            "B_Um s_l,Um||^2 / (2*sigma2)",
                            stderr=report.xi_pac_stderr, **xi_extra),
            "gamma_c_min": entry(report.gamma_c_min,
                                 "(min nonzero |s_l(j)|)^2 / sigma2"),
            "sbar_min": entry(report.sbar_min,
                              "min over the support of |sum_l s_l(j)|"),
        },
    }


def oracle_check(cfg: ExperimentConfig) -> dict:
    """Agreement of the greedy solvers with the exhaustive oracle on
    noiseless desk-scale trials, plus the dcomp2/somp equivalence count."""
    l_count = _single(cfg.l_values, "l")
    m = _single(cfg.m_values, "m")
    topo = complete_topology(l_count)
    omp_agree = somp_agree = dcomp2_match = 0
    for t in range(cfg.trials):
        support = gen_support(cfg.n, cfg.k,
                              seeding.stream(cfg.master_seed, seeding.SUPPORT, t))
        ensemble = gen_signals(support, cfg.n, l_count, cfg.amp_low, cfg.amp_high,
                               seeding.stream(cfg.master_seed, seeding.AMPLITUDES, t))
        meas = gen_measurements(cfg.n, m, l_count, 0.0,
                                seeding.stream(cfg.master_seed, seeding.MATRICES, t))
        obs = measure(ensemble, meas, seeding.stream(cfg.master_seed, seeding.NOISE, t))

        single_oracle = exhaustive_oracle(obs.per_node[0], meas.matrices[0], cfg.k)
        if set(omp(obs.per_node[0], meas.matrices[0], cfg.k)) == set(single_oracle):
            omp_agree += 1
        mmv_oracle = exhaustive_oracle(obs.per_node, meas.matrices, cfg.k)
        somp_sel = somp(obs, meas, cfg.k)
        if set(somp_sel) == set(mmv_oracle):
            somp_agree += 1
        if dcomp2(obs, meas, topo, cfg.k).common_support == tuple(sorted(somp_sel)):
            dcomp2_match += 1
    return {
        "trials": cfg.trials,
        "params": {"n": cfg.n, "k": cfg.k, "l": l_count, "m": m, "seed": cfg.master_seed},
        "omp_oracle_agreement": omp_agree,
        "somp_oracle_agreement": somp_agree,
        "dcomp2_somp_matches": dcomp2_match,
    }
