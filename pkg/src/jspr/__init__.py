"""Joint sparsity pattern recovery over distributed networks.

Greedy single- and multi-vector support recovery (OMP, simultaneous OMP),
collaborative decentralized variants with per-round fusion, sum-channel
aggregation with its recovery-bound calculators, and a deterministic
Monte Carlo experiment harness.
"""

from .config import ExperimentConfig, load_config, parse_config
from .decentralized import (
    FusionRound,
    RecoveryResult,
    dcomp1,
    dcomp2,
    domp_majority,
    index_fusion_full,
    index_fusion_neighborhood,
)
from .ensembles import (
    JointSparseEnsemble,
    MeasurementEnsemble,
    ObservationSet,
    average_snr,
    gen_measurements,
    gen_orthoprojector,
    gen_signals,
    gen_support,
    mac_aggregate,
    measure,
    sum_signal,
)
from .errors import ConfigError, EnumerationTooLargeError, SingularProjectionError
from .greedy import GreedyState, correlate, ls_residual, omp, somp
from .harness import exhaustive_oracle, run_sweep
from .macbounds import (
    BlockDictionary,
    BoundReport,
    XiEstimate,
    block_coefficients,
    block_rip_measurement_bound,
    build_block_dictionary,
    fano_pe_lower,
    gamma_c_min,
    gauss_necessary_bound,
    kl_pair_mac,
    kl_pair_pac,
    mac_omp,
    sbar_min,
    xi_average,
)
from .metrics import (
    AggregateStats,
    TrialRecord,
    aggregate,
    exact_recovery,
    support_fraction,
    table1_expected,
)
from .network import MessageLedger, Topology, build_topology, complete_topology

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "BlockDictionary",
    "BoundReport",
    "ConfigError",
    "EnumerationTooLargeError",
    "ExperimentConfig",
    "FusionRound",
    "GreedyState",
    "JointSparseEnsemble",
    "MeasurementEnsemble",
    "MessageLedger",
    "ObservationSet",
    "RecoveryResult",
    "SingularProjectionError",
    "Topology",
    "TrialRecord",
    "XiEstimate",
    "aggregate",
    "average_snr",
    "block_coefficients",
    "block_rip_measurement_bound",
    "build_block_dictionary",
    "build_topology",
    "complete_topology",
    "correlate",
    "dcomp1",
    "dcomp2",
    "domp_majority",
    "exact_recovery",
    "exhaustive_oracle",
    "fano_pe_lower",
    "gamma_c_min",
    "gauss_necessary_bound",
    "gen_measurements",
    "gen_orthoprojector",
    "gen_signals",
    "gen_support",
    "index_fusion_full",
    "index_fusion_neighborhood",
    "kl_pair_mac",
    "kl_pair_pac",
    "load_config",
    "ls_residual",
    "mac_aggregate",
    "mac_omp",
    "measure",
    "omp",
    "parse_config",
    "run_sweep",
    "sbar_min",
    "somp",
    "sum_signal",
    "support_fraction",
    "table1_expected",
    "xi_average",
]
