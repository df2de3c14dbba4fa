"""Flat key=value experiment configuration.

One `key = value` pair per line, `#` starts a comment, list values are
comma-separated. Unknown keys are rejected. Defaults reproduce the standard
setup: sigma2 = 0.01, amplitudes uniform on [10, 15], 500 trials, complete
topology.
"""

from dataclasses import dataclass, field

from .errors import ConfigError

VALID_ALGORITHMS = ("d-omp", "dc-omp1", "dc-omp1-nbr", "dc-omp2", "s-omp", "mac-omp")
VALID_TOPOLOGIES = ("complete", "ring", "random")
VALID_FORMATS = ("csv", "json")


@dataclass
class ExperimentConfig:
    n: int = 256
    k: int = 10
    l_values: list = field(default_factory=lambda: [10])
    m_values: list = field(default_factory=lambda: [15, 20, 25, 30, 40])
    sigma2: float = 0.01
    amp_low: float = 10.0
    amp_high: float = 15.0
    topology_kind: str = "complete"
    n0_values: list = field(default_factory=list)   # ring only
    edge_p: float | None = None                     # random only
    algorithms: list = field(default_factory=lambda: ["d-omp", "dc-omp1", "dc-omp2", "s-omp"])
    trials: int = 500
    master_seed: int = 0
    out_path: str | None = None
    out_format: str = "csv"
    mac_mode: bool = False
    delta0: float = 0.5
    slack_t: float = 1.0
    xi_pairs: int = 2000
    workers: int = 1
    warnings: list = field(default_factory=list)


def _parse_int(key, value, lineno):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: key '{key}': expected integer, got {value!r}") from None


def _parse_float(key, value, lineno):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: key '{key}': expected number, got {value!r}") from None


def _parse_int_list(key, value, lineno):
    return [_parse_int(key, item.strip(), lineno) for item in value.split(",") if item.strip()]


def _parse_bool(key, value, lineno):
    lowered = value.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"line {lineno}: key '{key}': expected true/false, got {value!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a configuration; empty text gives all defaults."""
    cfg = ExperimentConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        seen.add(key)
        if value == "":
            raise ConfigError(f"line {lineno}: key '{key}': empty value")

        if key == "n":
            cfg.n = _parse_int(key, value, lineno)
        elif key == "k":
            cfg.k = _parse_int(key, value, lineno)
        elif key == "l":
            cfg.l_values = _parse_int_list(key, value, lineno)
        elif key == "m":
            cfg.m_values = _parse_int_list(key, value, lineno)
        elif key == "sigma2":
            cfg.sigma2 = _parse_float(key, value, lineno)
        elif key == "amp_low":
            cfg.amp_low = _parse_float(key, value, lineno)
        elif key == "amp_high":
            cfg.amp_high = _parse_float(key, value, lineno)
        elif key == "topology":
            cfg.topology_kind = value
        elif key == "n0":
            cfg.n0_values = _parse_int_list(key, value, lineno)
        elif key == "p":
            cfg.edge_p = _parse_float(key, value, lineno)
        elif key == "algorithms":
            cfg.algorithms = [item.strip() for item in value.split(",") if item.strip()]
        elif key == "trials":
            cfg.trials = _parse_int(key, value, lineno)
        elif key == "seed":
            cfg.master_seed = _parse_int(key, value, lineno)
        elif key == "out":
            cfg.out_path = value
        elif key == "format":
            cfg.out_format = value
        elif key == "mac_mode":
            cfg.mac_mode = _parse_bool(key, value, lineno)
        elif key == "delta0":
            cfg.delta0 = _parse_float(key, value, lineno)
        elif key == "slack_t":
            cfg.slack_t = _parse_float(key, value, lineno)
        elif key == "xi_pairs":
            cfg.xi_pairs = _parse_int(key, value, lineno)
        elif key == "workers":
            cfg.workers = _parse_int(key, value, lineno)
        else:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")

    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.n < 2:
        raise ConfigError("key 'n': signal dimension must be at least 2")
    if cfg.k < 1:
        raise ConfigError("key 'k': sparsity must be positive (k >= 1)")
    if cfg.k >= cfg.n:
        raise ConfigError("key 'k': sparsity must be below the signal dimension")
    if not cfg.l_values or any(l < 1 for l in cfg.l_values):
        raise ConfigError("key 'l': node counts must be positive")
    if not cfg.m_values or any(m < 1 for m in cfg.m_values):
        raise ConfigError("key 'm': measurement counts must be positive")
    if any(m >= cfg.n for m in cfg.m_values):
        raise ConfigError("key 'm': measurements per node must be below n")
    if cfg.sigma2 < 0:
        raise ConfigError("key 'sigma2': noise variance must be nonnegative")
    if cfg.amp_low > cfg.amp_high:
        raise ConfigError("key 'amp_low': must not exceed amp_high")
    if cfg.topology_kind not in VALID_TOPOLOGIES:
        raise ConfigError(
            f"key 'topology': must be one of {', '.join(VALID_TOPOLOGIES)}")
    if cfg.topology_kind == "ring" and not cfg.n0_values:
        raise ConfigError("key 'n0': required for ring topology")
    if any(n0 < 1 for n0 in cfg.n0_values):
        raise ConfigError("key 'n0': neighborhood sizes must be positive")
    if cfg.topology_kind == "random":
        if cfg.edge_p is None:
            raise ConfigError("key 'p': required for random topology")
        if not 0 < cfg.edge_p <= 1:
            raise ConfigError("key 'p': edge probability must be in (0, 1]")
    if not cfg.algorithms:
        raise ConfigError("key 'algorithms': at least one algorithm required")
    for alg in cfg.algorithms:
        if alg not in VALID_ALGORITHMS:
            raise ConfigError(
                f"key 'algorithms': unknown tag '{alg}' "
                f"(valid: {', '.join(VALID_ALGORITHMS)})")
    if "mac-omp" in cfg.algorithms and not cfg.mac_mode:
        raise ConfigError("key 'algorithms': mac-omp requires mac_mode = true "
                          "(shared measurement matrix)")
    if cfg.trials < 1:
        raise ConfigError("key 'trials': must be positive")
    if cfg.master_seed < 0:
        raise ConfigError("key 'seed': must be nonnegative")
    if cfg.out_format not in VALID_FORMATS:
        raise ConfigError(f"key 'format': must be one of {', '.join(VALID_FORMATS)}")
    if not 0 < cfg.delta0 < 1:
        raise ConfigError("key 'delta0': must be in (0, 1)")
    if cfg.slack_t <= 0:
        raise ConfigError("key 'slack_t': must be positive")
    if cfg.xi_pairs < 2:
        raise ConfigError("key 'xi_pairs': must be at least 2")
    if cfg.workers < 1:
        raise ConfigError("key 'workers': must be positive")
    if cfg.k > min(cfg.m_values):
        cfg.warnings.append(
            f"k={cfg.k} exceeds the smallest sweep m={min(cfg.m_values)}; "
            "greedy recovery requires k <= M and those points will fail")


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
