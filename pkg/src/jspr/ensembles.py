"""Common-support sparse ensembles, orthoprojector measurements, and sum-channel output.

L nodes each hold a length-N sparse vector; all vectors share one support of
size k. Node l observes y_l = B_l s_l + v_l through an M x N matrix with
orthonormal rows (optionally one shared matrix for all nodes). The sum
channel delivers only z = sum_l y_l to a fusion center.
"""

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10


@dataclass
class JointSparseEnsemble:
    """L sparse signals sharing one support, plus the binary indicator."""

    n: int
    k: int
    l_count: int
    support: tuple            # k sorted distinct indices in [0, n)
    signals: np.ndarray       # (L, N)
    indicator: np.ndarray     # (N,) uint8, 1 exactly on the support


@dataclass
class MeasurementEnsemble:
    """Per-node measurement matrices and the noise level."""

    m: int
    matrices: np.ndarray      # (L, M, N)
    basis_is_identity: bool
    shared_matrix: bool
    noise_sigma2: float


@dataclass
class ObservationSet:
    """Per-node noisy observations; sum-channel output filled on aggregation."""

    per_node: np.ndarray              # (L, M)
    mac_output: np.ndarray | None = None
    mac_noise_sigma2: float = 0.0


def gen_support(n: int, k: int, rng: np.random.Generator) -> tuple:
    """Draw k distinct indices uniformly without replacement from [0, n)."""
    if k < 1 or k >= n:
        raise ValueError(f"sparsity k must satisfy 1 <= k < n, got k={k}, n={n}")
    idx = rng.choice(n, size=k, replace=False)
    return tuple(sorted(int(i) for i in idx))


def gen_signals(support, n: int, l_count: int, amp_low: float, amp_high: float,
                rng: np.random.Generator) -> JointSparseEnsemble:
    """Build an ensemble with iid uniform nonzeros on [amp_low, amp_high].

    Every node's vector is nonzero exactly on `support`. The range may be
    sign-mixed (e.g. [-25, 25]); exact zero draws are redrawn so the support
    definition stays exact.
    """
    support = tuple(sorted(int(i) for i in support))
    if len(support) == 0:
        raise ValueError("support must be nonempty")
    if len(set(support)) != len(support):
        raise ValueError("support indices must be distinct")
    if support[0] < 0 or support[-1] >= n:
        raise ValueError(f"support indices must lie in [0, {n})")
    if amp_low > amp_high:
        raise ValueError("amp_low must not exceed amp_high")
    if amp_low == 0.0 and amp_high == 0.0:
        raise ValueError("amplitude range [0, 0] would empty the support")
    if l_count < 1:
        raise ValueError("l_count must be positive")

    k = len(support)
    vals = rng.uniform(amp_low, amp_high, size=(l_count, k))
    while np.any(vals == 0.0):               # measure-zero event, but possible
        redraw = vals == 0.0
        vals[redraw] = rng.uniform(amp_low, amp_high, size=int(np.count_nonzero(redraw)))

    signals = np.zeros((l_count, n))
    signals[:, list(support)] = vals
    indicator = np.zeros(n, dtype=np.uint8)
    indicator[list(support)] = 1
    return JointSparseEnsemble(n=n, k=k, l_count=l_count, support=support,
                               signals=signals, indicator=indicator)


def gen_orthoprojector(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """M x N matrix with orthonormal rows (A A^T = I_M to 1e-10).

    Reduced QR of an N x M standard-normal draw, transposed; each row's sign
    is fixed so its first nonzero entry is positive, for reproducibility.
    """
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    g = rng.standard_normal((n, m))
    q, _ = np.linalg.qr(g)                   # (n, m), orthonormal columns
    a = np.ascontiguousarray(q.T)
    first = (np.abs(a) > 0.0).argmax(axis=1)
    signs = np.sign(a[np.arange(m), first])
    return a * signs[:, None]


def gen_measurements(n: int, m: int, l_count: int, sigma2: float,
                     rng: np.random.Generator, shared: bool = False,
                     basis: np.ndarray | None = None) -> MeasurementEnsemble:
    """Per-node orthoprojector matrices; one shared draw when `shared`.

    A sparsity basis may be supplied and is multiplied in here, so the stored
    matrices act directly on the sparse coefficient vectors.
    """
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    if shared:
        a = gen_orthoprojector(m, n, rng)
        mats = np.repeat(a[None, :, :], l_count, axis=0)
    else:
        mats = np.stack([gen_orthoprojector(m, n, rng) for _ in range(l_count)])
    basis_is_identity = basis is None
    if basis is not None:
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (n, n):
            raise ValueError(f"basis must be {n} x {n}")
        mats = mats @ basis
    return MeasurementEnsemble(m=m, matrices=mats, basis_is_identity=basis_is_identity,
                               shared_matrix=shared, noise_sigma2=float(sigma2))


def measure(ensemble: JointSparseEnsemble, meas: MeasurementEnsemble,
            rng: np.random.Generator) -> ObservationSet:
    """Observe y_l = B_l s_l + v_l with iid Gaussian noise of variance sigma2."""
    l_count, m, n = meas.matrices.shape
    if n != ensemble.n or l_count != ensemble.l_count:
        raise ValueError(
            f"measurement shape {meas.matrices.shape} incompatible with "
            f"ensemble (L={ensemble.l_count}, N={ensemble.n})")
    clean = np.einsum("lmn,ln->lm", meas.matrices, ensemble.signals)
    if meas.noise_sigma2 > 0:
        noise = rng.standard_normal(clean.shape) * np.sqrt(meas.noise_sigma2)
        per_node = clean + noise
    else:
        per_node = clean
    return ObservationSet(per_node=per_node,
                          mac_noise_sigma2=l_count * meas.noise_sigma2)


def mac_aggregate(obs: ObservationSet) -> np.ndarray:
    """Sum-channel output z = sum_l y_l; cached on the observation set."""
    if obs.per_node.shape[0] < 1:
        raise ValueError("need at least one per-node observation")
    z = obs.per_node.sum(axis=0)
    obs.mac_output = z
    return z


def sum_signal(ensemble: JointSparseEnsemble) -> np.ndarray:
    """Summed signal; sparse on (a subset of) the common support."""
    return ensemble.signals.sum(axis=0)


def average_snr(ensemble: JointSparseEnsemble, meas: MeasurementEnsemble) -> float:
    """Average per-node SNR in dB: 10 log10((1/L) sum_l ||s_l||^2 / (N sigma2))."""
    if meas.noise_sigma2 <= 0:
        raise ValueError("SNR undefined for zero noise variance")
    power = np.mean(np.sum(ensemble.signals ** 2, axis=1))
    return 10.0 * np.log10(power / (ensemble.n * meas.noise_sigma2))
