"""Greedy support recovery: OMP on a single vector and simultaneous OMP
across nodes with per-node dictionaries.

Both run exactly k iterations: pick the column (most) correlated with the
residual(s), then deflate each residual by least squares onto everything
selected so far.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .errors import SingularProjectionError

GRAM_COND_LIMIT = 1e12


@dataclass
class GreedyState:
    """Loop state: chosen columns in selection order plus per-node residuals."""

    selected: list = field(default_factory=list)
    residuals: np.ndarray | None = None      # (L, M)
    iteration: int = 0


def correlate(residual: np.ndarray, dictionary: np.ndarray) -> np.ndarray:
    """Absolute inner product of the residual with every dictionary column."""
    return np.abs(dictionary.T @ residual)


def ls_residual(y: np.ndarray, dictionary: np.ndarray, selected) -> np.ndarray:
    """y minus its orthogonal projection onto the selected columns.

    Solves the normal equations with a Cholesky factorization; raises
    SingularProjectionError when the selected columns are (nearly) dependent
    instead of regularizing.
    """
    selected = list(selected)
    if not selected:
        return np.array(y, dtype=float, copy=True)
    sub = dictionary[:, selected]
    gram = sub.T @ sub
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        raise SingularProjectionError(
            f"selected columns nearly dependent (cond={cond:.3e})")
    try:
        coef = sla.cho_solve(sla.cho_factor(gram, lower=True), sub.T @ y)
    except np.linalg.LinAlgError as exc:     # pragma: no cover - cond check fires first
        raise SingularProjectionError(str(exc)) from exc
    return y - sub @ coef


def _greedy_select(ys: np.ndarray, dictionaries: np.ndarray, k: int) -> list:
    """Shared k-step selection loop over L (residual, dictionary) pairs."""
    l_count, m = ys.shape
    if not 1 <= k <= m:
        raise ValueError(f"sparsity k must satisfy 1 <= k <= M, got k={k}, M={m}")
    state = GreedyState(selected=[], residuals=np.array(ys, dtype=float, copy=True))
    for t in range(k):
        scores = np.abs(
            np.einsum("lmn,lm->ln", dictionaries, state.residuals)).sum(axis=0)
        if state.selected:
            scores[state.selected] = -np.inf  # orthogonality already rules these out
        state.selected.append(int(np.argmax(scores)))
        for l in range(l_count):
            state.residuals[l] = ls_residual(ys[l], dictionaries[l], state.selected)
        state.iteration = t + 1
    return state.selected


def omp(y: np.ndarray, dictionary: np.ndarray, k: int) -> list:
    """Standard OMP on one measurement vector; returns k indices in selection order.

    Ties in the correlation argmax go to the smallest column index.
    """
    y = np.asarray(y, dtype=float)
    dictionary = np.asarray(dictionary, dtype=float)
    return _greedy_select(y[None, :], dictionary[None, :, :], k)


def somp(obs, meas, k: int) -> list:
    """Simultaneous OMP: per-iteration score is the sum over nodes of each
    node's absolute residual correlation against its own dictionary."""
    return _greedy_select(np.asarray(obs.per_node, dtype=float),
                          np.asarray(meas.matrices, dtype=float), k)
