"""Proximal maps used by the coefficient update.

The three maps compose as block_threshold(soft_threshold(v, w), rho), which
is the exact minimizer of  0.5*||x - v||^2 + ||w .* x||_1 + rho*||x||_2
over each group. All operators accept scalars or arrays and are pure.
"""

from dataclasses import dataclass
import numpy as np

from .datatypes import check_same_length


@dataclass(frozen=True)
class ShrinkParams:
    """Per-entry l1 thresholds plus one l2 block threshold."""

    w: np.ndarray
    rho: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if np.any(w < 0) or self.rho < 0:
            raise ValueError("thresholds must be nonnegative")
        object.__setattr__(self, "w", w)

    def apply(self, v):
        return sparse_group_prox(v, self.w, self.rho)


def soft_threshold(x, rho):
    """Shrink ``x`` toward zero by ``rho``: sign(x) * max(|x| - rho, 0)."""
    return np.sign(x) * np.maximum(np.abs(x) - rho, 0.0)


def block_threshold(x, rho):
    """Scale the vector ``x`` to norm max(0, ||x||_2 - rho), keeping direction.

    Returns the zero vector when ||x||_2 <= rho; in particular the 0/0
    direction at x = 0 resolves to 0.
    """
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if nrm <= rho or nrm == 0.0:
        return np.zeros_like(x)
    return x * (1.0 - rho / nrm)


def sparse_group_prox(v, w, rho):
    """Composed shrinkage: elementwise soft threshold, then block threshold.

    Parameters
    ----------
    v : array
        Input vector.
    w : array
        Nonnegative per-entry thresholds, same length as ``v``.
    rho : float
        Nonnegative block threshold.

    Returns
    -------
    array
        The minimizer of 0.5*||x - v||^2 + ||w .* x||_1 + rho*||x||_2.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    check_same_length(v, w)
    return block_threshold(soft_threshold(v, w), rho)
