"""Per-variable EMA bookkeeping and the variance ordering built on it."""

from __future__ import annotations

import enum

import numpy as np


class Policy(str, enum.Enum):
    """How variables are ordered before each rebuild.

    ``HIGH_TO_LOW`` is the default (most volatile variables first).
    ``LOW_TO_HIGH`` flips only the variance comparison and ``RANDOM`` ignores
    the EMA; both exist for ablation runs.
    """

    HIGH_TO_LOW = "high-to-low"
    LOW_TO_HIGH = "low-to-high"
    RANDOM = "random"


def init_ema(alpha: np.ndarray) -> np.ndarray:
    return np.asarray(alpha, dtype=np.float64).copy()


def update_ema(ema: np.ndarray, alpha: np.ndarray, rho: float) -> np.ndarray:
    """``ema * rho + alpha * (1 - rho)`` with True as 1 and False as 0.

    The result is clipped at 1.0 so that rounding in the sum can never push an
    entry past the unit interval.
    """
    ema = np.asarray(ema, dtype=np.float64)
    alpha = np.asarray(alpha)
    if ema.shape != alpha.shape:
        raise ValueError(f"ema has length {ema.size} but assignment has {alpha.size}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    out = ema * rho + alpha.astype(np.float64) * (1.0 - rho)
    np.minimum(out, 1.0, out=out)
    return out


def variances(ema: np.ndarray) -> np.ndarray:
    ema = np.asarray(ema, dtype=np.float64)
    return ema * (1.0 - ema)


def variance_ranking(ema: np.ndarray, policy: Policy | str = Policy.HIGH_TO_LOW) -> np.ndarray:
    """0-based variable order sorted by Bernoulli variance.

    Ties always go to the lower variable index, whichever direction the
    variance comparison runs.
    """
    policy = Policy(policy)
    var = variances(ema)
    if policy is Policy.HIGH_TO_LOW:
        return np.argsort(-var, kind="stable")
    if policy is Policy.LOW_TO_HIGH:
        return np.argsort(var, kind="stable")
    raise ValueError("random ordering needs a generator; use rank_variables")


def rank_variables(ema: np.ndarray, policy: Policy | str, rng: np.random.Generator | None = None) -> np.ndarray:
    policy = Policy(policy)
    if policy is Policy.RANDOM:
        if rng is None:
            raise ValueError("random ordering needs a generator")
        return rng.permutation(len(ema))
    return variance_ranking(ema, policy)
