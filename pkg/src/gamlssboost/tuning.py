"""K-fold cross-validation of the global stopping iteration."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels as kernels
from .core import Dataset
from .engine import BoostModel, boost_noncyclical
from .errors import UsageError
from .rng import PortableRNG
from .stepsize import StepPolicy


@dataclass(frozen=True)
class CvResult:
    m_best: int
    mean_risk: np.ndarray
    fold_assignment: np.ndarray
    seed: int
    fold_risk: np.ndarray = None


def thread_count(default: int | None = None) -> int:
    """Worker cap from ``GAMLSSBOOST_THREADS`` (defaults to the CPU count)."""
    env = os.environ.get("GAMLSSBOOST_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"GAMLSSBOOST_THREADS must be an integer, got {env!r}") from None
    return default or os.cpu_count() or 1


def fold_assignment(n: int, K_folds: int, seed: int) -> np.ndarray:
    """Random partition of ``range(n)`` into folds whose sizes differ by at most one."""
    perm = PortableRNG(seed).permutation(n)
    folds = np.empty(n, dtype=np.int64)
    folds[perm] = np.arange(n) % K_folds
    return folds


def heldout_risk_path(model: BoostModel, data: Dataset, m_max: int) -> np.ndarray:
    """Held-out loss after 0..m_max updates; flat after an early stop."""
    t = model.trace
    path = kernels.replay_risk(
        data.y, np.ascontiguousarray(data.X.T), model.offset_mu, model.offset_sigma,
        t.k, t.j, t.nu, t.b0, t.b1,
    )
    if path.shape[0] < m_max + 1:
        path = np.concatenate([path, np.full(m_max + 1 - path.shape[0], path[-1])])
    return path[: m_max + 1]


def kfold_cv(
    data: Dataset,
    policy: StepPolicy,
    m_max: int,
    K: int = 10,
    seed: int = 0,
    n_jobs: int | None = None,
    on_fit: Callable[[BoostModel, Dataset], None] | None = None,
) -> CvResult:
    """Choose ``m_stop`` by ``K``-fold cross-validated out-of-fold risk.

    Each fold is fitted from its own offsets up to ``m_max`` iterations; the
    held-out loss (summed over the fold) is averaged across folds and the
    smallest minimising iteration count is returned. ``on_fit(model, train)``
    is called after every fold fit.
    """
    if not 2 <= K <= data.n:
        raise UsageError(f"need 2 <= K <= n, got K={K}, n={data.n}")
    if m_max < 1:
        raise UsageError(f"m_max must be >= 1, got {m_max}")
    folds = fold_assignment(data.n, K, seed)
    if np.bincount(folds, minlength=K).min() < 2 or data.n - np.bincount(folds).max() < 2:
        raise UsageError("every fold and its complement need at least two observations")

    def run(f: int) -> np.ndarray:
        test = folds == f
        train = data.subset(~test)
        model = boost_noncyclical(train, policy, m_max)
        if on_fit is not None:
            on_fit(model, train)
        return heldout_risk_path(model, data.subset(test), m_max)

    workers = min(K, n_jobs if n_jobs is not None else thread_count())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(run, range(K)))
    else:
        paths = [run(f) for f in range(K)]
    fold_risk = np.vstack(paths)
    mean_risk = fold_risk.mean(axis=0)
    return CvResult(int(np.argmin(mean_risk)), mean_risk, folds, int(seed), fold_risk)
