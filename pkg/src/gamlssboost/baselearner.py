"""Simple linear least-squares base-learners (intercept + slope)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DimensionError, UsageError


@dataclass(frozen=True)
class LearnerFit:
    j: int
    b0: float
    b1: float
    fitted: np.ndarray
    rss: float


@dataclass(frozen=True)
class CenteredDesign:
    """Per-column quantities reused by every fit against the same ``X``.

    Constant columns get ``sxx = 0`` and a zero centred row exactly, so they
    behave as intercept-only learners.
    """

    XT: np.ndarray
    XcT: np.ndarray
    xmean: np.ndarray
    sxx: np.ndarray

    @classmethod
    def from_matrix(cls, X) -> "CenteredDesign":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        XT = np.ascontiguousarray(X.T)
        xmean = XT.mean(axis=1)
        XcT = XT - xmean[:, None]
        constant = np.ptp(XT, axis=1) == 0.0
        XcT[constant] = 0.0
        sxx = np.einsum("ij,ij->i", XcT, XcT)
        return cls(XT, np.ascontiguousarray(XcT), xmean, sxx)


def fit_ols(x, u) -> LearnerFit:
    """Least-squares fit ``u ~ b0 + b1 * x``; a constant ``x`` gives ``b1 = 0``."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if x.ndim != 1 or x.shape != u.shape:
        raise DimensionError(f"x has shape {x.shape}, u has shape {u.shape}")
    if x.shape[0] < 2:
        raise UsageError("need at least two observations")
    design = CenteredDesign.from_matrix(x)
    j, b0, b1, rss, h = K.best_learner(design.XT, design.XcT, design.xmean, design.sxx, u)
    return LearnerFit(0, float(b0), float(b1), h, float(rss))


def select_best(X, u, candidates=None, design: CenteredDesign | None = None) -> LearnerFit:
    """Fit every candidate column to ``u`` and return the one with least RSS.

    Ties go to the smallest column index. ``candidates`` defaults to all
    columns; a precomputed ``design`` skips re-centring ``X``.
    """
    X = np.asarray(X, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != u.shape[0]:
        raise DimensionError(f"X has shape {X.shape}, u has length {u.shape[0]}")
    if candidates is None:
        cols = np.arange(X.shape[1])
    else:
        cols = np.unique(np.asarray(list(candidates), dtype=np.int64))
        if cols.size == 0:
            raise UsageError("candidate set is empty")
        if cols[0] < 0 or cols[-1] >= X.shape[1]:
            raise UsageError(f"candidate indices must lie in [0, {X.shape[1] - 1}]")
    if design is None:
        design = CenteredDesign.from_matrix(X[:, cols])
    elif candidates is not None:
        design = CenteredDesign(
            np.ascontiguousarray(design.XT[cols]),
            np.ascontiguousarray(design.XcT[cols]),
            design.xmean[cols],
            design.sxx[cols],
        )
    j, b0, b1, rss, h = K.best_learner(design.XT, design.XcT, design.xmean, design.sxx, u)
    return LearnerFit(int(cols[j]), float(b0), float(b1), h, float(rss))
