"""Gaussian location-scale family and the dataset container."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import DimensionError, NumericError, UsageError

HALF_LOG_2PI = K.HALF_LOG_2PI


@dataclass(frozen=True)
class Dataset:
    """Response ``y`` (length n) and covariate matrix ``X`` (n x J)."""

    y: np.ndarray
    X: np.ndarray
    names: tuple = field(default=None)

    def __post_init__(self):
        y = np.ascontiguousarray(np.asarray(self.y, dtype=np.float64))
        X = np.asarray(self.X, dtype=np.float64)
        if y.ndim != 1:
            raise DimensionError(f"y must be one-dimensional, got shape {y.shape}")
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DimensionError(f"X must be two-dimensional, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"X has {X.shape[0]} rows but y has length {y.shape[0]}")
        if y.shape[0] < 2:
            raise UsageError("need at least two observations")
        if X.shape[1] < 1:
            raise UsageError("need at least one covariate")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise NumericError("data contain non-finite values")
        names = self.names
        if names is None:
            names = tuple(f"x{j + 1}" for j in range(X.shape[1]))
        names = tuple(str(s) for s in names)
        if len(names) != X.shape[1]:
            raise DimensionError(f"{len(names)} names for {X.shape[1]} columns")
        if len(set(names)) != len(names):
            raise UsageError("covariate names must be unique")
        y.setflags(write=False)
        X = np.ascontiguousarray(X)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def J(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "Dataset":
        return Dataset(self.y[rows], self.X[rows], self.names)


@dataclass(frozen=True)
class PredictorPair:
    """Additive predictors for mu (identity link) and sigma (log link)."""

    eta_mu: np.ndarray
    eta_sigma: np.ndarray

    def __post_init__(self):
        em = np.asarray(self.eta_mu, dtype=np.float64)
        es = np.asarray(self.eta_sigma, dtype=np.float64)
        if em.shape != es.shape or em.ndim != 1:
            raise DimensionError(f"predictor shapes differ: {em.shape} vs {es.shape}")
        object.__setattr__(self, "eta_mu", em)
        object.__setattr__(self, "eta_sigma", es)

    @property
    def mu(self) -> np.ndarray:
        return self.eta_mu

    @property
    def sigma(self) -> np.ndarray:
        return np.exp(self.eta_sigma)


def _check(y, p: PredictorPair):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape != p.eta_mu.shape:
        raise DimensionError(f"y has shape {y.shape}, predictors have {p.eta_mu.shape}")
    for name, v in (("y", y), ("eta_mu", p.eta_mu), ("eta_sigma", p.eta_sigma)):
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise NumericError(f"{name} is not finite at index {bad[0]}")
    clamped = np.abs(p.eta_sigma) > K.ETA_SIGMA_BOUND
    if np.any(clamped):
        warnings.warn(
            f"eta_sigma clamped to +/-{K.ETA_SIGMA_BOUND:g} at {int(clamped.sum())} "
            f"observation(s), first index {int(np.argmax(clamped))}",
            RuntimeWarning,
            stacklevel=3,
        )
    return y


def _finite_or_raise(values: np.ndarray, what: str) -> np.ndarray:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NumericError(f"{what} overflowed at index {bad[0]}")
    return values


def loss(y, p: PredictorPair) -> float:
    """Total negative Gaussian log-likelihood, constant included."""
    y = _check(y, p)
    total = float(K.loss_sum(y, p.eta_mu, p.eta_sigma))
    if not np.isfinite(total):
        _finite_or_raise(K.pointwise_loss(y, p.eta_mu, p.eta_sigma), "loss")
        raise NumericError("loss sum overflowed")
    return total


def grad_mu(y, p: PredictorPair) -> np.ndarray:
    """Negative gradient of the loss w.r.t. ``eta_mu``: ``(y - eta_mu) / sigma^2``."""
    y = _check(y, p)
    return _finite_or_raise(K.neg_grad_mu(y, p.eta_mu, p.eta_sigma), "grad_mu")


def grad_sigma(y, p: PredictorPair) -> np.ndarray:
    """Negative gradient w.r.t. ``eta_sigma``: ``-1 + (y - eta_mu)^2 / sigma^2``."""
    y = _check(y, p)
    return _finite_or_raise(K.neg_grad_sigma(y, p.eta_mu, p.eta_sigma), "grad_sigma")


class GaussianLocScale:
    """Stateless descriptor of the Gaussian family with identity/log links."""

    name = "GaussianLocScale"
    parameters: Sequence[str] = ("mu", "sigma")

    loss = staticmethod(loss)
    grad_mu = staticmethod(grad_mu)
    grad_sigma = staticmethod(grad_sigma)

    @staticmethod
    def link(parameter: str, value):
        value = np.asarray(value, dtype=np.float64)
        return value if parameter == "mu" else np.log(value)

    @staticmethod
    def inverse_link(parameter: str, eta):
        eta = np.asarray(eta, dtype=np.float64)
        return eta if parameter == "mu" else np.exp(eta)

    def __repr__(self):
        return "GaussianLocScale()"
