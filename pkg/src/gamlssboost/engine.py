"""Componentwise boosting loops for the Gaussian location-scale model."""
from __future__ import annotations

import logging
import operator
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Tuple

import numpy as np

from . import _kernels as K
from .baselearner import CenteredDesign
from .core import Dataset
from .errors import DegenerateDataError, DimensionError, NumericError, UsageError
from .stepsize import StepPolicy

logger = logging.getLogger(__name__)

PARAM_NAMES = ("mu", "sigma")


@dataclass(frozen=True)
class TraceRecord:
    m: int
    k_star: str
    j_star: int
    nu_star: float
    nu: float
    delta_rho_mu: float
    delta_rho_sigma: float
    risk_after: float
    b0: float
    b1: float
    boundary_hit: bool


class Trace:
    """Per-update history of a fit, stored column-wise.

    Indexing yields :class:`TraceRecord` objects; the raw arrays are exposed
    as attributes for vectorised use.
    """

    _fields = ("m", "k", "j", "nu_star", "nu", "drho_mu", "drho_sigma", "risk", "b0", "b1", "boundary")

    def __init__(self, m, k, j, nu_star, nu, drho_mu, drho_sigma, risk, b0, b1, boundary):
        self.m = np.asarray(m, dtype=np.int64)
        self.k = np.asarray(k, dtype=np.int64)
        self.j = np.asarray(j, dtype=np.int64)
        self.nu_star = np.asarray(nu_star, dtype=np.float64)
        self.nu = np.asarray(nu, dtype=np.float64)
        self.drho_mu = np.asarray(drho_mu, dtype=np.float64)
        self.drho_sigma = np.asarray(drho_sigma, dtype=np.float64)
        self.risk = np.asarray(risk, dtype=np.float64)
        self.b0 = np.asarray(b0, dtype=np.float64)
        self.b1 = np.asarray(b1, dtype=np.float64)
        self.boundary = np.asarray(boundary, dtype=bool)
        for name in self._fields:
            getattr(self, name).setflags(write=False)

    @classmethod
    def empty(cls) -> "Trace":
        return cls(*([[]] * len(cls._fields)))

    def __len__(self) -> int:
        return self.k.shape[0]

    def __getitem__(self, i) -> TraceRecord:
        i = operator.index(i)
        return TraceRecord(
            int(self.m[i]), PARAM_NAMES[self.k[i]], int(self.j[i]),
            float(self.nu_star[i]), float(self.nu[i]),
            float(self.drho_mu[i]), float(self.drho_sigma[i]), float(self.risk[i]),
            float(self.b0[i]), float(self.b1[i]), bool(self.boundary[i]),
        )

    def __iter__(self) -> Iterator[TraceRecord]:
        return (self[i] for i in range(len(self)))

    def head(self, m: int) -> "Trace":
        return Trace(*(getattr(self, f)[:m] for f in self._fields))

    @property
    def n_mu(self) -> int:
        return int(np.sum(self.k == K.MU))

    @property
    def n_sigma(self) -> int:
        return int(np.sum(self.k == K.SIGMA))


@dataclass(frozen=True)
class BoostModel:
    """Fitted additive predictors for mu and sigma.

    ``coef_mu``/``coef_sigma`` are ``(J, 2)`` arrays of accumulated
    ``(intercept, slope)`` contributions per covariate.
    """

    offset_mu: float
    offset_sigma: float
    coef_mu: np.ndarray
    coef_sigma: np.ndarray
    trace: Trace
    m_done: int
    policy: StepPolicy
    names: Tuple[str, ...]
    family: str = "GaussianLocScale"
    mode: str = "noncyclical"
    status: str = "ok"
    eta_mu: np.ndarray = field(default=None, repr=False)
    eta_sigma: np.ndarray = field(default=None, repr=False)

    @property
    def J(self) -> int:
        return self.coef_mu.shape[0]

    @property
    def intercept_mu(self) -> float:
        return self.offset_mu + float(self.coef_mu[:, 0].sum())

    @property
    def intercept_sigma(self) -> float:
        return self.offset_sigma + float(self.coef_sigma[:, 0].sum())

    @property
    def selected_mu(self) -> np.ndarray:
        return np.flatnonzero(self.coef_mu[:, 1] != 0.0)

    @property
    def selected_sigma(self) -> np.ndarray:
        return np.flatnonzero(self.coef_sigma[:, 1] != 0.0)

    @property
    def p_m_mu(self) -> float:
        return self.trace.n_mu / self.m_done if self.m_done else 0.0

    def linear_predictors(self, X) -> Tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.J:
            raise DimensionError(f"expected {self.J} columns, got shape {X.shape}")
        em = self.offset_mu + self.coef_mu[:, 0].sum() + X @ self.coef_mu[:, 1]
        es = self.offset_sigma + self.coef_sigma[:, 0].sum() + X @ self.coef_sigma[:, 1]
        return em, es

    def truncated(self, m: int) -> "BoostModel":
        """The model after its first ``m`` updates."""
        if not 0 <= m <= self.m_done:
            raise UsageError(f"m must lie in [0, {self.m_done}], got {m}")
        trace = self.trace.head(m)
        coef_mu, coef_sigma = _accumulate(self.J, trace)
        return BoostModel(
            self.offset_mu, self.offset_sigma, coef_mu, coef_sigma, trace, m,
            self.policy, self.names, self.family, self.mode, self.status,
        )


def _accumulate(J: int, trace: Trace):
    coef = np.zeros((2, J, 2))
    nu = trace.nu
    np.add.at(coef, (trace.k, trace.j, 0), nu * trace.b0)
    np.add.at(coef, (trace.k, trace.j, 1), nu * trace.b1)
    return coef[K.MU], coef[K.SIGMA]


def init_offsets(y) -> Tuple[float, float]:
    """Gaussian MLE offsets: ``(mean(y), log(sd(y)))`` with the 1/n variance."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] < 2:
        raise DegenerateDataError("need at least two observations")
    mean = float(np.mean(y))
    var = float(np.mean((y - mean) ** 2))
    if not var > 0.0:
        raise DegenerateDataError("response has zero variance")
    return mean, 0.5 * np.log(var)


def _check_stop(value, name) -> int:
    try:
        value = operator.index(value)
    except TypeError:
        raise UsageError(f"{name} must be an integer, got {value!r}") from None
    if value < 0:
        raise UsageError(f"{name} must be >= 0, got {value}")
    return value


def _fit(data: Dataset, policy: StepPolicy, stop_mu: int, stop_sigma: int, cyclical: bool) -> BoostModel:
    om, os_ = init_offsets(data.y)
    design = CenteredDesign.from_matrix(data.X)
    lo_mu, hi_mu = policy.interval_mu
    lo_sg, hi_sg = policy.interval_sigma
    out = K.boost_loop(
        data.y, design.XT, design.XcT, design.xmean, design.sxx, om, os_,
        policy.kind.code, policy.lam, policy.nu0, lo_mu, hi_mu, lo_sg, hi_sg,
        policy.tol, policy.maxit, stop_mu, stop_sigma, cyclical,
    )
    count, status, fail_iter, em, es = out[:5]
    if status == K.NUMERIC:
        raise NumericError(f"non-finite risk in boosting iteration {fail_iter}")
    trace = Trace(*out[5:])
    coef_mu, coef_sigma = _accumulate(data.J, trace)
    status_name = "ok"
    if status == K.DEGENERATE:
        status_name = "degenerate"
        logger.warning("both base-learners degenerate at iteration %d; stopping early", fail_iter)
    hits = trace.boundary
    if hits.any():
        for k, name in enumerate(PARAM_NAMES):
            n_hit = int(np.sum(hits & (trace.k == k)))
            if n_hit:
                interval = policy.interval_mu if k == K.MU else policy.interval_sigma
                logger.warning(
                    "optimal %s step-length hit the search interval [%g, %g] in %d of %d updates; "
                    "consider widening it",
                    name, interval[0], interval[1], n_hit, len(trace),
                )
    if np.any(np.abs(es) > K.ETA_SIGMA_BOUND):
        warnings.warn("eta_sigma left [-350, 350]; loss and gradients were clamped", RuntimeWarning)
    em.setflags(write=False)
    es.setflags(write=False)
    return BoostModel(
        om, os_, coef_mu, coef_sigma, trace, int(count), policy, data.names,
        mode="cyclical" if cyclical else "noncyclical", status=status_name,
        eta_mu=em, eta_sigma=es,
    )


def boost_noncyclical(data: Dataset, policy: StepPolicy, m_stop: int) -> BoostModel:
    """Non-cyclical boosting: each iteration updates only the parameter whose
    candidate update yields the lower outer risk (mu on ties)."""
    return _fit(data, policy, _check_stop(m_stop, "m_stop"), 0, False)


def boost_cyclical(data: Dataset, policy: StepPolicy, m_stop_mu: int, m_stop_sigma: int) -> BoostModel:
    """Cyclical boosting: mu then sigma in every iteration, each until its own stop."""
    return _fit(
        data, policy, _check_stop(m_stop_mu, "m_stop_mu"), _check_stop(m_stop_sigma, "m_stop_sigma"), True
    )


def predict(model: BoostModel, Xnew) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(mu_hat, sigma_hat)`` for the rows of ``Xnew``."""
    em, es = model.linear_predictors(Xnew)
    return em, np.exp(es)


def risk_path(model: BoostModel, data: Dataset) -> np.ndarray:
    """Total loss on ``data`` after 0, 1, ..., ``m_done`` updates."""
    if data.J != model.J:
        raise DimensionError(f"model has {model.J} covariates, data has {data.J}")
    t = model.trace
    XT = np.ascontiguousarray(data.X.T)
    return K.replay_risk(data.y, XT, model.offset_mu, model.offset_sigma, t.k, t.j, t.nu, t.b0, t.b1)
