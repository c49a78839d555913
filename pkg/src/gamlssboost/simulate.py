"""Simulation designs, evaluation metrics and the replicate-study driver."""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from .core import Dataset
from .engine import BoostModel, boost_noncyclical
from .errors import GamlssBoostError, UsageError
from .rng import PortableRNG, spawn_seeds
from .stepsize import StepPolicy
from .tuning import kfold_cv, thread_count

logger = logging.getLogger(__name__)

BALANCED = "balanced"
LARGE_VARIANCE = "large_variance"


def _truth_for(kind: str, J: int):
    mu = np.zeros(J)
    sigma = np.zeros(J)
    if kind == BALANCED:
        mu[:4] = [1.0, 2.0, 0.5, -1.0]
        sigma[2:6] = [0.5, 0.25, -0.25, -0.5]
        return 0.0, mu, 0.0, sigma
    if kind == LARGE_VARIANCE:
        mu[:3] = [1.0, 2.0, -1.0]
        sigma[:3] = [0.1, -0.2, 0.1]
        return 1.0, mu, 5.0, sigma
    raise UsageError(f"unknown design {kind!r}; expected {BALANCED!r} or {LARGE_VARIANCE!r}")


@dataclass(frozen=True)
class SimDesign:
    """One of the two simulation set-ups, with ``p_ninf`` extra noise covariates.

    ``balanced`` has six informative covariates (x1..x4 for mu, x3..x6 for
    sigma); ``large_variance`` has three shared informative covariates and a
    sigma intercept of 5, i.e. standard deviations around 150. ``p_ninf``
    defaults to 0 and 2 respectively.
    """

    kind: str = BALANCED
    n: int = 500
    p_ninf: Optional[int] = None
    seed: int = 0
    intercept_mu: float = field(init=False)
    coef_mu: np.ndarray = field(init=False, repr=False)
    intercept_sigma: float = field(init=False)
    coef_sigma: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.p_ninf is None:
            object.__setattr__(self, "p_ninf", 2 if self.kind == LARGE_VARIANCE else 0)
        if self.n < 10:
            raise UsageError(f"n must be >= 10, got {self.n}")
        if self.p_ninf < 0:
            raise UsageError(f"p_ninf must be >= 0, got {self.p_ninf}")
        n_inf = 6 if self.kind == BALANCED else 3
        b0m, bm, b0s, bs = _truth_for(self.kind, n_inf + self.p_ninf)
        object.__setattr__(self, "intercept_mu", b0m)
        object.__setattr__(self, "coef_mu", bm)
        object.__setattr__(self, "intercept_sigma", b0s)
        object.__setattr__(self, "coef_sigma", bs)

    @classmethod
    def large_variance(cls, n: int = 500, p_ninf: int = 2, seed: int = 0) -> "SimDesign":
        return cls(LARGE_VARIANCE, n, p_ninf, seed)

    @property
    def J(self) -> int:
        return self.coef_mu.shape[0]

    def with_seed(self, seed: int) -> "SimDesign":
        return SimDesign(self.kind, self.n, self.p_ninf, seed)


@dataclass(frozen=True)
class Truth:
    intercept_mu: float
    coef_mu: np.ndarray
    intercept_sigma: float
    coef_sigma: np.ndarray
    eta_mu: np.ndarray
    eta_sigma: np.ndarray

    @property
    def informative_mu(self) -> np.ndarray:
        return np.flatnonzero(self.coef_mu)

    @property
    def informative_sigma(self) -> np.ndarray:
        return np.flatnonzero(self.coef_sigma)

    def predictors(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.intercept_mu + X @ self.coef_mu, self.intercept_sigma + X @ self.coef_sigma


@dataclass(frozen=True)
class SimData:
    data: Dataset
    truth: Truth


def generate(design: SimDesign) -> SimData:
    """Draw covariates iid Uniform(-1, 1) and ``y ~ N(mu, sigma)``."""
    rng = PortableRNG(design.seed)
    X = rng.uniform((design.n, design.J), -1.0, 1.0)
    eta_mu = design.intercept_mu + X @ design.coef_mu
    eta_sigma = design.intercept_sigma + X @ design.coef_sigma
    y = eta_mu + np.exp(eta_sigma) * rng.normal(design.n)
    truth = Truth(
        design.intercept_mu, design.coef_mu.copy(), design.intercept_sigma,
        design.coef_sigma.copy(), eta_mu, eta_sigma,
    )
    return SimData(Dataset(y, X), truth)


@dataclass(frozen=True)
class SimMetrics:
    mse_mu: float
    mse_sigma: float
    in_sample_mse: float
    fp_mu: int
    fp_sigma: int
    fn_mu: int
    fn_sigma: int
    p_m_mu: float
    m_stop_used: int


METRIC_FIELDS = tuple(f.name for f in dataclasses.fields(SimMetrics))


def evaluate(model: BoostModel, truth: Truth, data: Dataset) -> SimMetrics:
    """Predictor-level MSEs, in-sample MSE, selection errors and ``p_m_mu``.

    A covariate counts as selected when its accumulated slope is non-zero.
    """
    if model.J != truth.coef_mu.shape[0] or data.J != model.J:
        raise UsageError("model, truth and data disagree on the number of covariates")
    eta_mu, eta_sigma = truth.predictors(data.X)
    fit_mu, fit_sigma = model.linear_predictors(data.X)
    sel_mu = model.coef_mu[:, 1] != 0.0
    sel_sigma = model.coef_sigma[:, 1] != 0.0
    inf_mu = truth.coef_mu != 0.0
    inf_sigma = truth.coef_sigma != 0.0
    return SimMetrics(
        mse_mu=float(np.mean((eta_mu - fit_mu) ** 2)),
        mse_sigma=float(np.mean((eta_sigma - fit_sigma) ** 2)),
        in_sample_mse=float(np.mean((data.y - fit_mu) ** 2)),
        fp_mu=int(np.sum(sel_mu & ~inf_mu)),
        fp_sigma=int(np.sum(sel_sigma & ~inf_sigma)),
        fn_mu=int(np.sum(~sel_mu & inf_mu)),
        fn_sigma=int(np.sum(~sel_sigma & inf_sigma)),
        p_m_mu=float(model.p_m_mu),
        m_stop_used=int(model.m_done),
    )


@dataclass(frozen=True)
class CvSettings:
    """Cross-validation settings for a study; ``m_max`` may differ per policy kind."""

    K: int = 10
    m_max: Union[int, Mapping[str, int]] = 1000

    def m_max_for(self, policy: StepPolicy) -> int:
        if isinstance(self.m_max, Mapping):
            try:
                return int(self.m_max[policy.kind.value])
            except KeyError:
                raise UsageError(f"no m_max given for policy {policy.kind.value!r}") from None
        return int(self.m_max)


@dataclass(frozen=True)
class StudyRow:
    run: int
    seed: int
    policy: str
    status: str
    metrics: Optional[SimMetrics]
    cv_m_best: int = -1

    def as_dict(self) -> Dict[str, object]:
        out = {"run": self.run, "seed": self.seed, "policy": self.policy, "status": self.status}
        if self.metrics is None:
            out.update({name: float("nan") for name in METRIC_FIELDS})
        else:
            out.update(dataclasses.asdict(self.metrics))
        return out


STUDY_COLUMNS = ("run", "seed", "policy", "status") + METRIC_FIELDS


def _run_one(
    run: int,
    seed: int,
    design: SimDesign,
    policies: Sequence[StepPolicy],
    cv: CvSettings,
    on_fit: Optional[Callable[[BoostModel, Dataset], None]],
) -> List[StudyRow]:
    sim = generate(design.with_seed(seed))
    rows = []
    for policy in policies:
        try:
            res = kfold_cv(sim.data, policy, cv.m_max_for(policy), cv.K, seed=seed, n_jobs=1, on_fit=on_fit)
            model = boost_noncyclical(sim.data, policy, res.m_best)
            if on_fit is not None:
                on_fit(model, sim.data)
            rows.append(StudyRow(run, seed, policy.kind.value, "ok", evaluate(model, sim.truth, sim.data), res.m_best))
        except GamlssBoostError as exc:
            logger.warning("run %d, policy %s failed: %s", run, policy.kind.value, exc)
            rows.append(StudyRow(run, seed, policy.kind.value, f"failed: {type(exc).__name__}", None))
    return rows


def run_study(
    design: SimDesign,
    policies: Sequence[StepPolicy],
    B: int,
    cv: CvSettings = CvSettings(),
    n_jobs: Optional[int] = None,
    on_fit: Optional[Callable[[BoostModel, Dataset], None]] = None,
) -> List[StudyRow]:
    """Run ``B`` replicates of ``design``; one row per (replicate, policy).

    Replicate seeds are spawned from ``design.seed``; each replicate uses its
    seed both for the data and for the CV fold split. ``on_fit(model, data)``
    sees every fitted model with its training data, CV folds included.
    """
    if B < 1:
        raise UsageError(f"B must be >= 1, got {B}")
    if not policies:
        raise UsageError("need at least one policy")
    seeds = spawn_seeds(design.seed, B)
    workers = min(B, n_jobs if n_jobs is not None else thread_count())

    def job(r):
        return _run_one(r, seeds[r], design, policies, cv, on_fit)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_run = list(pool.map(job, range(B)))
    else:
        per_run = [job(r) for r in range(B)]
    return [row for rows in per_run for row in rows]
