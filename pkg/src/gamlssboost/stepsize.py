"""Step-length policies for the mu and sigma updates.

``FSL`` applies a fixed step. The adaptive policies take ``lambda`` times an
optimal step ``nu*`` that minimises the outer risk along the base-learner:

* ``ASL``     -- ``nu*`` by line search for both parameters;
* ``SAASL``   -- closed form for mu, line search for sigma;
* ``SAASL05`` -- closed form for mu, ``nu* = 0.5`` for sigma.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import _kernels as K
from .errors import DegenerateLearnerError, DimensionError, NumericError, UsageError

INVPHI = K.INVPHI


class StepKind(str, enum.Enum):
    FSL = "fsl"
    ASL = "asl"
    SAASL = "saasl"
    SAASL05 = "saasl05"

    @property
    def code(self) -> int:
        return {"fsl": K.FSL, "asl": K.ASL, "saasl": K.SAASL, "saasl05": K.SAASL05}[self.value]


@dataclass(frozen=True)
class StepPolicy:
    kind: StepKind = StepKind.SAASL
    lam: float = 0.1
    nu0: float = 0.1
    interval_mu: Tuple[float, float] = (0.0, 10.0)
    interval_sigma: Tuple[float, float] = (0.0, 1.0)
    tol: float = 1e-6
    maxit: int = 200

    def __post_init__(self):
        try:
            kind = StepKind(str(getattr(self.kind, "value", self.kind)).lower())
        except ValueError:
            raise UsageError(f"unknown step policy {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if not 0.0 < self.lam <= 1.0:
            raise UsageError(f"lambda must lie in (0, 1], got {self.lam}")
        if not self.nu0 > 0.0:
            raise UsageError(f"nu0 must be positive, got {self.nu0}")
        if not self.tol > 0.0:
            raise UsageError(f"tol must be positive, got {self.tol}")
        for name in ("interval_mu", "interval_sigma"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not (0.0 <= lo < hi and math.isfinite(hi)):
                raise UsageError(f"{name} must satisfy 0 <= lo < hi, got [{lo}, {hi}]")
            object.__setattr__(self, name, (lo, hi))

    @classmethod
    def named(cls, name: str, **kwargs) -> "StepPolicy":
        return cls(kind=StepKind(name.lower()), **kwargs)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lambda": self.lam,
            "nu0": self.nu0,
            "interval_mu": list(self.interval_mu),
            "interval_sigma": list(self.interval_sigma),
            "tol": self.tol,
        }


@dataclass(frozen=True)
class StepResult:
    nu_star: float
    nu: float
    boundary_hit: bool = False


def analytic_nu_mu(h, sigma_sq_prev) -> float:
    """Closed-form optimal mu step: ``sum(h^2) / sum(h^2 / sigma^2)``.

    A weighted harmonic mean of the previous variances, so it equals the
    variance when that is constant across observations.
    """
    h = np.asarray(h, dtype=np.float64)
    s2 = np.asarray(sigma_sq_prev, dtype=np.float64)
    if h.shape != s2.shape:
        raise DimensionError(f"h has shape {h.shape}, sigma_sq_prev has {s2.shape}")
    if not np.all(s2 > 0.0) or not np.all(np.isfinite(s2)):
        raise NumericError("sigma_sq_prev must be finite and positive")
    if not np.dot(h, h) > 0.0:
        raise DegenerateLearnerError("base-learner fit is identically zero")
    return float(K.analytic_nu_mu(h, 1.0 / s2))


def line_search(
    phi: Callable[[float], float],
    interval: Tuple[float, float] = (0.0, 1.0),
    tol: float = 1e-6,
    maxit: int = 200,
) -> Tuple[float, bool]:
    """Golden-section minimisation of a unimodal ``phi`` on a closed interval.

    Returns ``(nu, boundary_hit)``. The endpoints are compared against the
    bracketed minimum at the end, so monotone objectives return the endpoint
    exactly.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise UsageError(f"empty interval [{lo}, {hi}]")

    def f(nu):
        val = float(phi(nu))
        if not math.isfinite(val):
            raise NumericError(f"objective is not finite at nu={nu!r}")
        return val

    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < maxit:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    fx, flo, fhi = f(x), f(lo), f(hi)
    if flo <= fx and flo <= fhi:
        x = lo
    elif fhi < fx:
        x = hi
    return x, (abs(x - lo) <= tol or abs(hi - x) <= tol)


def mu_risk_along(y, eta_mu, eta_sigma, h) -> Callable[[float], float]:
    """Outer risk as a function of the step taken along ``h`` for mu."""
    y, em, es, h = (np.asarray(v, dtype=np.float64) for v in (y, eta_mu, eta_sigma, h))
    return lambda nu: float(K.loss_sum(y, em + nu * h, es))


def sigma_risk_along(y, eta_mu, eta_sigma, h) -> Callable[[float], float]:
    """Outer risk (relative to ``nu = 0``) along ``h`` for sigma.

    Uses ``expm1`` so tiny learners still resolve the minimiser.
    """
    y, em, es, h = (np.asarray(v, dtype=np.float64) for v in (y, eta_mu, eta_sigma, h))
    r = y - em
    q = r * r * np.exp(-2.0 * K.clamp_eta_sigma(es))
    s = float(np.sum(h))
    return lambda nu: float(K.risk_delta(K.SIGMA, float(nu), s, 0.0, h, q))


def nu_sigma_foc_residual(nu: float, h, eps) -> float:
    """First-order condition of the sigma risk along ``h``.

    ``sum(h) - sum((h + eps + 1) * h * exp(-2 nu h))``, where ``eps`` are the
    residuals of regressing the sigma gradient on ``h``. Zero at the optimum.
    """
    h = np.asarray(h, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if h.shape != eps.shape:
        raise DimensionError(f"h has shape {h.shape}, eps has {eps.shape}")
    with np.errstate(over="ignore"):
        decay = np.exp(-2.0 * nu * h)
    if not np.all(np.isfinite(decay)):
        raise NumericError(f"exp overflow at nu={nu!r}")
    return float(np.sum(h) - np.sum((h + eps + 1.0) * h * decay))


def step_for(
    parameter: str,
    policy: StepPolicy,
    risk_along_nu: Optional[Callable[[float], float]],
    h,
    sigma_sq_prev=None,
) -> StepResult:
    """Step-length for one candidate update under ``policy``."""
    if parameter not in ("mu", "sigma"):
        raise UsageError(f"parameter must be 'mu' or 'sigma', got {parameter!r}")
    kind = policy.kind
    if kind is StepKind.FSL:
        return StepResult(1.0, policy.nu0, False)
    if parameter == "mu" and kind in (StepKind.SAASL, StepKind.SAASL05):
        if sigma_sq_prev is None:
            raise UsageError(f"{kind.value} needs sigma_sq_prev for the mu step")
        nu_star = analytic_nu_mu(h, sigma_sq_prev)
        return StepResult(nu_star, policy.lam * nu_star, False)
    if parameter == "sigma" and kind is StepKind.SAASL05:
        return StepResult(0.5, policy.lam * 0.5, False)
    if risk_along_nu is None:
        raise UsageError(f"{kind.value} needs risk_along_nu for the {parameter} step")
    interval = policy.interval_mu if parameter == "mu" else policy.interval_sigma
    nu_star, hit = line_search(risk_along_nu, interval, policy.tol, policy.maxit)
    return StepResult(nu_star, policy.lam * nu_star, hit)
