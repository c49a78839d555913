"""Hot numeric kernels shared by the public API and the boosting loop.

Everything here sticks to the numpy subset numba can compile, so the same
source is either ``@njit``-compiled or run as plain vectorised numpy (see
``_jit``). Kernels report problems through integer status codes rather than
exceptions; the Python layer turns them into proper errors.
"""
import math

import numpy as np

from ._jit import jit

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
ETA_SIGMA_BOUND = 350.0
INVPHI = 0.5 * (math.sqrt(5.0) - 1.0)

# step policies
FSL = 0
ASL = 1
SAASL = 2
SAASL05 = 3

# distribution parameters
MU = 0
SIGMA = 1

# status codes
OK = 0
DEGENERATE = 1
NUMERIC = 2
# Relative size (squared norms) below which a fitted learner counts as zero.
DEGENERATE_RATIO = 1e-28


@jit
def clamp_eta_sigma(es):
    return np.minimum(np.maximum(es, -ETA_SIGMA_BOUND), ETA_SIGMA_BOUND)


@jit
def pointwise_loss(y, em, es):
    es = clamp_eta_sigma(es)
    r = y - em
    return HALF_LOG_2PI + es + 0.5 * r * r * np.exp(-2.0 * es)


@jit
def loss_sum(y, em, es):
    es = clamp_eta_sigma(es)
    r = y - em
    return y.shape[0] * HALF_LOG_2PI + np.sum(es + 0.5 * r * r * np.exp(-2.0 * es))


@jit
def neg_grad_mu(y, em, es):
    return (y - em) * np.exp(-2.0 * clamp_eta_sigma(es))


@jit
def neg_grad_sigma(y, em, es):
    r = y - em
    return r * r * np.exp(-2.0 * clamp_eta_sigma(es)) - 1.0


@jit
def column_rss(XcT, sxx, u):
    """RSS of the simple linear fit of ``u`` on every (pre-centred) column."""
    d = u - np.mean(u)
    suu = np.dot(d, d)
    sxu = XcT @ d
    safe = np.where(sxx > 0.0, sxx, 1.0)
    explained = np.where(sxx > 0.0, sxu * sxu / safe, 0.0)
    return np.maximum(suu - explained, 0.0), sxu


@jit
def best_learner(XT, XcT, xmean, sxx, u):
    """Best-fitting simple linear learner; ties go to the lowest column."""
    rss, sxu = column_rss(XcT, sxx, u)
    j = np.argmin(rss)
    b1 = sxu[j] / sxx[j] if sxx[j] > 0.0 else 0.0
    b0 = np.mean(u) - b1 * xmean[j]
    h = b0 + b1 * XT[j]
    return j, b0, b1, rss[j], h


@jit
def analytic_nu_mu(h, inv_sigma_sq):
    h2 = h * h
    return np.sum(h2) / np.sum(h2 * inv_sigma_sq)


@jit
def risk_delta(param, nu, lin, quad, h, q):
    """Outer risk along the step, minus its value at ``nu = 0``.

    For mu the restriction is the exact quadratic ``-nu*lin + nu^2*quad/2``;
    for sigma it is ``nu*sum(h) + sum(q*(exp(-2 nu h) - 1))/2`` with
    ``q = (y - eta_mu)^2 / sigma^2``.
    """
    if param == MU:
        return -nu * lin + 0.5 * nu * nu * quad
    return nu * lin + 0.5 * np.sum(q * np.expm1(-2.0 * nu * h))


@jit
def golden_section(param, lo, hi, tol, maxit, lin, quad, h, q):
    """Golden-section minimiser of ``risk_delta`` on ``[lo, hi]``.

    Returns ``(nu, boundary_hit, ok)``; ``ok`` is False if the objective was
    non-finite anywhere it was evaluated.
    """
    a = lo
    b = hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = risk_delta(param, c, lin, quad, h, q)
    fd = risk_delta(param, d, lin, quad, h, q)
    finite = np.isfinite(fc) and np.isfinite(fd)
    it = 0
    while b - a > tol and it < maxit:
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = risk_delta(param, c, lin, quad, h, q)
            finite = finite and np.isfinite(fc)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            fd = risk_delta(param, d, lin, quad, h, q)
            finite = finite and np.isfinite(fd)
        it += 1
    x = 0.5 * (a + b)
    fx = risk_delta(param, x, lin, quad, h, q)
    flo = risk_delta(param, lo, lin, quad, h, q)
    fhi = risk_delta(param, hi, lin, quad, h, q)
    finite = finite and np.isfinite(fx) and np.isfinite(flo) and np.isfinite(fhi)
    if flo <= fx and flo <= fhi:
        x = lo
    elif fhi < fx:
        x = hi
    boundary = abs(x - lo) <= tol or abs(hi - x) <= tol
    return x, boundary, finite


@jit
def propose(param, y, XT, XcT, xmean, sxx, em, es, w, kind, lam, nu0, lo, hi, tol, maxit):
    """Candidate update of one distribution parameter.

    Fits every base-learner to the parameter's negative gradient, keeps the
    best one, sets its step-length according to ``kind`` and evaluates the
    outer risk after applying it. ``w`` is ``exp(-2 * eta_sigma)``.
    """
    r = y - em
    q = r * r * w
    if param == MU:
        u = r * w
    else:
        u = q - 1.0
    j, b0, b1, rss, h = best_learner(XT, XcT, xmean, sxx, u)
    hh = np.dot(h, h)
    nu_star = 0.0
    nu = 0.0
    boundary = False
    # A fit at rounding level of the gradient carries no information.
    if not hh > DEGENERATE_RATIO * np.dot(u, u):
        return DEGENERATE, j, b0, b1, nu_star, nu, boundary, np.inf, h
    if kind == FSL:
        nu_star = 1.0
        nu = nu0
    else:
        if param == MU:
            if kind == ASL:
                nu_star, boundary, finite = golden_section(
                    MU, lo, hi, tol, maxit, np.dot(u, h), np.dot(h * h, w), h, q
                )
                if not finite:
                    return NUMERIC, j, b0, b1, nu_star, nu, boundary, np.nan, h
            else:
                nu_star = hh / np.dot(h * h, w)
        else:
            if kind == SAASL05:
                nu_star = 0.5
            else:
                nu_star, boundary, finite = golden_section(
                    SIGMA, lo, hi, tol, maxit, np.sum(h), 0.0, h, q
                )
                if not finite:
                    return NUMERIC, j, b0, b1, nu_star, nu, boundary, np.nan, h
        nu = lam * nu_star
    if param == MU:
        risk = loss_sum(y, em + nu * h, es)
    else:
        risk = loss_sum(y, em, es + nu * h)
    if not np.isfinite(risk):
        return NUMERIC, j, b0, b1, nu_star, nu, boundary, risk, h
    return OK, j, b0, b1, nu_star, nu, boundary, risk, h


@jit
def boost_loop(
    y, XT, XcT, xmean, sxx, offset_mu, offset_sigma,
    kind, lam, nu0, lo_mu, hi_mu, lo_sigma, hi_sigma, tol, maxit,
    stop_mu, stop_sigma, cyclical,
):
    """Run the boosting iterations and return the full trace as arrays.

    Non-cyclical mode runs ``stop_mu`` iterations (``stop_sigma`` is ignored)
    and updates only the parameter with the smaller candidate risk, mu on
    ties. Cyclical mode updates mu then sigma in each outer iteration, each
    until its own stopping value.
    """
    n = y.shape[0]
    em = np.full(n, offset_mu)
    es = np.full(n, offset_sigma)
    cap = stop_mu + stop_sigma if cyclical else stop_mu
    t_m = np.zeros(cap, dtype=np.int64)
    t_k = np.zeros(cap, dtype=np.int64)
    t_j = np.zeros(cap, dtype=np.int64)
    t_nu_star = np.zeros(cap)
    t_nu = np.zeros(cap)
    t_drho_mu = np.zeros(cap)
    t_drho_sigma = np.zeros(cap)
    t_risk = np.zeros(cap)
    t_b0 = np.zeros(cap)
    t_b1 = np.zeros(cap)
    t_boundary = np.zeros(cap, dtype=np.bool_)
    count = 0
    status = OK
    fail_iter = -1

    if not cyclical:
        for m in range(stop_mu):
            w = np.exp(-2.0 * clamp_eta_sigma(es))
            sm, jm, b0m, b1m, nsm, nm, bdm, rm, hm = propose(
                MU, y, XT, XcT, xmean, sxx, em, es, w, kind, lam, nu0, lo_mu, hi_mu, tol, maxit
            )
            ss, js, b0s, b1s, nss, ns, bds, rs, hs = propose(
                SIGMA, y, XT, XcT, xmean, sxx, em, es, w, kind, lam, nu0, lo_sigma, hi_sigma, tol, maxit
            )
            if sm == NUMERIC or ss == NUMERIC:
                status = NUMERIC
                fail_iter = m + 1
                break
            if sm == DEGENERATE and ss == DEGENERATE:
                status = DEGENERATE
                fail_iter = m + 1
                break
            t_m[count] = m + 1
            t_drho_mu[count] = rm
            t_drho_sigma[count] = rs
            if rm <= rs:
                em = em + nm * hm
                t_k[count] = MU
                t_j[count] = jm
                t_nu_star[count] = nsm
                t_nu[count] = nm
                t_risk[count] = rm
                t_b0[count] = b0m
                t_b1[count] = b1m
                t_boundary[count] = bdm
            else:
                es = es + ns * hs
                t_k[count] = SIGMA
                t_j[count] = js
                t_nu_star[count] = nss
                t_nu[count] = ns
                t_risk[count] = rs
                t_b0[count] = b0s
                t_b1[count] = b1s
                t_boundary[count] = bds
            count += 1
    else:
        for m in range(max(stop_mu, stop_sigma)):
            for param in (MU, SIGMA):
                if param == MU and m >= stop_mu:
                    continue
                if param == SIGMA and m >= stop_sigma:
                    continue
                lo = lo_mu if param == MU else lo_sigma
                hi = hi_mu if param == MU else hi_sigma
                w = np.exp(-2.0 * clamp_eta_sigma(es))
                st, j, b0, b1, nst, nu, bd, rk, h = propose(
                    param, y, XT, XcT, xmean, sxx, em, es, w, kind, lam, nu0, lo, hi, tol, maxit
                )
                if st == NUMERIC:
                    status = NUMERIC
                    fail_iter = m + 1
                    break
                if st == DEGENERATE:
                    continue
                if param == MU:
                    em = em + nu * h
                    t_drho_mu[count] = rk
                    t_drho_sigma[count] = np.nan
                else:
                    es = es + nu * h
                    t_drho_mu[count] = np.nan
                    t_drho_sigma[count] = rk
                t_m[count] = m + 1
                t_k[count] = param
                t_j[count] = j
                t_nu_star[count] = nst
                t_nu[count] = nu
                t_risk[count] = rk
                t_b0[count] = b0
                t_b1[count] = b1
                t_boundary[count] = bd
                count += 1
            if status != OK:
                break

    return (
        count, status, fail_iter, em, es,
        t_m[:count], t_k[:count], t_j[:count], t_nu_star[:count], t_nu[:count],
        t_drho_mu[:count], t_drho_sigma[:count], t_risk[:count],
        t_b0[:count], t_b1[:count], t_boundary[:count],
    )


@jit
def replay_risk(y, XT, offset_mu, offset_sigma, t_k, t_j, t_nu, t_b0, t_b1):
    """Total loss on ``(y, XT)`` after each prefix of a recorded trace."""
    n = y.shape[0]
    em = np.full(n, offset_mu)
    es = np.full(n, offset_sigma)
    out = np.empty(t_k.shape[0] + 1)
    out[0] = loss_sum(y, em, es)
    for t in range(t_k.shape[0]):
        h = t_b0[t] + t_b1[t] * XT[t_j[t]]
        if t_k[t] == MU:
            em = em + t_nu[t] * h
        else:
            es = es + t_nu[t] * h
        out[t + 1] = loss_sum(y, em, es)
    return out
