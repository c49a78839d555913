import logging
import math

import numpy as np
import pytest

from gamlssboost import (
    Dataset,
    DegenerateDataError,
    PredictorPair,
    StepPolicy,
    UsageError,
    boost_cyclical,
    boost_noncyclical,
    generate,
    init_offsets,
    loss,
    predict,
    risk_path,
    SimDesign,
)

from oracles import hand_boost, ols, total_loss

FSL = StepPolicy.named("fsl")
SAASL = StepPolicy.named("saasl")


@pytest.fixture(scope="module")
def balanced():
    return generate(SimDesign(seed=11)).data


@pytest.fixture(scope="module")
def tiny():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, size=(5, 2))
    y = 1.0 + 2.0 * X[:, 0] + rng.normal(size=5) * np.exp(0.5 * X[:, 1])
    return Dataset(y, X)


class TestOffsets:
    def test_unit_sd(self):
        assert init_offsets([-1.0, 1.0]) == (0.0, 0.0)

    def test_hand_computed(self):
        om, os_ = init_offsets([0.0, 0.0, 0.0, 4.0])
        assert om == 1.0
        assert os_ == pytest.approx(math.log(math.sqrt(3.0)), rel=1e-15)

    def test_large_sd(self):
        y = 5.0 + 150.0 * np.random.default_rng(0).normal(size=20000)
        assert init_offsets(y)[1] == pytest.approx(math.log(150.0), abs=0.02)

    def test_constant_response(self):
        with pytest.raises(DegenerateDataError):
            init_offsets([2.0, 2.0, 2.0])


def test_zero_iterations(balanced):
    model = boost_noncyclical(balanced, SAASL, 0)
    assert not model.coef_mu.any() and not model.coef_sigma.any()
    om, os_ = init_offsets(balanced.y)
    mu, sigma = predict(model, balanced.X)
    np.testing.assert_array_equal(mu, om)
    np.testing.assert_allclose(sigma, math.exp(os_), rtol=1e-15)
    path = risk_path(model, balanced)
    assert path.shape == (1,)
    assert path[0] == pytest.approx(total_loss(balanced.y, np.full(balanced.n, om), np.full(balanced.n, os_)))
    assert model.p_m_mu == 0.0


def test_fsl_matches_hand_stepped_algorithm(tiny):
    offsets, cmu, csg, trace, em, es = hand_boost(tiny.y, tiny.X, 10)
    model = boost_noncyclical(tiny, FSL, 10)
    assert (model.offset_mu, model.offset_sigma) == pytest.approx(offsets, rel=1e-14)
    assert [(r.k_star, r.j_star) for r in model.trace] == [(k, j) for _, k, j, _ in trace]
    np.testing.assert_allclose(model.coef_mu, cmu, atol=1e-10)
    np.testing.assert_allclose(model.coef_sigma, csg, atol=1e-10)
    assert np.all(model.trace.nu == 0.1)


def test_saasl_matches_hand_stepped_algorithm():
    rng = np.random.default_rng(21)
    X = rng.uniform(-1, 1, size=(60, 3))
    y = X[:, 0] - X[:, 1] + rng.normal(size=60) * np.exp(0.7 * X[:, 2])
    data = Dataset(y, X)
    _, cmu, csg, trace, em, es = hand_boost(y, X, 25, policy="saasl")
    model = boost_noncyclical(data, SAASL, 25)
    assert [(r.k_star, r.j_star) for r in model.trace] == [(k, j) for _, k, j, _ in trace]
    np.testing.assert_allclose(model.trace.nu, [t[3] for t in trace], rtol=1e-5)
    np.testing.assert_allclose(model.eta_mu, em, atol=1e-5)
    np.testing.assert_allclose(model.eta_sigma, es, atol=1e-5)


def test_trace_bookkeeping(balanced):
    model = boost_noncyclical(balanced, SAASL, 200)
    t = model.trace
    assert len(t) == model.m_done == 200
    np.testing.assert_array_equal(t.m, np.arange(1, 201))
    assert t.n_mu + t.n_sigma == 200
    assert model.p_m_mu == t.n_mu / 200
    rec = t[0]
    assert rec.k_star in ("mu", "sigma")
    chosen = rec.delta_rho_mu if rec.k_star == "mu" else rec.delta_rho_sigma
    assert chosen == min(rec.delta_rho_mu, rec.delta_rho_sigma)
    np.testing.assert_allclose(t.risk, risk_path(model, balanced)[1:], rtol=1e-12)
    with pytest.raises(ValueError):
        t.nu[0] = 1.0


def test_asl_and_saasl_agree_on_balanced_design(balanced):
    a = boost_noncyclical(balanced, StepPolicy.named("asl"), 300)
    s = boost_noncyclical(balanced, SAASL, 300)
    np.testing.assert_array_equal(a.trace.k, s.trace.k)
    np.testing.assert_array_equal(a.trace.j, s.trace.j)
    np.testing.assert_allclose(a.trace.nu, s.trace.nu, atol=1e-4)


@pytest.mark.parametrize("policy", ["fsl", "asl", "saasl", "saasl05"])
def test_predictions_reconstruct_training_predictors(balanced, policy):
    model = boost_noncyclical(balanced, StepPolicy.named(policy), 150)
    em, es = model.linear_predictors(balanced.X)
    np.testing.assert_allclose(em, model.eta_mu, atol=1e-8)
    np.testing.assert_allclose(es, model.eta_sigma, atol=1e-8)
    path = risk_path(model, balanced)
    assert np.all(np.diff(path) <= 1e-9)
    assert path[-1] == pytest.approx(loss(balanced.y, PredictorPair(model.eta_mu, model.eta_sigma)), rel=1e-12)


def test_predict_permutes_with_rows(balanced):
    model = boost_noncyclical(balanced, SAASL, 100)
    perm = np.random.default_rng(0).permutation(balanced.n)
    mu, sigma = predict(model, balanced.X)
    mu_p, sigma_p = predict(model, balanced.X[perm])
    np.testing.assert_array_equal(mu_p, mu[perm])
    np.testing.assert_array_equal(sigma_p, sigma[perm])


def test_truncation_equals_shorter_fit(balanced):
    long = boost_noncyclical(balanced, SAASL, 120)
    short = boost_noncyclical(balanced, SAASL, 70)
    cut = long.truncated(70)
    np.testing.assert_allclose(cut.coef_mu, short.coef_mu, atol=1e-12)
    np.testing.assert_allclose(cut.coef_sigma, short.coef_sigma, atol=1e-12)
    with pytest.raises(UsageError):
        long.truncated(121)


def test_invalid_stop(balanced):
    with pytest.raises(UsageError):
        boost_noncyclical(balanced, SAASL, -1)
    with pytest.raises(UsageError):
        boost_noncyclical(balanced, SAASL, 2.5)


def test_degenerate_learners_stop_early(caplog):
    data = Dataset([0.0, 1.0, 3.0, 2.0], np.ones((4, 1)))
    with caplog.at_level(logging.WARNING):
        model = boost_noncyclical(data, SAASL, 5)
    assert model.m_done == 0
    assert model.status == "degenerate"
    assert "degenerate" in caplog.text


class TestCyclical:
    def test_zero_stops(self, balanced):
        model = boost_cyclical(balanced, SAASL, 0, 0)
        assert model.m_done == 0
        assert not model.coef_mu.any()

    def test_order_of_one_step_each(self, tiny):
        model = boost_cyclical(tiny, FSL, 1, 1)
        assert [r.k_star for r in model.trace] == ["mu", "sigma"]
        # The sigma update must use the already-updated mu.
        y, X = tiny.y, tiny.X
        om, os_ = init_offsets(y)
        em = np.full(5, om)
        es = np.full(5, os_)
        u = (y - em) / np.exp(2 * es)
        fits = [ols(X[:, j], u) for j in range(2)]
        j = int(np.argmin([f[2] for f in fits]))
        em = em + 0.1 * fits[j][3]
        u = (y - em) ** 2 / np.exp(2 * es) - 1
        fits = [ols(X[:, j], u) for j in range(2)]
        j = int(np.argmin([f[2] for f in fits]))
        es = es + 0.1 * fits[j][3]
        np.testing.assert_allclose(model.eta_mu, em, atol=1e-12)
        np.testing.assert_allclose(model.eta_sigma, es, atol=1e-12)

    def test_mu_only_slope_follows_geometric_pattern(self):
        x = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
        y = np.array([-1.2, -0.2, 0.1, 0.4, 1.3])
        beta = ols(x, y)[1]
        var = np.mean((y - y.mean()) ** 2)
        c = 1.0 / var
        data = Dataset(y, x[:, None])
        for m in (1, 5, 20):
            model = boost_cyclical(data, FSL, m, 0)
            assert model.trace.n_sigma == 0
            expected = (1 - (1 - 0.1 * c) ** m) * beta
            assert model.coef_mu[0, 1] == pytest.approx(expected, rel=1e-12)
            assert model.intercept_sigma == model.offset_sigma

    def test_uneven_stops(self, balanced):
        model = boost_cyclical(balanced, SAASL, 30, 10)
        assert model.trace.n_mu == 30 and model.trace.n_sigma == 10
        assert model.mode == "cyclical"
        assert np.all(np.diff(risk_path(model, balanced)) <= 1e-9)


@pytest.fixture(scope="module")
def large():
    return generate(SimDesign.large_variance(seed=3)).data


class TestIntervalPathology:
    def test_narrow_interval_hits_boundary(self, large, caplog):
        with caplog.at_level(logging.WARNING):
            model = boost_noncyclical(large, StepPolicy.named("asl"), 200)
        mu_steps = model.trace.k == 0
        assert mu_steps.any()
        assert np.all(model.trace.nu_star[mu_steps] == 10.0)
        assert np.all(model.trace.boundary[mu_steps])
        assert "hit the search interval" in caplog.text

    def test_wide_interval_recovers_analytic_step(self, large):
        wide = boost_noncyclical(large, StepPolicy.named("asl", interval_mu=(0.0, 50000.0)), 200)
        semi = boost_noncyclical(large, SAASL, 200)
        np.testing.assert_array_equal(wide.trace.k, semi.trace.k)
        np.testing.assert_array_equal(wide.trace.j, semi.trace.j)
        mu_steps = semi.trace.k == 0
        # Optimal mu step is of the order of the variance, exp(10).
        assert np.all(semi.trace.nu_star[mu_steps] > 1e4)
        np.testing.assert_allclose(wide.trace.nu_star, semi.trace.nu_star, rtol=1e-4)
