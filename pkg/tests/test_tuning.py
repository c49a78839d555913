import numpy as np
import pytest

from gamlssboost import Dataset, SimDesign, StepPolicy, UsageError, boost_noncyclical, generate, kfold_cv
from gamlssboost.engine import init_offsets
from gamlssboost.tuning import fold_assignment, heldout_risk_path, thread_count

from oracles import total_loss

SAASL = StepPolicy.named("saasl")


@pytest.fixture(scope="module")
def data():
    return generate(SimDesign(n=200, seed=4)).data


def test_fold_sizes_are_balanced():
    folds = fold_assignment(103, 10, seed=1)
    counts = np.bincount(folds)
    assert counts.size == 10
    assert counts.max() - counts.min() <= 1
    assert not np.array_equal(folds, fold_assignment(103, 10, seed=2))


def test_same_seed_same_result(data):
    a = kfold_cv(data, SAASL, 80, K=4, seed=9)
    b = kfold_cv(data, SAASL, 80, K=4, seed=9, n_jobs=1)
    assert a.m_best == b.m_best
    np.testing.assert_array_equal(a.mean_risk, b.mean_risk)
    np.testing.assert_array_equal(a.fold_assignment, b.fold_assignment)


def test_curve_structure(data):
    res = kfold_cv(data, SAASL, 60, K=5, seed=3)
    assert res.mean_risk.shape == (61,)
    assert res.fold_risk.shape == (5, 61)
    assert res.m_best == int(np.argmin(res.mean_risk))
    # Element 0 is the offset-only held-out risk, fold by fold.
    expected = []
    for f in range(5):
        test = res.fold_assignment == f
        om, os_ = init_offsets(data.y[~test])
        yt = data.y[test]
        expected.append(total_loss(yt, np.full(yt.size, om), np.full(yt.size, os_)))
    assert res.mean_risk[0] == pytest.approx(np.mean(expected), rel=1e-12)


def test_minimum_is_not_trivial(data):
    res = kfold_cv(data, SAASL, 400, K=5, seed=0)
    assert 0 < res.m_best <= 400


def test_on_fit_sees_every_fold(data):
    seen = []
    kfold_cv(data, SAASL, 10, K=3, seed=0, on_fit=lambda m, d: seen.append((m, d)))
    assert len(seen) == 3
    assert all(m.m_done == 10 for m, _ in seen)
    assert sum(d.n for _, d in seen) == 2 * data.n


def test_heldout_path_pads_after_early_stop():
    train = Dataset([0.0, 1.0, 3.0, 2.0], np.ones((4, 1)))
    model = boost_noncyclical(train, SAASL, 5)
    path = heldout_risk_path(model, Dataset([1.0, 2.0], np.ones((2, 1))), 5)
    assert path.shape == (6,)
    assert np.all(path == path[0])


def test_tiny_dataset_two_folds():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(8, 2))
    res = kfold_cv(Dataset(X[:, 0] + rng.normal(size=8), X), SAASL, 5, K=2, seed=1)
    assert res.mean_risk.shape == (6,)


@pytest.mark.parametrize("K, m_max", [(1, 10), (500, 10), (5, 0)])
def test_invalid_settings(data, K, m_max):
    with pytest.raises(UsageError):
        kfold_cv(data, SAASL, m_max, K=K)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("GAMLSSBOOST_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("GAMLSSBOOST_THREADS", "x")
    with pytest.raises(UsageError):
        thread_count()


def test_longer_m_max_keeps_the_prefix(data):
    short = kfold_cv(data, SAASL, 40, K=4, seed=2)
    long = kfold_cv(data, SAASL, 90, K=4, seed=2)
    np.testing.assert_array_equal(long.mean_risk[:41], short.mean_risk)


def test_offset_risk_is_policy_independent(data):
    a = kfold_cv(data, SAASL, 5, K=4, seed=2)
    b = kfold_cv(data, StepPolicy.named("fsl"), 5, K=4, seed=2)
    assert a.mean_risk[0] == b.mean_risk[0]


def test_every_observation_held_out_once():
    folds = fold_assignment(57, 10, seed=0)
    assert folds.min() == 0 and folds.max() == 9
    assert np.bincount(folds).sum() == 57
