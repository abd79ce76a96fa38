import numpy as np
import pytest

from contrastive_vc import ermsim
from contrastive_vc.core import KNEGATIVE, EmbeddingModel, QuerySet, evaluate_label
from contrastive_vc.errors import DomainError, KinkDetected, SeparationRejectionLimit
from contrastive_vc.ermsim import SimConfig

SMALL = dict(n=12, m_test=2000, steps=200, restarts=2, seeds=(0,))


def _random_case(rng, loss, p=2):
    k = int(rng.integers(1, 4))
    cfg = SimConfig(n=8, p=p, k=k, loss=loss)
    m = int(rng.integers(1, 6))
    tuples = np.array([rng.choice(8, k + 2, replace=False) for _ in range(m)])
    labels = rng.integers(0, k + 1, size=m)
    return cfg, tuples, labels, rng.uniform(0, 1, (8, 3))


@pytest.mark.parametrize("loss", ermsim.LOSSES)
def test_gradients_match_finite_differences(loss):
    rng = np.random.default_rng(11)
    for _ in range(20):
        cfg, t, y, th = _random_case(rng, loss, p=int(rng.choice([2, 3, 4])))
        try:
            assert ermsim.gradient_check(cfg, t, y, th) <= 1e-5
        except KinkDetected:
            pass


def test_inactive_hinge_has_zero_gradient():
    cfg = SimConfig(n=3, p=2, margin=0.1)
    th = np.array([[0.0], [0.1], [5.0]])
    loss, grad = ermsim.loss_and_grad(th, np.array([[0, 1, 2]]), np.array([0]), cfg)
    assert loss == 0 and not grad.any()


def test_kink_detected():
    cfg = SimConfig(n=3, p=2, margin=1.0)
    th = np.array([[0.0], [0.0], [1.0]])
    with pytest.raises(KinkDetected):
        ermsim.gradient_check(cfg, [[0, 1, 2]], [0], th)


def test_labels_match_ground_truth_model():
    cfg = SimConfig(n=10, k=2, p=3)
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, 1, (10, 3))
    t, y = ermsim.sample_tuples(rng, cfg, pts, 200)
    model = EmbeddingModel(tuple(map(tuple, pts.tolist())), p=3)
    qs = QuerySet(10, tuple(map(tuple, t.tolist())), KNEGATIVE, k=2, allow_duplicates=True)
    assert list(y) == [evaluate_label(model, q, KNEGATIVE) for q in qs.queries]
    assert list(ermsim.predict(pts, t, cfg)) == list(y)


def test_label_noise_rate():
    cfg = SimConfig(n=20, eta=0.2)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (20, 3))
    t, y = ermsim.sample_tuples(rng, cfg, pts, 20000)
    assert abs(ermsim.error_rate(pts, t, y, cfg) - 0.2) < 0.02


def test_separation_filter_and_rejection_limit():
    cfg = SimConfig(n=20, alpha=0.5)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (20, 3))
    t, _ = ermsim.sample_tuples(rng, cfg, pts, 300)
    d = ermsim._distances(pts, t[:, 0], t[:, 1:], 2)
    d.sort(axis=1)
    assert np.all(1.5 ** 2 * d[:, 0] < d[:, 1])
    with pytest.raises(SeparationRejectionLimit):
        ermsim.sample_tuples(rng, SimConfig(n=20, alpha=0.99, rejection_cap=1), pts, 300)


def test_no_training_data_gives_chance_error():
    res = ermsim.run_sim(SimConfig(**{**SMALL, "m_train": 0, "restarts": 1}))
    assert res.train_error == 0
    assert abs(res.test_error - 0.5) < 0.1


def test_training_reduces_error():
    r = ermsim.run_seed(SimConfig(**SMALL, m_train=200), 0)
    assert r.train_error <= r.init_train_error
    assert r.train_error < 0.2
    assert r.bayes_test_error == 0


def test_more_steps_never_worse():
    short = ermsim.run_seed(SimConfig(**{**SMALL, "steps": 50}, m_train=200), 3)
    long = ermsim.run_seed(SimConfig(**{**SMALL, "steps": 400}, m_train=200), 3)
    assert long.train_error <= short.train_error


def test_softmax_loss_runs():
    r = ermsim.run_seed(SimConfig(**SMALL, m_train=200, loss=ermsim.SOFTMAX, k=3), 0)
    assert 0 <= r.train_error <= r.init_train_error


@pytest.mark.slow
def test_worker_count_does_not_change_result():
    cfg = SimConfig(**{**SMALL, "seeds": (0, 1, 2)}, m_train=100)
    assert ermsim.run_sim(cfg, 1) == ermsim.run_sim(cfg, 2)


def test_config_round_trip_and_validation():
    cfg = SimConfig(seeds=(1, 2), eta=0.1)
    assert SimConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(DomainError):
        SimConfig.from_dict({"colour": 1})
    with pytest.raises(DomainError):
        SimConfig(eta=0.5)
    with pytest.raises(DomainError):
        SimConfig(n=3, k=2)


def test_csv_rows():
    res = ermsim.run_sim(SimConfig(**{**SMALL, "seeds": (0, 1)}, m_train=50))
    rows = list(res.csv_rows())
    assert [r["seed"] for r in rows] == [0, 1]
    assert set(rows[0]) == set(ermsim.CSV_COLUMNS)
