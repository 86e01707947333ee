# -*- coding: utf-8 -*-
import numpy as np
import pytest

from core.errors import ConfigValidationError, DegenerateClassError
from core.models.data import HeteroSpec, ImbalanceSpec, MapKind
from core.models.dataset import Dataset
from domain.datagen import (
    gen_heteroscedastic_regression,
    gen_imbalanced_classification,
    standardize,
    true_function,
)


def test_hetero_shapes_and_determinism():
    spec = HeteroSpec(n_features=5, n_outputs=3, sigma=(0.1, 0.5, 1.0), n_train=50, n_test=20, seed=3)
    train, test = gen_heteroscedastic_regression(spec)
    assert train.X.shape == (50, 5) and train.Y.shape == (50, 3)
    assert test.X.shape == (20, 5) and test.Y.shape == (20, 3)

    again, _ = gen_heteroscedastic_regression(spec)
    assert np.array_equal(train.X, again.X) and np.array_equal(train.Y, again.Y)

    other, _ = gen_heteroscedastic_regression(HeteroSpec(n_features=5, n_outputs=3, sigma=(0.1, 0.5, 1.0),
                                                         n_train=50, n_test=20, seed=4))
    assert not np.array_equal(train.X, other.X)
    assert not np.array_equal(train.X[:20], test.X)


@pytest.mark.parametrize("kind", [MapKind.LINEAR, MapKind.TANH_MIXTURE])
def test_hetero_noise_level_per_output(kind):
    spec = HeteroSpec(map_kind=kind, n_train=5000, n_test=10, seed=1)
    train, _ = gen_heteroscedastic_regression(spec)
    residual = train.Y - true_function(spec)(train.X)
    assert np.allclose(np.std(residual, axis=0), spec.sigma, rtol=0.1)


@pytest.mark.parametrize("kind", [MapKind.LINEAR, MapKind.TANH_MIXTURE])
def test_hetero_noise_is_zero_mean_and_uncorrelated(kind):
    spec = HeteroSpec(map_kind=kind, n_train=10_000, n_test=10, seed=3)
    train, _ = gen_heteroscedastic_regression(spec)
    residual = train.Y - true_function(spec)(train.X)
    sigma = np.asarray(spec.sigma)
    assert np.all(np.abs(residual.mean(axis=0)) <= 4.0 * sigma / np.sqrt(train.n))
    rho = np.corrcoef(residual, rowvar=False)
    off = rho[~np.eye(spec.n_outputs, dtype=bool)]
    assert np.all(np.abs(off) <= 0.05)


def test_hetero_rejects_sigma_length_mismatch():
    with pytest.raises(ConfigValidationError):
        gen_heteroscedastic_regression(HeteroSpec(n_outputs=3, sigma=(1.0, 1.0)))


def test_imbalance_counts_follow_retention():
    spec = ImbalanceSpec(n_classes=4, n_features=3, base_per_class=500,
                         retention=(1.0, 0.1, 0.02, 0.3), test_per_class=25, seed=0)
    assert spec.train_counts() == (500, 50, 10, 150)
    train, test = gen_imbalanced_classification(spec)
    assert list(train.class_counts()) == [500, 50, 10, 150]
    assert list(test.class_counts()) == [25, 25, 25, 25]
    assert train.n_classes == 4


def test_imbalance_balanced_when_all_retained():
    spec = ImbalanceSpec(n_classes=3, n_features=2, base_per_class=20, retention=(1.0, 1.0, 1.0),
                         test_per_class=5)
    train, _ = gen_imbalanced_classification(spec)
    assert list(train.class_counts()) == [20, 20, 20]
    # rows are shuffled, not grouped by class
    assert not np.array_equal(train.labels, np.sort(train.labels))


def test_train_counts_round_half_up():
    assert ImbalanceSpec(n_classes=2, base_per_class=5, retention=(0.5, 0.3)).train_counts() == (3, 2)


def test_imbalance_rejects_empty_class():
    spec = ImbalanceSpec(n_classes=2, base_per_class=10, retention=(1.0, 0.01))
    with pytest.raises(DegenerateClassError):
        gen_imbalanced_classification(spec)


def test_imbalance_rejects_bad_retention():
    with pytest.raises(ConfigValidationError):
        gen_imbalanced_classification(ImbalanceSpec(n_classes=2, retention=(1.0, 1.5)))


def test_standardize_uses_train_statistics():
    train = Dataset(X=np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]]), Y=np.zeros((3, 1)))
    test = Dataset(X=np.array([[3.0, 7.0]]), Y=np.zeros((1, 1)))
    tr, te, stats = standardize(train, test)
    assert np.allclose(tr.X[:, 0].mean(), 0.0)
    assert np.allclose(tr.X[:, 0].std(), 1.0)
    # constant train column maps to 0 in both splits
    assert np.all(tr.X[:, 1] == 0.0) and te.X[0, 1] == 0.0
    assert te.X[0, 0] == 0.0
    assert stats.as_dict()["constant"] == [False, True]
    assert np.array_equal(tr.Y, train.Y)
