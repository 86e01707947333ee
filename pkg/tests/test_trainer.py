# -*- coding: utf-8 -*-
"""Wrapped-loss training loop: o updates, evaluation, convergence and the
identities training must keep (o = 1 reduction, assignment stationarity)."""

from __future__ import annotations

import math

import numpy as np
import pytest

from core.calculations.losses import (
    per_class_cross_entropy,
    per_output_squared_error,
    plain_output_grad,
    wrapped_total,
)
from core.calculations.nn import apply_grads, backward, flatten_params, forward, init_network, init_optimizer
from core.errors import ConfigError, ConfigValidationError, ShapeError
from core.models.data import HeteroSpec, ImbalanceSpec
from core.models.dataset import Dataset
from core.models.losses import LossKind, PerOutputLosses, WrapWeights
from core.models.nn import Head, Mode, OptimizerKind
from core.models.train import ClassLoss, EpochMetrics, Metric, OMode, TrainConfig
from domain.datagen import gen_heteroscedastic_regression, gen_imbalanced_classification
from domain.trainer import (
    TrainState,
    class_share,
    epoch_of_best,
    evaluate,
    has_converged,
    train,
    train_step,
    update_wrap_weights,
)


@pytest.fixture(scope="module")
def hetero():
    spec = HeteroSpec(n_features=4, n_outputs=3, sigma=(0.1, 0.5, 1.0), n_train=96, n_test=40, seed=4)
    return gen_heteroscedastic_regression(spec)


@pytest.fixture(scope="module")
def blobs():
    spec = ImbalanceSpec(n_classes=3, n_features=4, base_per_class=30, retention=(1.0, 0.5, 1.0),
                         test_per_class=10, seed=6)
    return gen_imbalanced_classification(spec)


def _metrics(values):
    return [
        EpochMetrics(epoch=i + 1, train_wrapped_loss=v, train_original_loss=v, eval_metric=v,
                     eval_metric_name="rmse", o_min=1.0, o_max=1.0, o_mean=1.0)
        for i, v in enumerate(values)
    ]


# --- o updates -------------------------------------------------------------

def test_assignment_update_is_inverse_loss():
    o = WrapWeights.ones(3, floor=1e-8)
    l = PerOutputLosses.full([0.5, 2.0, 4.0])
    new = update_wrap_weights(o, l, OMode.ASSIGNMENT, lr=0.1)
    assert np.allclose(new.o, 1.0 / l.values)
    tiny = update_wrap_weights(o, PerOutputLosses.full([1e-12, 1.0, 0.0]), OMode.ASSIGNMENT, lr=0.1)
    assert np.allclose(tiny.o, [1e8, 1.0, 1e8])


def test_gradient_and_smoothed_updates():
    o = WrapWeights(o=np.array([1.0, 2.0]))
    l = PerOutputLosses.full([0.5, 1.0])
    g = update_wrap_weights(o, l, OMode.GRADIENT, lr=0.1)
    assert np.allclose(g.o, [1.0 - 0.1 * (0.5 - 1.0), 2.0 - 0.1 * (1.0 - 0.5)])
    s = update_wrap_weights(o, l, OMode.SMOOTHED, lr=0.1, beta=0.25)
    assert np.allclose(s.o, 0.75 * o.o + 0.25 / l.values)


def test_off_mode_and_uncovered_outputs_keep_o():
    o = WrapWeights(o=np.array([1.5, 0.5]))
    l = PerOutputLosses(values=np.array([0.2, 0.7]), coverage=np.array([4, 0]))
    assert update_wrap_weights(o, l, OMode.OFF, lr=1.0) is o
    new = update_wrap_weights(o, l, OMode.ASSIGNMENT, lr=1.0)
    assert new.o[0] == pytest.approx(1.0 / 0.2)
    assert new.o[1] == 0.5


def test_gradient_update_clamps_to_floor(caplog):
    o = WrapWeights(o=np.array([1.0]), floor=1e-3)
    l = PerOutputLosses.full([5.0])
    with caplog.at_level("WARNING"):
        new = update_wrap_weights(o, l, OMode.GRADIENT, lr=10.0)
    assert new.o[0] == 1e-3
    assert "clamped" in caplog.text


# --- convergence / best epoch ----------------------------------------------

def test_has_converged():
    assert has_converged([10.0, 9.0, 9.0, 9.0], tol=0.01, patience=2)
    assert not has_converged([10.0, 9.0, 8.0], tol=0.01, patience=2)
    assert not has_converged([10.0, 10.0], tol=0.01, patience=2)
    # an improvement of exactly tol still counts
    assert not has_converged([1.0, 0.99, 0.98], tol=0.01, patience=2)
    assert has_converged(_metrics([3.0, 3.0, 3.0]), tol=1e-3, patience=2)


def test_epoch_of_best_prefers_earliest_tie():
    assert epoch_of_best(_metrics([0.5, 0.3, 0.3, 0.4]), maximize=False) == (2, 0.3)
    assert epoch_of_best(_metrics([0.1, 0.9, 0.9]), maximize=True) == (2, 0.9)
    with pytest.raises(ValueError):
        epoch_of_best([])


# --- evaluation ------------------------------------------------------------

def test_evaluate_rmse_matches_definition(hetero):
    _, test = hetero
    net = init_network([test.p, 5, test.c], seed=1)
    out, _ = forward(net, test.X)
    assert evaluate(net, test, Metric.RMSE) == pytest.approx(math.sqrt(np.mean((test.Y - out) ** 2)))
    assert evaluate(net, test, "original_loss") == pytest.approx(float(np.sum(np.mean((test.Y - out) ** 2, axis=0))))
    with pytest.raises(ConfigError):
        evaluate(net, test, Metric.ACCURACY)


def test_evaluate_per_class_accuracy_marks_absent_classes():
    net = init_network([2, 3], head=Head.SOFTMAX, seed=0)
    data = Dataset(X=np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), labels=np.array([0, 1, 1]), n_classes=3)
    per_class = evaluate(net, data, Metric.PER_CLASS_ACCURACY)
    assert per_class.shape == (3,)
    assert math.isnan(per_class[2])
    acc = evaluate(net, data, Metric.ACCURACY)
    assert 0.0 <= acc <= 1.0
    with pytest.raises(ConfigError):
        evaluate(net, data, Metric.RMSE)


# --- training --------------------------------------------------------------

def _plain_reference(net, data, cfg):
    """Unwrapped training written out by hand: same shuffles, same optimizer."""
    opt = init_optimizer(net, cfg.optimizer, cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.epochs):
        order = rng.permutation(data.n)
        for start in range(0, data.n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            out, trace = forward(net, data.X[idx], mode=Mode.TRAIN)
            g = plain_output_grad(data.Y[idx], out, LossKind.SQUARED)
            net, opt = apply_grads(net, backward(net, trace, g, reduction="sum"), opt)
    return net


def test_off_mode_matches_plain_training_exactly(hetero):
    train_ds, test_ds = hetero
    net = init_network([train_ds.p, 6, train_ds.c], seed=2)
    cfg = TrainConfig(epochs=3, lr=0.05, batch_size=16, o_mode=OMode.OFF, seed=9)
    result = train(net, train_ds, test_ds, cfg)
    reference = _plain_reference(net, train_ds, cfg)
    assert np.array_equal(flatten_params(result.network), flatten_params(reference))
    assert np.all(result.o.o == 1.0)
    for m in result.history:
        assert m.train_wrapped_loss == pytest.approx(m.train_original_loss, rel=1e-12)


def test_assignment_mode_keeps_value_identity_and_stationarity(hetero):
    train_ds, test_ds = hetero
    net = init_network([train_ds.p, 6, train_ds.c], seed=3)
    cfg = TrainConfig(epochs=4, lr=0.02, batch_size=16, o_mode=OMode.ASSIGNMENT, seed=1)
    events = []
    result = train(net, train_ds, test_ds, cfg, observer=events.append)

    assert len(events) == 4 * 6
    for ev in events:
        expected = float(np.sum(1.0 + np.log(ev.losses.values)))
        assert abs(ev.report.wrapped_total - expected) <= 1e-10 * max(1.0, abs(expected))
        assert np.max(np.abs(ev.losses.values - 1.0 / ev.o.o)) <= 1e-8
        assert ev.o.floor == 1e-8
    assert all(m.max_abs_o_grad <= 1e-8 for m in result.history)
    assert [m.epoch for m in result.history] == [1, 2, 3, 4]


def test_training_is_deterministic(hetero):
    train_ds, test_ds = hetero
    net = init_network([train_ds.p, 6, train_ds.c], dropout=0.2, seed=4)
    cfg = TrainConfig(epochs=2, lr=0.05, batch_size=16, o_mode=OMode.SMOOTHED, beta=0.3, seed=8)
    a = train(net, train_ds, test_ds, cfg)
    b = train(net, train_ds, test_ds, cfg)
    assert np.array_equal(flatten_params(a.network), flatten_params(b.network))
    assert [m.eval_metric for m in a.history] == [m.eval_metric for m in b.history]
    assert np.array_equal(a.o.o, b.o.o)


def test_classification_training_records_per_class_accuracy(blobs):
    train_ds, test_ds = blobs
    net = init_network([train_ds.p, 8, train_ds.c], head=Head.SOFTMAX, seed=1)
    cfg = TrainConfig(epochs=2, lr=0.05, batch_size=8, loss_kind=LossKind.CROSS_ENTROPY,
                      o_mode=OMode.ASSIGNMENT, seed=2)
    result = train(net, train_ds, test_ds, cfg)
    assert result.history[0].eval_metric_name == "accuracy"
    assert all(len(m.per_class_accuracy) == 3 for m in result.history)
    assert result.o.size == 3


def test_static_weights_stay_fixed(blobs):
    train_ds, test_ds = blobs
    net = init_network([train_ds.p, 8, train_ds.c], head=Head.SOFTMAX, seed=1)
    weights = (1.0, 2.0, 1.0)
    cfg = TrainConfig(epochs=2, lr=0.05, batch_size=8, loss_kind=LossKind.CROSS_ENTROPY,
                      o_mode=OMode.OFF, static_weights=weights, seed=2)
    result = train(net, train_ds, test_ds, cfg)
    assert np.array_equal(result.o.o, np.asarray(weights))


def test_train_rejects_bad_config_and_mismatched_data(hetero, blobs):
    train_ds, test_ds = hetero
    net = init_network([train_ds.p, 4, train_ds.c], seed=0)
    with pytest.raises(ConfigValidationError):
        train(net, train_ds, test_ds, TrainConfig(o_mode=OMode.SMOOTHED, beta=1.5))
    with pytest.raises(ConfigValidationError):
        train(net, train_ds, test_ds, TrainConfig(o_mode=OMode.ASSIGNMENT, static_weights=(1.0, 1.0, 1.0)))
    wide = init_network([train_ds.p + 1, 4, train_ds.c], seed=0)
    with pytest.raises(ShapeError):
        train(wide, train_ds, test_ds, TrainConfig(epochs=1))
    with pytest.raises(ConfigError):
        train(net, train_ds, test_ds, TrainConfig(epochs=1, loss_kind=LossKind.CROSS_ENTROPY))


# --- class total loss ------------------------------------------------------

def test_class_share_counts_training_samples(blobs):
    train_ds, _ = blobs
    assert np.allclose(class_share(train_ds), [0.4, 0.2, 0.4])
    gap = Dataset(X=np.zeros((3, 2)), labels=np.array([0, 0, 2]), n_classes=3)
    with pytest.raises(ConfigError, match=r"\[1\]"):
        class_share(gap)


def test_total_class_loss_scales_means_and_carries_unscaled(blobs):
    train_ds, _ = blobs
    net = init_network([train_ds.p, 8, train_ds.c], head=Head.SOFTMAX, seed=3)
    cfg = TrainConfig(lr=0.05, loss_kind=LossKind.CROSS_ENTROPY, o_mode=OMode.ASSIGNMENT,
                      class_loss=ClassLoss.TOTAL)
    share = class_share(train_ds)
    state = TrainState(network=net, o=WrapWeights.ones(3), opt=init_optimizer(net, cfg.optimizer, cfg.lr))

    out, _ = forward(net, train_ds.X)
    means = per_class_cross_entropy(train_ds.labels, out).values
    state, report, o_grad = train_step(state, train_ds.X, train_ds.labels, cfg, class_share=share)
    assert np.allclose(report.per_output.values, share * means, rtol=1e-12)
    assert np.allclose(state.o.o, 1.0 / (share * means), rtol=1e-12)
    assert o_grad <= 1e-8

    # class 1 is absent from this batch: its scaled loss carries over as is
    keep = train_ds.labels != 1
    carried = report.per_output
    _, report2, _ = train_step(state, train_ds.X[keep], train_ds.labels[keep], cfg,
                               carry=carried, class_share=share)
    assert report2.per_output.coverage[1] == 0
    assert report2.per_output.values[1] == pytest.approx(carried.values[1], rel=1e-12)


def test_total_class_loss_gives_the_rare_class_the_largest_weight():
    # two classes with identical per-sample losses; class 1 has a quarter of the samples
    probs = np.array([[0.5, 0.5]] * 5)
    labels = np.array([0, 0, 0, 0, 1])
    data = Dataset(X=np.zeros((5, 1)), labels=labels, n_classes=2)
    share = class_share(data)
    means = per_class_cross_entropy(labels, probs).values
    plain = update_wrap_weights(WrapWeights.ones(2), PerOutputLosses.full(means), OMode.ASSIGNMENT, lr=0.1)
    total = update_wrap_weights(WrapWeights.ones(2), PerOutputLosses.full(share * means), OMode.ASSIGNMENT, lr=0.1)
    assert plain.o[0] == pytest.approx(plain.o[1])
    assert total.o[1] == pytest.approx(4.0 * total.o[0])


def test_total_class_loss_trains_and_respects_the_cap(blobs):
    train_ds, test_ds = blobs
    net = init_network([train_ds.p, 8, train_ds.c], head=Head.SOFTMAX, seed=1)
    cfg = TrainConfig(epochs=3, lr=0.05, batch_size=8, loss_kind=LossKind.CROSS_ENTROPY,
                      o_mode=OMode.ASSIGNMENT, class_loss=ClassLoss.TOTAL, o_floor=0.01, seed=2)
    events = []
    result = train(net, train_ds, test_ds, cfg, observer=events.append)
    assert all(np.all(ev.o.o <= 100.0 + 1e-9) for ev in events)
    assert all(m.o_max <= 100.0 + 1e-9 for m in result.history)
    with pytest.raises(ConfigValidationError):
        train(net, train_ds, test_ds, TrainConfig(epochs=1, class_loss=ClassLoss.TOTAL))


# --- update direction ------------------------------------------------------

def _wrapped_value(net, o, X, Y):
    out, _ = forward(net, X)
    return wrapped_total(o, per_output_squared_error(Y, out)).wrapped_total


def test_small_gradient_mode_step_never_increases_wrapped_loss():
    rng = np.random.default_rng(77)
    cfg = TrainConfig(lr=1e-3, optimizer=OptimizerKind.SGD, o_mode=OMode.GRADIENT)
    for k in range(120):
        p, c = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        hidden = [int(h) for h in rng.integers(1, 8, size=rng.integers(0, 3))]
        n = int(rng.integers(2, 13))
        X = rng.normal(size=(n, p))
        Y = rng.normal(size=(n, c))
        net = init_network([p, *hidden, c], seed=k)
        o = WrapWeights(o=rng.uniform(0.5, 2.0, size=c))
        state = TrainState(network=net, o=o, opt=init_optimizer(net, OptimizerKind.SGD, cfg.lr))

        before = _wrapped_value(net, o, X, Y)
        state, _, _ = train_step(state, X, Y, cfg, batch_index=k)
        after = _wrapped_value(state.network, state.o, X, Y)
        assert after <= before + 1e-12 * max(1.0, abs(before)), (k, before, after)


@pytest.mark.parametrize("class_loss", [ClassLoss.MEAN, ClassLoss.TOTAL])
def test_assignment_orders_weights_inversely_to_class_loss(blobs, class_loss):
    train_ds, test_ds = blobs
    net = init_network([train_ds.p, 8, train_ds.c], head=Head.SOFTMAX, seed=5)
    cfg = TrainConfig(epochs=4, lr=0.05, batch_size=8, loss_kind=LossKind.CROSS_ENTROPY,
                      o_mode=OMode.ASSIGNMENT, class_loss=class_loss, seed=3)
    last = {}
    train(net, train_ds, test_ds, cfg, observer=lambda ev: last.__setitem__(ev.epoch, ev))

    assert sorted(last) == [1, 2, 3, 4]
    for ev in last.values():
        l, o = ev.losses.values, ev.o.o
        for i in range(l.size):
            for j in range(l.size):
                if l[i] < l[j]:
                    assert o[i] > o[j], (ev.epoch, l, o)
