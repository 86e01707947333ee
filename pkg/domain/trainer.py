# -*- coding: utf-8 -*-
"""Wrapped-loss training.

Per mini-batch, in this order:
  1. forward pass, per-output losses l_i (for class_loss total, each class
     mean is scaled by the class share of the training set)
  2. update o (per o_mode) from the current batch losses
  3. output gradient of the wrapped loss using the NEW o
  4. backward, optimizer step on w

The epoch counter advances once per full pass. Evaluation always reports
the original (o = 1) metric; o only shapes training.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from core.calculations.losses import (
    grad_wrapped_wrt_o,
    per_class_cross_entropy,
    per_output_squared_error,
    static_output_grad,
    weighted_total,
    wrapped_output_grad,
    wrapped_total,
)
from core.calculations.nn import apply_grads, backward, forward, init_optimizer
from core.errors import ConfigError, ConfigValidationError, NumericError, ShapeError
from core.models.dataset import Dataset
from core.models.losses import LossKind, LossReport, PerOutputLosses, WrapWeights
from core.models.nn import Head, Mode, Network, OptimizerState
from core.models.train import ClassLoss, EpochMetrics, Metric, OMode, TrainConfig
from core.types import errors_only
from core.validators.train import validate_train_config

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainState:
    network: Network
    o: WrapWeights
    opt: OptimizerState
    epoch: int = 0


@dataclass(frozen=True, eq=False)
class BatchEvent:
    """Handed to the optional observer after each o update."""

    epoch: int
    batch: int
    losses: PerOutputLosses
    o: WrapWeights
    report: LossReport


class TrainResult(NamedTuple):
    network: Network
    o: WrapWeights
    history: List[EpochMetrics]


Observer = Callable[[BatchEvent], None]


# --- o update --------------------------------------------------------------

def update_wrap_weights(
    o: WrapWeights,
    losses: PerOutputLosses,
    mode: Union[OMode, str],
    lr: float,
    beta: float = 0.5,
) -> WrapWeights:
    """One o step. Outputs with coverage 0 keep their previous weight.

    Entries pushed below the floor are clamped back onto it (logged, never fatal).
    """
    mode = OMode(mode)
    if o.size != losses.size:
        raise ShapeError(f"o has {o.size} entries, losses have {losses.size}")
    if mode == OMode.OFF:
        return o

    l = losses.values
    prev = o.o
    floor = o.floor
    if mode == OMode.GRADIENT:
        raw = prev - lr * (l - 1.0 / prev)
    elif mode == OMode.ASSIGNMENT:
        raw = 1.0 / np.maximum(l, floor)
    else:
        raw = (1.0 - beta) * prev + beta / np.maximum(l, floor)

    raw = np.where(losses.coverage > 0, raw, prev)
    clamped = ~(raw >= floor)
    if np.any(clamped):
        log.warning("clamped %d wrap weight(s) to floor %g (mode=%s)", int(np.sum(clamped)), floor, mode.value)
        raw = np.where(clamped, floor, raw)
    return WrapWeights(o=raw, floor=floor)


# --- evaluation ------------------------------------------------------------

def evaluate(net: Network, data: Dataset, metric: Union[Metric, str]) -> Union[float, np.ndarray]:
    """Original-loss metrics (o = 1 semantics).

    per_class_accuracy returns one entry per class; classes absent from the
    data get NaN.
    """
    metric = Metric(metric)
    if data.p != net.n_inputs or data.c != net.n_outputs:
        raise ShapeError(f"data (p={data.p}, c={data.c}) does not match network {net.arch}")
    outputs, _ = forward(net, data.X, mode=Mode.EVAL)

    if metric == Metric.RMSE:
        if data.is_classification:
            raise ConfigError("rmse needs a regression dataset")
        return float(np.sqrt(np.mean((data.Y - outputs) ** 2)))

    if metric == Metric.ORIGINAL_LOSS:
        if data.is_classification:
            if net.head != Head.SOFTMAX:
                raise ConfigError("cross-entropy evaluation needs a softmax head")
            return float(np.mean(-np.log(np.maximum(outputs[np.arange(data.n), data.labels], 1e-300))))
        return per_output_squared_error(data.Y, outputs).total

    if net.head != Head.SOFTMAX or not data.is_classification:
        raise ConfigError(f"{metric.value} needs a softmax head and a classification dataset")
    pred = np.argmax(outputs, axis=1)
    correct = pred == data.labels
    if metric == Metric.ACCURACY:
        return float(np.mean(correct))

    counts = np.bincount(data.labels, minlength=data.c).astype(np.float64)
    hits = np.bincount(data.labels, weights=correct.astype(np.float64), minlength=data.c)
    out = np.full(data.c, np.nan)
    seen = counts > 0
    out[seen] = hits[seen] / counts[seen]
    return out


# --- convergence / reporting -----------------------------------------------

def _train_loss(m: Union[EpochMetrics, float]) -> float:
    return float(m.train_wrapped_loss) if isinstance(m, EpochMetrics) else float(m)


def has_converged(history: Sequence[Union[EpochMetrics, float]], tol: float, patience: int) -> bool:
    """True once the best train wrapped loss has not improved by a relative
    ``tol`` for ``patience`` consecutive epochs. An improvement of exactly
    tol counts."""
    if tol <= 0 or patience < 1:
        raise ValueError("tol must be > 0 and patience >= 1")
    if len(history) <= patience:
        return False
    best = _train_loss(history[0])
    stale = 0
    for m in history[1:]:
        value = _train_loss(m)
        if best - value >= tol * abs(best):
            best = value
            stale = 0
        else:
            stale += 1
    return stale >= patience


def epoch_of_best(history: Sequence[EpochMetrics], maximize: Optional[bool] = None) -> Tuple[int, float]:
    """(1-based epoch, value) of the best eval metric; ties resolve to the earliest epoch."""
    if not history:
        raise ValueError("empty history")
    if maximize is None:
        maximize = Metric(history[0].eval_metric_name).maximize
    values = np.array([m.eval_metric for m in history], dtype=np.float64)
    idx = int(np.nanargmax(values) if maximize else np.nanargmin(values))
    return history[idx].epoch, float(values[idx])


# --- training --------------------------------------------------------------

def _stream_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def class_share(data: Dataset) -> np.ndarray:
    """Fraction of the training samples in each class.

    Raises ConfigError when a class has no training samples, since its total
    loss is undefined.
    """
    if not data.is_classification:
        raise ConfigError("class shares need a classification dataset")
    counts = data.class_counts().astype(np.float64)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise ConfigError(f"class_loss 'total' needs every class in the training data; missing {empty.tolist()}")
    return counts / counts.sum()


def _batch_losses(
    cfg: TrainConfig,
    targets,
    outputs,
    carry: Optional[PerOutputLosses],
    share: Optional[np.ndarray],
) -> PerOutputLosses:
    if cfg.loss_kind == LossKind.SQUARED:
        return per_output_squared_error(targets, outputs)
    if share is None:
        return per_class_cross_entropy(targets, outputs, carry=carry)
    # carry holds scaled values; the class means underneath are carried unscaled
    if carry is not None:
        carry = PerOutputLosses(values=carry.values / share, coverage=carry.coverage)
    means = per_class_cross_entropy(targets, outputs, carry=carry)
    return PerOutputLosses(values=means.values * share, coverage=means.coverage)


def train_step(
    state: TrainState,
    xb: np.ndarray,
    tb: np.ndarray,
    cfg: TrainConfig,
    *,
    carry: Optional[PerOutputLosses] = None,
    batch_index: int = 0,
    observer: Optional[Observer] = None,
    class_share: Optional[np.ndarray] = None,
) -> Tuple[TrainState, LossReport, float]:
    """One combined (o, w) update on a single mini-batch.

    Returns the new state, the loss report computed with the updated o (for
    static weights, ``wrapped_total`` holds the weighted loss) and the max
    |d l_wrap / d o_i| over covered outputs.

    With ``class_share`` (class_loss total) each class loss is its batch mean
    times its share of the training set.
    """
    epoch = state.epoch + 1
    outputs, trace = forward(state.network, xb, mode=Mode.TRAIN, seed=_stream_seed(cfg.seed, epoch, batch_index))
    losses = _batch_losses(cfg, tb, outputs, carry, class_share)

    if cfg.uses_static_weights:
        o = state.o
    else:
        o = update_wrap_weights(state.o, losses, cfg.o_mode, cfg.effective_o_lr, cfg.beta)

    report = wrapped_total(o, losses)
    if cfg.uses_static_weights:
        report = LossReport(
            original_total=report.original_total,
            wrapped_total=weighted_total(cfg.static_weights, losses),
            per_output=losses,
            o=o,
        )
    if not (report.is_finite() and np.all(np.isfinite(losses.values))):
        raise NumericError(
            "non-finite training loss",
            diagnostics={"epoch": epoch, "batch": batch_index, "o": o.snapshot()},
        )

    covered = losses.coverage > 0
    o_grad = grad_wrapped_wrt_o(o, losses)
    max_o_grad = float(np.max(np.abs(o_grad[covered]))) if np.any(covered) else 0.0

    if observer is not None:
        observer(BatchEvent(epoch=epoch, batch=batch_index, losses=losses, o=o, report=report))

    if cfg.uses_static_weights:
        g = static_output_grad(cfg.static_weights, tb, outputs, cfg.loss_kind)
    else:
        g = wrapped_output_grad(o, tb, outputs, cfg.loss_kind)
    wrt = "logits" if cfg.loss_kind == LossKind.CROSS_ENTROPY else "outputs"
    grads = backward(state.network, trace, g, wrt=wrt, reduction="sum")
    try:
        network, opt = apply_grads(state.network, grads, state.opt)
    except NumericError as exc:
        exc.diagnostics.update({"epoch": epoch, "batch": batch_index, "o": o.snapshot()})
        raise
    return TrainState(network=network, o=o, opt=opt, epoch=state.epoch), report, max_o_grad


def _check_compatible(net: Network, data: Dataset, cfg: TrainConfig, role: str) -> None:
    if data.p != net.n_inputs or data.c != net.n_outputs:
        raise ShapeError(f"{role} data (p={data.p}, c={data.c}) does not match network {net.arch}")
    if cfg.loss_kind == LossKind.CROSS_ENTROPY:
        if not data.is_classification or net.head != Head.SOFTMAX:
            raise ConfigError("cross-entropy training needs labels and a softmax head")
    elif data.is_classification:
        raise ConfigError("squared-error training needs continuous targets")


def train(
    net: Network,
    train_data: Dataset,
    eval_data: Dataset,
    cfg: TrainConfig,
    observer: Optional[Observer] = None,
) -> TrainResult:
    issues = errors_only(validate_train_config(cfg, n_outputs=net.n_outputs))
    if issues:
        raise ConfigValidationError(issues)
    _check_compatible(net, train_data, cfg, "train")
    _check_compatible(net, eval_data, cfg, "eval")

    c = net.n_outputs
    if cfg.uses_static_weights:
        o0 = WrapWeights(o=np.asarray(cfg.static_weights, dtype=np.float64), floor=min(cfg.o_floor, min(cfg.static_weights)))
    else:
        o0 = WrapWeights.ones(c, floor=cfg.o_floor)
    state = TrainState(network=net, o=o0, opt=init_optimizer(net, cfg.optimizer, cfg.lr))

    metric = cfg.default_metric()
    shuffle_rng = np.random.default_rng(cfg.seed)
    X, T = train_data.X, train_data.targets()
    n = train_data.n
    carry: Optional[PerOutputLosses] = None
    history: List[EpochMetrics] = []
    share = class_share(train_data) if cfg.class_loss == ClassLoss.TOTAL else None

    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(n) if cfg.shuffle else np.arange(n)
        wrapped_sum = 0.0
        original_sum = 0.0
        max_o_grad = 0.0
        n_batches = 0
        for b, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            state, report, step_o_grad = train_step(
                state, X[idx], T[idx], cfg,
                carry=carry, batch_index=b, observer=observer, class_share=share,
            )
            carry = report.per_output
            wrapped_sum += report.wrapped_total
            original_sum += report.original_total
            max_o_grad = max(max_o_grad, step_o_grad)
            n_batches += 1
        state = TrainState(network=state.network, o=state.o, opt=state.opt, epoch=epoch)

        per_class = None
        if train_data.is_classification:
            per_class = tuple(float(v) for v in evaluate(state.network, eval_data, Metric.PER_CLASS_ACCURACY))
        snap = state.o.snapshot()
        m = EpochMetrics(
            epoch=epoch,
            train_wrapped_loss=wrapped_sum / n_batches,
            train_original_loss=original_sum / n_batches,
            eval_metric=float(evaluate(state.network, eval_data, metric)),
            eval_metric_name=metric.value,
            o_min=snap["min"],
            o_max=snap["max"],
            o_mean=snap["mean"],
            max_abs_o_grad=max_o_grad,
            per_class_accuracy=per_class,
        )
        history.append(m)
        if epoch == 1 or epoch % cfg.log_every == 0:
            log.info(
                "epoch %d: wrapped=%.6g original=%.6g %s=%.6g o=[%.4g, %.4g]",
                epoch, m.train_wrapped_loss, m.train_original_loss, metric.value, m.eval_metric, m.o_min, m.o_max,
            )
        if has_converged(history, cfg.tol, cfg.patience):
            log.info("converged after %d epochs (tol=%g, patience=%d)", epoch, cfg.tol, cfg.patience)
            break

    return TrainResult(network=state.network, o=state.o, history=history)
