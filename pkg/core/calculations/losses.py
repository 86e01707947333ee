# -*- coding: utf-8 -*-
"""Per-output losses and the wrapped loss family.

    original  : sum_i l_i
    weighted  : sum_i w_i l_i
    wrapped   : sum_i (o_i l_i + log(1/o_i))
    sigma-NLL : sum_i (l_i / s_i^2 + log s_i^2)     (constant c/2 log 2pi dropped)

Per-output losses are batch means, so o does not depend on batch size.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import (
    DegenerateClassError,
    DomainError,
    LabelError,
    ProbabilityError,
    ShapeError,
)
from core.models.losses import (
    LossKind,
    LossReport,
    PerOutputLosses,
    SigmaVector,
    WeightsLike,
    WrapWeights,
    as_wrap_weights,
)

SIMPLEX_TOL = 1e-9
_LOG_TINY = 1e-300


def _pair(targets, outputs) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(targets, dtype=np.float64)
    f = np.asarray(outputs, dtype=np.float64)
    if y.ndim == 1:
        y = y.reshape(1, -1)
    if f.ndim == 1:
        f = f.reshape(1, -1)
    if y.shape != f.shape:
        raise ShapeError(f"targets {y.shape} and outputs {f.shape} differ")
    return y, f


def _labels_probs(labels, probs) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 2:
        raise ShapeError(f"probs must be (n, c), got {p.shape}")
    lab = np.asarray(labels).reshape(-1)
    if lab.shape[0] != p.shape[0]:
        raise ShapeError(f"{lab.shape[0]} labels for {p.shape[0]} probability rows")
    if lab.size and not np.issubdtype(lab.dtype, np.integer):
        as_int = lab.astype(np.int64)
        if not np.array_equal(as_int, lab):
            raise LabelError("labels must be integers")
        lab = as_int
    lab = lab.astype(np.int64)
    c = p.shape[1]
    if np.any(lab < 0) or np.any(lab >= c):
        raise LabelError(f"labels must lie in [0, {c})")
    if np.any(np.abs(np.sum(p, axis=1) - 1.0) > SIMPLEX_TOL) or np.any(p < 0.0):
        raise ProbabilityError("every probability row must be nonnegative and sum to 1")
    return lab, p


def per_output_squared_error(targets, outputs) -> PerOutputLosses:
    y, f = _pair(targets, outputs)
    n = y.shape[0]
    values = np.mean((y - f) ** 2, axis=0)
    return PerOutputLosses(values=values, coverage=np.full(values.size, n, dtype=np.int64))


def per_class_cross_entropy(
    labels,
    probs,
    carry: Optional[PerOutputLosses] = None,
) -> PerOutputLosses:
    """Mean -log p(true class) per class; classes absent from the batch keep the carried value."""
    lab, p = _labels_probs(labels, probs)
    n, c = p.shape
    if carry is not None and carry.size != c:
        raise ShapeError(f"carry has {carry.size} classes, probs have {c}")

    nll = -np.log(np.maximum(p[np.arange(n), lab], _LOG_TINY))
    counts = np.bincount(lab, minlength=c)
    sums = np.bincount(lab, weights=nll, minlength=c)

    values = np.zeros(c) if carry is None else np.array(carry.values, dtype=np.float64)
    present = counts > 0
    values[present] = sums[present] / counts[present]
    return PerOutputLosses(values=values, coverage=counts)


def _check_lengths(o: WrapWeights, losses: PerOutputLosses) -> None:
    if o.size != losses.size:
        raise ShapeError(f"o has {o.size} entries, losses have {losses.size}")


def wrapped_total(o: WeightsLike, losses: PerOutputLosses) -> LossReport:
    w = as_wrap_weights(o)
    _check_lengths(w, losses)
    l = losses.values
    wrapped = float(np.sum(w.o * l + np.log(1.0 / w.o)))
    return LossReport(original_total=float(np.sum(l)), wrapped_total=wrapped, per_output=losses, o=w)


def weighted_total(weights: Sequence[float], losses: PerOutputLosses) -> float:
    """sum_i w_i l_i, the plain weighted loss with no regularizer."""
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size != losses.size:
        raise ShapeError(f"{w.size} weights for {losses.size} losses")
    return float(np.sum(w * losses.values))


def grad_wrapped_wrt_o(o: WeightsLike, losses: PerOutputLosses) -> np.ndarray:
    w = as_wrap_weights(o)
    _check_lengths(w, losses)
    return losses.values - 1.0 / w.o


def plain_output_grad(targets, outputs, kind: Union[LossKind, str] = LossKind.SQUARED) -> np.ndarray:
    """Gradient of the unweighted batch loss w.r.t. the network output.

    squared      : d/d f of sum_i mean_batch (y_i - f_i)^2  ->  2 (f - y) / n
    cross_entropy: d/d logits of mean_batch -log p_y        ->  (p - onehot) / n
    """
    kind = LossKind(kind)
    if kind == LossKind.SQUARED:
        y, f = _pair(targets, outputs)
        return 2.0 * (f - y) / y.shape[0]
    lab, p = _labels_probs(targets, outputs)
    n, c = p.shape
    onehot = np.zeros((n, c))
    onehot[np.arange(n), lab] = 1.0
    return (p - onehot) / n


def wrapped_output_grad(
    o: WeightsLike,
    targets,
    outputs,
    kind: Union[LossKind, str] = LossKind.SQUARED,
) -> np.ndarray:
    """o-scaled output gradient. Composed with backward(..., reduction="sum") it
    yields sum_i o_i dl_i/dw_j.

    For cross-entropy the gradient is w.r.t. the softmax logits and each
    sample is scaled by the weight of its own label.
    """
    kind = LossKind(kind)
    w = as_wrap_weights(o)
    g = plain_output_grad(targets, outputs, kind)
    if w.size != g.shape[1]:
        raise ShapeError(f"o has {w.size} entries, outputs have {g.shape[1]} columns")
    if kind == LossKind.SQUARED:
        return w.o[None, :] * g
    lab = np.asarray(targets).reshape(-1).astype(np.int64)
    return w.o[lab][:, None] * g


def static_output_grad(weights: Sequence[float], targets, outputs, kind: Union[LossKind, str]) -> np.ndarray:
    """Output gradient of the weighted loss with fixed weights (no positivity floor)."""
    kind = LossKind(kind)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    g = plain_output_grad(targets, outputs, kind)
    if w.size != g.shape[1]:
        raise ShapeError(f"{w.size} static weights for {g.shape[1]} outputs")
    if kind == LossKind.SQUARED:
        return w[None, :] * g
    lab = np.asarray(targets).reshape(-1).astype(np.int64)
    return w[lab][:, None] * g


def weighted_sample_cross_entropy(o: WeightsLike, labels, probs) -> float:
    """(1/n) sum_s o_{y_s} (-log p_{s, y_s}); its logit gradient is the
    cross-entropy branch of wrapped_output_grad."""
    w = as_wrap_weights(o)
    lab, p = _labels_probs(labels, probs)
    n = p.shape[0]
    nll = -np.log(np.maximum(p[np.arange(n), lab], _LOG_TINY))
    return float(np.sum(w.o[lab] * nll) / n)


def sigma_nll(sigma: Union[SigmaVector, Sequence[float]], losses: PerOutputLosses) -> Tuple[float, np.ndarray]:
    """Value and d/d sigma of sum_i (l_i / s_i^2 + log s_i^2)."""
    if not isinstance(sigma, SigmaVector):
        sigma = SigmaVector(sigma=np.asarray(sigma, dtype=np.float64))
    s = sigma.sigma
    if s.size != losses.size:
        raise ShapeError(f"sigma has {s.size} entries, losses have {losses.size}")
    l = losses.values
    value = float(np.sum(l / s ** 2 + np.log(s ** 2)))
    grad = 2.0 / s - 2.0 * l / s ** 3
    return value, grad


def wrap_weights_from_sigma(sigma: Union[SigmaVector, Sequence[float]], floor: Optional[float] = None) -> WrapWeights:
    if not isinstance(sigma, SigmaVector):
        sigma = SigmaVector(sigma=np.asarray(sigma, dtype=np.float64))
    return as_wrap_weights(1.0 / sigma.variance, floor=floor)


def mle_sigma_sq(losses: PerOutputLosses, floor: float = 1e-12) -> SigmaVector:
    """Maximum-likelihood residual scale: s_i^2 = l_i (floored so it stays positive)."""
    return SigmaVector(sigma=np.sqrt(np.maximum(losses.values, floor)))


def median_frequency_weights(class_counts: Sequence[int]) -> np.ndarray:
    """alpha_c = median(freq) / freq(c)."""
    counts = np.asarray(class_counts, dtype=np.float64).reshape(-1)
    if counts.size == 0:
        raise DegenerateClassError("no classes given")
    if np.any(counts < 0):
        raise DomainError("class counts must be nonnegative")
    if np.any(counts == 0):
        missing = [int(i) for i in np.flatnonzero(counts == 0)]
        raise DegenerateClassError(f"classes with zero samples: {missing}")
    freqs = counts / np.sum(counts)
    return float(np.median(freqs)) / freqs
