# -*- coding: utf-8 -*-
"""Finite-difference agreement report for every analytic gradient.

Each check draws random instances (networks of 1 to 3 layers, batches,
weights) and records the worst relative error

    ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-3)

Parameter coordinates whose perturbation flips a ReLU on or off are left
out: the loss is not differentiable there and central differences straddle
the kink.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np

from core.calculations.losses import (
    grad_wrapped_wrt_o,
    per_output_squared_error,
    sigma_nll,
    weighted_sample_cross_entropy,
    wrapped_output_grad,
    wrapped_total,
)
from core.calculations.nn import backward, flatten_grads, flatten_params, forward, init_network, softmax, unflatten_params
from core.models.losses import LossKind, PerOutputLosses
from core.models.nn import Activation, Head, Mode, Network
from domain.analysis import finite_diff_gradient

log = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_TOLERANCE = 1e-6
_NORM_FLOOR = 1e-3


@dataclass(frozen=True)
class GradcheckReport:
    seed: int
    instances: int
    step: float
    tolerance: float
    max_rel_error: Dict[str, float] = field(default_factory=dict)
    skipped_coordinates: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(err <= self.tolerance for err in self.max_rel_error.values())

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "step": self.step,
            "tolerance": self.tolerance,
            "max_rel_error": dict(self.max_rel_error),
            "skipped_coordinates": dict(self.skipped_coordinates),
            "pass": self.passed,
        }


def relative_error(analytic, numeric) -> float:
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(n)), _NORM_FLOOR)
    return float(np.linalg.norm(a - n) / denom)


def _random_net(rng: np.random.Generator, head: Head, n_out: int = 0) -> Network:
    depth = int(rng.integers(1, 4))
    widths = [int(rng.integers(1, 6)) for _ in range(depth + 1)]
    if n_out:
        widths[-1] = n_out
    act = Activation.RELU if rng.random() < 0.5 else Activation.IDENTITY
    return init_network(widths, head=head, seed=int(rng.integers(0, 2**31)), activation=act)


def _relu_pattern(net: Network, X: np.ndarray) -> Tuple[np.ndarray, ...]:
    _, trace = forward(net, X, mode=Mode.EVAL)
    return tuple(z > 0.0 for z in trace.pre[:-1])


def _smooth_mask(net: Network, X: np.ndarray, step: float) -> np.ndarray:
    """True for parameter coordinates whose +-step perturbation keeps every ReLU on the same side."""
    flat = flatten_params(net)
    if all(a != Activation.RELU for a in net.activations):
        return np.ones(flat.size, dtype=bool)
    ref = _relu_pattern(net, X)
    keep = np.ones(flat.size, dtype=bool)
    for j in range(flat.size):
        for sign in (1.0, -1.0):
            shifted = flat.copy()
            shifted[j] += sign * step
            pattern = _relu_pattern(unflatten_params(net, shifted), X)
            if any(not np.array_equal(a, b) for a, b in zip(ref, pattern)):
                keep[j] = False
                break
    return keep


def _param_check(
    net: Network,
    X: np.ndarray,
    loss_of_outputs: Callable[[np.ndarray], float],
    output_grad: np.ndarray,
    wrt: str,
    reduction: str,
    step: float,
) -> Tuple[float, int]:
    _, trace = forward(net, X, mode=Mode.EVAL)
    analytic = flatten_grads(backward(net, trace, output_grad, wrt=wrt, reduction=reduction))

    def f(theta: np.ndarray) -> float:
        out, _ = forward(unflatten_params(net, theta), X, mode=Mode.EVAL)
        return loss_of_outputs(out)

    numeric = finite_diff_gradient(f, flatten_params(net), step)
    keep = _smooth_mask(net, X, step)
    return relative_error(analytic[keep], numeric[keep]), int(np.sum(~keep))


def run_gradcheck(
    seed: int = 0,
    instances: int = 100,
    step: float = DEFAULT_STEP,
    tolerance: float = DEFAULT_TOLERANCE,
) -> GradcheckReport:
    rng = np.random.default_rng(seed)
    worst: Dict[str, float] = {}
    skipped: Dict[str, int] = {}

    def record(name: str, err: float, skip: int = 0) -> None:
        worst[name] = max(worst.get(name, 0.0), err)
        skipped[name] = skipped.get(name, 0) + skip

    for _ in range(instances):
        n = int(rng.integers(1, 6))

        # network backward, mean reduction, gradient given w.r.t. outputs
        head = Head.SOFTMAX if rng.random() < 0.5 else Head.LINEAR
        net = _random_net(rng, head)
        X = rng.normal(size=(n, net.n_inputs))
        G = rng.normal(size=(n, net.n_outputs))
        err, skip = _param_check(net, X, lambda out: float(np.sum(G * out)) / n, G, "outputs", "mean", step)
        record("core_nn.backward", err, skip)

        # o, sigma and output gradients of the loss family
        c = int(rng.integers(1, 6))
        losses = PerOutputLosses.full(rng.uniform(0.0, 3.0, size=c), n)
        o = rng.uniform(0.5, 3.0, size=c)
        num = finite_diff_gradient(lambda v: wrapped_total(v, losses).wrapped_total, o, step)
        record("losses.grad_wrapped_wrt_o", relative_error(grad_wrapped_wrt_o(o, losses), num))

        sigma = rng.uniform(1.0, 3.0, size=c)
        num = finite_diff_gradient(lambda s: sigma_nll(s, losses)[0], sigma, step)
        record("losses.sigma_nll", relative_error(sigma_nll(sigma, losses)[1], num))

        Y = rng.normal(size=(n, c))
        F = rng.normal(size=(n, c))
        num = finite_diff_gradient(lambda v: float(np.sum(o * per_output_squared_error(Y, v).values)), F, step)
        record("losses.wrapped_output_grad.squared", relative_error(wrapped_output_grad(o, Y, F, LossKind.SQUARED), num))

        k = max(c, 2)
        ok = rng.uniform(0.2, 3.0, size=k)
        labels = rng.integers(0, k, size=n)
        Z = rng.normal(size=(n, k))
        num = finite_diff_gradient(lambda z: weighted_sample_cross_entropy(ok, labels, softmax(z)), Z, step)
        analytic = wrapped_output_grad(ok, labels, softmax(Z), LossKind.CROSS_ENTROPY)
        record("losses.wrapped_output_grad.cross_entropy", relative_error(analytic, num))

        # composed d l_wrap / d w through the network (trainer path: reduction="sum")
        net = _random_net(rng, Head.LINEAR)
        X = rng.normal(size=(n, net.n_inputs))
        Y = rng.normal(size=(n, net.n_outputs))
        ow = rng.uniform(0.2, 3.0, size=net.n_outputs)
        out, _ = forward(net, X, mode=Mode.EVAL)
        err, skip = _param_check(
            net, X,
            lambda out_: float(np.sum(ow * per_output_squared_error(Y, out_).values)),
            wrapped_output_grad(ow, Y, out, LossKind.SQUARED),
            "outputs", "sum", step,
        )
        record("trainer.wrapped_param_grad.squared", err, skip)

        net = _random_net(rng, Head.SOFTMAX, n_out=int(rng.integers(2, 6)))
        X = rng.normal(size=(n, net.n_inputs))
        labels = rng.integers(0, net.n_outputs, size=n)
        ow = rng.uniform(0.2, 3.0, size=net.n_outputs)
        out, _ = forward(net, X, mode=Mode.EVAL)
        err, skip = _param_check(
            net, X,
            lambda out_: weighted_sample_cross_entropy(ow, labels, out_),
            wrapped_output_grad(ow, labels, out, LossKind.CROSS_ENTROPY),
            "logits", "sum", step,
        )
        record("trainer.wrapped_param_grad.cross_entropy", err, skip)

    report = GradcheckReport(
        seed=int(seed), instances=int(instances), step=float(step), tolerance=float(tolerance),
        max_rel_error=worst, skipped_coordinates=skipped,
    )
    for name, err in sorted(worst.items()):
        log.info("gradcheck %-45s max rel err %.3g", name, err)
    return report
