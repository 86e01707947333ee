# -*- coding: utf-8 -*-
"""Dense feed-forward network: init, forward, reverse-mode backward, optimizers.

NOTE: pure numpy, float64 throughout. Nothing here mutates its inputs.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ArchitectureError, DomainError, NumericError, ShapeError
from core.models.nn import (
    Activation,
    DenseLayer,
    ForwardTrace,
    Head,
    LayerGrads,
    Mode,
    Network,
    OptimizerKind,
    OptimizerState,
    ParamGrads,
)

DropoutSpec = Union[None, float, Sequence[float]]


def _dropout_rates(dropout: DropoutSpec, n_hidden: int) -> Tuple[float, ...]:
    if dropout is None:
        return (0.0,) * n_hidden
    if isinstance(dropout, (int, float)):
        rates = (float(dropout),) * n_hidden
    else:
        rates = tuple(float(r) for r in dropout)
        if len(rates) != n_hidden:
            raise ArchitectureError(f"dropout needs {n_hidden} rate(s), got {len(rates)}")
    for r in rates:
        if not (0.0 <= r < 1.0):
            raise ArchitectureError(f"dropout rate must be in [0, 1), got {r}")
    return rates


def init_network(
    arch: Sequence[int],
    head: Union[Head, str] = Head.LINEAR,
    dropout: DropoutSpec = None,
    seed: int = 0,
    activation: Union[Activation, str] = Activation.RELU,
) -> Network:
    """Build a network with fan-in scaled uniform weights U(±sqrt(1/fan_in)) and zero biases."""
    widths = [int(w) for w in arch] if arch is not None else []
    if len(widths) < 2:
        raise ArchitectureError(f"arch needs at least input and output widths, got {list(widths)}")
    if any(w <= 0 for w in widths):
        raise ArchitectureError(f"all layer widths must be positive, got {widths}")
    try:
        head = Head(head)
        activation = Activation(activation)
    except ValueError as exc:
        raise ArchitectureError(str(exc)) from exc

    n_hidden = len(widths) - 2
    rates = _dropout_rates(dropout, n_hidden)

    rng = np.random.default_rng(seed)
    layers: List[DenseLayer] = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        limit = np.sqrt(1.0 / fan_in)
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        layers.append(DenseLayer(weight=w, bias=np.zeros(fan_out)))

    return Network(
        layers=tuple(layers),
        arch=tuple(widths),
        activations=(activation,) * n_hidden,
        head=head,
        dropout=rates,
    )


def _activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind == Activation.RELU:
        return np.maximum(z, 0.0)
    return z


def _activate_grad(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind == Activation.RELU:
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=1, keepdims=True)


def _as_batch(batch: np.ndarray, width: int) -> np.ndarray:
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != width:
        raise ShapeError(f"batch must be (n, {width}), got {np.shape(batch)}")
    return x


def forward(
    net: Network,
    batch: np.ndarray,
    mode: Union[Mode, str] = Mode.EVAL,
    seed: int = 0,
) -> Tuple[np.ndarray, ForwardTrace]:
    """Run the network on a batch. Dropout only acts in train mode (inverted scaling)."""
    mode = Mode(mode)
    a = _as_batch(batch, net.n_inputs)
    rng: Optional[np.random.Generator] = None

    inputs: List[np.ndarray] = []
    pre: List[np.ndarray] = []
    post: List[np.ndarray] = []
    masks: List[Optional[np.ndarray]] = []

    last = net.depth - 1
    for k, layer in enumerate(net.layers):
        inputs.append(a)
        z = a @ layer.weight.T + layer.bias
        pre.append(z)
        if k < last:
            h = _activate(net.activations[k], z)
            rate = net.dropout[k] if net.dropout else 0.0
            mask = None
            if mode == Mode.TRAIN and rate > 0.0:
                if rng is None:
                    rng = np.random.default_rng(seed)
                mask = (rng.random(h.shape) >= rate).astype(np.float64) / (1.0 - rate)
                h = h * mask
            masks.append(mask)
            post.append(h)
            a = h
        else:
            out = softmax(z) if net.head == Head.SOFTMAX else z
            masks.append(None)
            post.append(out)

    outputs = post[-1]
    if not np.all(np.isfinite(outputs)):
        raise NumericError("forward pass produced non-finite outputs")
    trace = ForwardTrace(
        inputs=tuple(inputs), pre=tuple(pre), post=tuple(post), masks=tuple(masks), mode=mode
    )
    return outputs, trace


def backward(
    net: Network,
    trace: ForwardTrace,
    output_grad: np.ndarray,
    *,
    wrt: str = "outputs",
    reduction: str = "mean",
) -> ParamGrads:
    """Reverse-mode gradient of sum_batch(output_grad * outputs).

    ``wrt="logits"`` means output_grad is already taken w.r.t. the final
    pre-activations (skips the softmax Jacobian). ``reduction="mean"``
    divides by the batch size; ``"sum"`` leaves it to the caller.
    """
    if trace.depth != net.depth:
        raise ShapeError(f"trace depth {trace.depth} does not match network depth {net.depth}")
    g = np.asarray(output_grad, dtype=np.float64)
    if g.shape != trace.post[-1].shape:
        raise ShapeError(f"output_grad shape {g.shape} != outputs shape {trace.post[-1].shape}")
    if wrt not in ("outputs", "logits"):
        raise ValueError(f"wrt must be 'outputs' or 'logits', got {wrt!r}")
    if reduction not in ("mean", "sum"):
        raise ValueError(f"reduction must be 'mean' or 'sum', got {reduction!r}")

    if net.head == Head.SOFTMAX and wrt == "outputs":
        p = trace.post[-1]
        g = p * (g - np.sum(g * p, axis=1, keepdims=True))

    scale = 1.0 / trace.batch_size if reduction == "mean" else 1.0
    delta = g
    grads: List[LayerGrads] = []
    for k in range(net.depth - 1, -1, -1):
        layer = net.layers[k]
        x = trace.inputs[k]
        if x.shape[1] != layer.fan_in:
            raise ShapeError(f"trace input of layer {k} has width {x.shape[1]}, expected {layer.fan_in}")
        grads.append(LayerGrads(weight=(delta.T @ x) * scale, bias=np.sum(delta, axis=0) * scale))
        if k > 0:
            da = delta @ layer.weight
            mask = trace.masks[k - 1]
            if mask is not None:
                da = da * mask
            delta = da * _activate_grad(net.activations[k - 1], trace.pre[k - 1])
    grads.reverse()
    return ParamGrads(layers=tuple(grads))


def degrees_of_freedom(net: Network) -> int:
    return int(sum(layer.weight.size + layer.bias.size for layer in net.layers))


def init_optimizer(
    net: Network,
    kind: Union[OptimizerKind, str] = OptimizerKind.ADAGRAD,
    lr: float = 0.01,
    eps: float = 1e-8,
) -> OptimizerState:
    kind = OptimizerKind(kind)
    if not (lr > 0.0):
        raise DomainError(f"learning rate must be > 0, got {lr}")
    if not (eps > 0.0):
        raise DomainError(f"eps must be > 0, got {eps}")
    accum: Tuple[Tuple[np.ndarray, np.ndarray], ...] = ()
    if kind == OptimizerKind.ADAGRAD:
        accum = tuple((np.zeros_like(l.weight), np.zeros_like(l.bias)) for l in net.layers)
    return OptimizerState(kind=kind, lr=float(lr), eps=float(eps), accum=accum)


def _check_congruent(net: Network, grads: ParamGrads) -> None:
    if len(grads.layers) != net.depth:
        raise ShapeError(f"gradients for {len(grads.layers)} layers, network has {net.depth}")
    for k, (layer, g) in enumerate(zip(net.layers, grads.layers)):
        if g.weight.shape != layer.weight.shape or g.bias.shape != layer.bias.shape:
            raise ShapeError(f"gradient shapes of layer {k} do not match its parameters")


def apply_grads(net: Network, grads: ParamGrads, opt: OptimizerState) -> Tuple[Network, OptimizerState]:
    """One optimizer step. Returns the new network and the new optimizer state."""
    _check_congruent(net, grads)
    if not grads.is_finite():
        raise NumericError("non-finite gradient entries", diagnostics={"step": opt.steps})

    new_layers: List[DenseLayer] = []
    if opt.kind == OptimizerKind.SGD:
        for layer, g in zip(net.layers, grads.layers):
            new_layers.append(DenseLayer(weight=layer.weight - opt.lr * g.weight,
                                         bias=layer.bias - opt.lr * g.bias))
        return net.with_layers(tuple(new_layers)), OptimizerState(
            kind=opt.kind, lr=opt.lr, eps=opt.eps, accum=(), steps=opt.steps + 1
        )

    accum = opt.accum or tuple((np.zeros_like(l.weight), np.zeros_like(l.bias)) for l in net.layers)
    new_accum: List[Tuple[np.ndarray, np.ndarray]] = []
    for layer, g, (acc_w, acc_b) in zip(net.layers, grads.layers, accum):
        acc_w = acc_w + g.weight ** 2
        acc_b = acc_b + g.bias ** 2
        new_layers.append(DenseLayer(
            weight=layer.weight - opt.lr * g.weight / np.sqrt(acc_w + opt.eps),
            bias=layer.bias - opt.lr * g.bias / np.sqrt(acc_b + opt.eps),
        ))
        new_accum.append((acc_w, acc_b))
    return net.with_layers(tuple(new_layers)), OptimizerState(
        kind=opt.kind, lr=opt.lr, eps=opt.eps, accum=tuple(new_accum), steps=opt.steps + 1
    )


# --- flat views (finite-difference oracle, snapshots) ---

def flatten_params(net: Network) -> np.ndarray:
    parts: List[np.ndarray] = []
    for layer in net.layers:
        parts.append(layer.weight.ravel())
        parts.append(layer.bias.ravel())
    return np.concatenate(parts)


def unflatten_params(net: Network, flat: np.ndarray) -> Network:
    flat = np.asarray(flat, dtype=np.float64)
    if flat.size != degrees_of_freedom(net):
        raise ShapeError(f"expected {degrees_of_freedom(net)} parameters, got {flat.size}")
    layers: List[DenseLayer] = []
    pos = 0
    for layer in net.layers:
        nw, nb = layer.weight.size, layer.bias.size
        w = flat[pos:pos + nw].reshape(layer.weight.shape)
        pos += nw
        b = flat[pos:pos + nb]
        pos += nb
        layers.append(DenseLayer(weight=w, bias=b))
    return net.with_layers(tuple(layers))


def flatten_grads(grads: ParamGrads) -> np.ndarray:
    parts: List[np.ndarray] = []
    for g in grads.layers:
        parts.append(np.ravel(g.weight))
        parts.append(np.ravel(g.bias))
    return np.concatenate(parts)
