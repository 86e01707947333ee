# -*- coding: utf-8 -*-
"""Models for the dense feed-forward network.

All arrays are float64. Values are immutable after construction: every
update (optimizer step, parameter unflattening) builds a new instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class Activation(str, Enum):
    RELU = "relu"
    IDENTITY = "identity"


class Head(str, Enum):
    LINEAR = "linear"
    SOFTMAX = "softmax"


class Mode(str, Enum):
    TRAIN = "train"
    EVAL = "eval"


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAGRAD = "adagrad"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DenseLayer:
    """weight is (out, in); bias is (out,)."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", _frozen(self.weight))
        object.__setattr__(self, "bias", _frozen(self.bias))

    @property
    def fan_in(self) -> int:
        return int(self.weight.shape[1])

    @property
    def fan_out(self) -> int:
        return int(self.weight.shape[0])


@dataclass(frozen=True, eq=False)
class Network:
    layers: Tuple[DenseLayer, ...]
    arch: Tuple[int, ...]
    activations: Tuple[Activation, ...]
    head: Head = Head.LINEAR
    dropout: Tuple[float, ...] = ()

    @property
    def n_inputs(self) -> int:
        return self.arch[0]

    @property
    def n_outputs(self) -> int:
        return self.arch[-1]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def with_layers(self, layers: Tuple[DenseLayer, ...]) -> "Network":
        return Network(
            layers=tuple(layers),
            arch=self.arch,
            activations=self.activations,
            head=self.head,
            dropout=self.dropout,
        )


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    """Everything backward() needs from one forward pass over a mini-batch.

    ``inputs[k]`` is what layer k consumed, ``pre[k]`` its affine output,
    ``post[k]`` its activation output (after dropout for hidden layers;
    the head output for the last layer). ``masks[k]`` is the scaled dropout
    mask applied to hidden layer k, or None.
    """

    inputs: Tuple[np.ndarray, ...]
    pre: Tuple[np.ndarray, ...]
    post: Tuple[np.ndarray, ...]
    masks: Tuple[Optional[np.ndarray], ...]
    mode: Mode = Mode.EVAL

    @property
    def batch_size(self) -> int:
        return int(self.inputs[0].shape[0])

    @property
    def depth(self) -> int:
        return len(self.pre)


@dataclass(frozen=True, eq=False)
class LayerGrads:
    weight: np.ndarray
    bias: np.ndarray


@dataclass(frozen=True, eq=False)
class ParamGrads:
    layers: Tuple[LayerGrads, ...]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g.weight)) and np.all(np.isfinite(g.bias)) for g in self.layers)


@dataclass(frozen=True, eq=False)
class OptimizerState:
    """SGD or AdaGrad state.

    ``accum`` mirrors the network parameters (weight, bias per layer) and
    only exists for AdaGrad. Entries are sums of squared gradients, so they
    never decrease.
    """

    kind: OptimizerKind
    lr: float
    eps: float = 1e-8
    accum: Tuple[Tuple[np.ndarray, np.ndarray], ...] = field(default=(), repr=False)
    steps: int = 0
