# -*- coding: utf-8 -*-
"""Verifiers and estimators around the wrapped loss.

- finite_diff_gradient: central-difference oracle for analytic gradients
- check_theorem1: Monte-Carlo check of |l_wrap - l_orig| <= 1/(c(L+1)) near o = 1
- wrap_error_surface / wrap_error_slices: o P^2 + log(1/o) grids
- expected_wrap_estimate / dof_output_surface: c(1 + log DoF) + sum log sigma^2
- compute_residual_bound_L: max squared residual of a model on a dataset

Everything returns values; serialization lives in storage/ and app/.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.calculations.nn import forward
from core.errors import DomainError, NumericError, ShapeError
from core.models.dataset import Dataset
from core.models.losses import DEFAULT_O_FLOOR
from core.models.nn import Mode, Network

log = logging.getLogger(__name__)

THEOREM1_CHUNK = 4096
DEFAULT_SLACK = 1.05


# --- finite differences ----------------------------------------------------

def finite_diff_gradient(
    f: Callable[[np.ndarray], float],
    at,
    step: float = 1e-5,
) -> np.ndarray:
    """Central differences (f(x+h) - f(x-h)) / 2h per coordinate; result has the shape of ``at``."""
    if not (step > 0):
        raise DomainError(f"step must be > 0, got {step}")
    x = np.array(at, dtype=np.float64, copy=True)
    flat = x.reshape(-1)
    grad = np.empty(flat.size)
    for j in range(flat.size):
        orig = flat[j]
        flat[j] = orig + step
        hi = float(f(x))
        flat[j] = orig - step
        lo = float(f(x))
        flat[j] = orig
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise NumericError("non-finite evaluation in finite differences", diagnostics={"coordinate": j})
        grad[j] = (hi - lo) / (2.0 * step)
    return grad.reshape(x.shape)


# --- bound check -----------------------------------------------------------

@dataclass(frozen=True)
class Theorem1Report:
    c: int
    L: float
    delta: float
    trials: int
    max_abs_diff: float
    bound: float
    slack: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "L": self.L,
            "delta": self.delta,
            "trials": self.trials,
            "max_abs_diff": self.max_abs_diff,
            "bound": self.bound,
            "slack": self.slack,
            "pass": self.passed,
        }


def theorem1_delta_limit(c: int, L: float) -> float:
    return float((c * (L + 1.0)) ** -2)


def wrap_minus_original(o: np.ndarray, losses: np.ndarray) -> np.ndarray:
    """Row-wise sum_i (o_i l_i + log(1/o_i)) - sum_i l_i for stacked (trials, c) arrays."""
    return np.sum((o - 1.0) * losses - np.log(o), axis=-1)


def check_theorem1(
    c: int,
    L: float,
    delta: float,
    trials: int = 10000,
    seed: int = 0,
    slack: float = DEFAULT_SLACK,
    include_corners: bool = True,
) -> Theorem1Report:
    """Sample o_i ~ U[1-delta, 1+delta], l_i ~ U[0, L] and compare the worst gap to slack/(c(L+1)).

    delta = 0 is accepted (o = 1, the gap is exactly 0). With ``include_corners``
    the two extreme configurations (o = 1+delta, l = L) and (o = 1-delta, l = 0)
    are evaluated as well. Trials run in fixed-size chunks whose RNG streams
    derive from (seed, chunk index).
    """
    if not isinstance(c, (int, np.integer)) or c < 1:
        raise DomainError(f"c must be an integer >= 1, got {c!r}")
    if not (L > 1.0) or not np.isfinite(L):
        raise DomainError(f"L must be finite and > 1, got {L!r}")
    limit = theorem1_delta_limit(c, L)
    if not (0.0 <= delta <= limit * (1.0 + 1e-12)):
        raise DomainError(f"delta must lie in [0, (c(L+1))^-2 = {limit:.6g}], got {delta!r}")
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise DomainError(f"trials must be an integer >= 1, got {trials!r}")
    if not (slack >= 1.0):
        raise DomainError(f"slack must be >= 1, got {slack!r}")

    worst = 0.0
    done = 0
    chunk = 0
    while done < trials:
        m = min(THEOREM1_CHUNK, trials - done)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), chunk]))
        o = 1.0 + rng.uniform(-delta, delta, size=(m, c))
        losses = rng.uniform(0.0, L, size=(m, c))
        worst = max(worst, float(np.max(np.abs(wrap_minus_original(o, losses)))))
        done += m
        chunk += 1

    if include_corners and delta > 0.0:
        corners_o = np.array([[1.0 + delta] * c, [1.0 - delta] * c])
        corners_l = np.array([[L] * c, [0.0] * c])
        worst = max(worst, float(np.max(np.abs(wrap_minus_original(corners_o, corners_l)))))

    bound = 1.0 / (c * (L + 1.0))
    report = Theorem1Report(
        c=int(c), L=float(L), delta=float(delta), trials=int(trials),
        max_abs_diff=worst, bound=bound, slack=float(slack), passed=bool(worst <= slack * bound),
    )
    log.info("bound check c=%d L=%g delta=%.3g: max gap %.6g vs %.6g -> %s",
             c, L, delta, worst, slack * bound, "pass" if report.passed else "FAIL")
    return report


# --- surfaces --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """values[i, j] belongs to (axis1[i], axis2[j])."""

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    axis1_name: str = "o"
    axis2_name: str = "P"

    def __post_init__(self) -> None:
        a1 = np.asarray(self.axis1, dtype=np.float64).reshape(-1)
        a2 = np.asarray(self.axis2, dtype=np.float64).reshape(-1)
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (a1.size, a2.size):
            raise ShapeError(f"values {v.shape} do not match axes ({a1.size}, {a2.size})")
        object.__setattr__(self, "axis1", a1)
        object.__setattr__(self, "axis2", a2)
        object.__setattr__(self, "values", v)

    def row(self, value: float) -> np.ndarray:
        """Values along axis2 at the axis1 entry equal to ``value``."""
        hits = np.flatnonzero(self.axis1 == value)
        if hits.size == 0:
            raise DomainError(f"{value!r} is not on the {self.axis1_name} axis")
        return self.values[int(hits[0])]

    def argmin_axis1(self) -> np.ndarray:
        """For each axis2 entry, the axis1 value minimizing the surface."""
        return self.axis1[np.argmin(self.values, axis=0)]


def grid_axis(lo: float, hi: float, steps: int, pins: Iterable[float] = ()) -> np.ndarray:
    """Evenly spaced [lo, hi] with ``steps`` points, plus every pin inside the range, sorted and unique."""
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise DomainError(f"steps must be an integer >= 1, got {steps!r}")
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise DomainError(f"need finite lo <= hi, got [{lo}, {hi}]")
    base = np.linspace(lo, hi, steps) if steps > 1 else np.array([float(lo)])
    extra = [float(p) for p in pins if lo <= p <= hi]
    return np.unique(np.concatenate([base, np.asarray(extra, dtype=np.float64)]))


def wrap_error_values(o_axis: Sequence[float], p_axis: Sequence[float], floor: float = DEFAULT_O_FLOOR) -> np.ndarray:
    o = np.asarray(o_axis, dtype=np.float64).reshape(-1)
    P = np.asarray(p_axis, dtype=np.float64).reshape(-1)
    if np.any(o <= 0.0):
        raise DomainError("o must be > 0 on the whole grid")
    if np.any(o < floor):
        raise DomainError(f"o grid goes below the floor {floor}")
    return o[:, None] * (P[None, :] ** 2) + np.log(1.0 / o)[:, None]


def wrap_error_surface(
    o_range: Tuple[float, float, int],
    p_range: Tuple[float, float, int],
    *,
    pin_minimizers: bool = True,
    floor: float = DEFAULT_O_FLOOR,
) -> SurfaceGrid:
    """Grid of o P^2 + log(1/o); rows are o values, columns are P values.

    o = 1 is always pinned onto the o axis, so that row equals P^2 exactly.
    With ``pin_minimizers`` each per-P minimizer o* = 1/P^2 in range is
    pinned too.
    """
    o_lo, o_hi, o_n = o_range
    if o_lo <= 0.0:
        raise DomainError(f"o range must be > 0, got lower end {o_lo}")
    P = grid_axis(*p_range)
    pins: List[float] = [1.0]
    if pin_minimizers:
        pins.extend(1.0 / p ** 2 for p in P if p != 0.0)
    o = grid_axis(o_lo, o_hi, o_n, pins=pins)
    return SurfaceGrid(axis1=o, axis2=P, values=wrap_error_values(o, P, floor), axis1_name="o", axis2_name="P")


def wrap_error_slices(o_values: Sequence[float], p_values: Sequence[float], floor: float = DEFAULT_O_FLOOR) -> SurfaceGrid:
    """One parabola in P per o value, on exactly the given points."""
    return SurfaceGrid(
        axis1=np.asarray(o_values, dtype=np.float64),
        axis2=np.asarray(p_values, dtype=np.float64),
        values=wrap_error_values(o_values, p_values, floor),
        axis1_name="o",
        axis2_name="P",
    )


# --- expected wrap loss ----------------------------------------------------

def expected_wrap_estimate(c: int, dof: float, sigma_sq: Sequence[float]) -> float:
    """c (1 + log DoF) + sum_i log sigma_i^2."""
    s2 = np.asarray(sigma_sq, dtype=np.float64).reshape(-1)
    if c < 0 or s2.size != c:
        raise DomainError(f"need c >= 0 and {c} variance entries, got {s2.size}")
    if not (dof >= 1.0):
        raise DomainError(f"DoF must be >= 1, got {dof!r}")
    if c == 0:
        return 0.0
    if np.any(~np.isfinite(s2)) or np.any(s2 <= 0.0):
        raise DomainError("sigma^2 entries must be finite and > 0")
    return float(c * (1.0 + np.log(dof)) + np.sum(np.log(s2)))


def dof_output_surface(dof_values: Sequence[float], c_values: Sequence[int]) -> SurfaceGrid:
    """c (1 + log DoF) over a (DoF, c) grid; the variance term is omitted."""
    dof = np.asarray(dof_values, dtype=np.float64).reshape(-1)
    cs = np.asarray(c_values, dtype=np.float64).reshape(-1)
    if np.any(dof < 1.0):
        raise DomainError("DoF values must be >= 1")
    if np.any(cs < 0.0):
        raise DomainError("output counts must be >= 0")
    values = cs[None, :] * (1.0 + np.log(dof))[:, None]
    return SurfaceGrid(axis1=dof, axis2=cs, values=values, axis1_name="dof", axis2_name="c")


# --- residual bound --------------------------------------------------------

def residual_bound(residuals) -> float:
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise ShapeError("no residuals")
    return float(np.max(r ** 2))


def compute_residual_bound_L(net: Network, data: Dataset) -> float:
    """max over samples and outputs of (y_i - f(x)_i)^2."""
    if data.is_classification:
        raise DomainError("the residual bound needs a regression dataset")
    if data.p != net.n_inputs or data.c != net.n_outputs:
        raise ShapeError(f"data (p={data.p}, c={data.c}) does not match network {net.arch}")
    outputs, _ = forward(net, data.X, mode=Mode.EVAL)
    return residual_bound(data.Y - outputs)


def theorem1_sweep(
    cs: Sequence[int],
    Ls: Sequence[float],
    trials: int = 10000,
    seed: int = 0,
    slack: float = DEFAULT_SLACK,
) -> List[Theorem1Report]:
    """check_theorem1 over a (c, L) grid with delta at its upper limit."""
    out: List[Theorem1Report] = []
    for c in cs:
        for L in Ls:
            out.append(check_theorem1(int(c), float(L), theorem1_delta_limit(int(c), float(L)),
                                      trials=trials, seed=seed, slack=slack))
    return out


def optimal_o(P: float) -> Optional[float]:
    """argmin over o of o P^2 + log(1/o), or None when P = 0 (no finite minimizer)."""
    return None if P == 0.0 else 1.0 / P ** 2
