# -*- coding: utf-8 -*-
import numpy as np

from domain.gradcheck import relative_error, run_gradcheck

CHECKS = {
    "core_nn.backward",
    "losses.grad_wrapped_wrt_o",
    "losses.sigma_nll",
    "losses.wrapped_output_grad.squared",
    "losses.wrapped_output_grad.cross_entropy",
    "trainer.wrapped_param_grad.squared",
    "trainer.wrapped_param_grad.cross_entropy",
}


def test_relative_error():
    assert relative_error([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert relative_error([2.0, 0.0], [1.0, 0.0]) == 0.5
    # tiny gradients are compared on an absolute scale
    assert relative_error([1e-9], [2e-9]) < 1e-5


def test_every_analytic_gradient_matches_finite_differences():
    report = run_gradcheck(seed=0, instances=100)
    assert set(report.max_rel_error) == CHECKS
    assert report.passed, report.max_rel_error
    assert all(err <= 1e-6 for err in report.max_rel_error.values())
    d = report.as_dict()
    assert d["pass"] is True
    assert d["instances"] == 100 and d["step"] == 1e-5


def test_gradcheck_is_reproducible():
    a = run_gradcheck(seed=4, instances=5)
    b = run_gradcheck(seed=4, instances=5)
    assert a.max_rel_error == b.max_rel_error
    assert all(np.isfinite(v) for v in a.max_rel_error.values())
