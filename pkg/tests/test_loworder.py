import math

import numpy as np
import pytest

from illposed import (
    DomainError,
    GridFunction,
    LogExampleParams,
    log_kernel_apply,
    log_kernel_apply_at,
    log_kernel_derivative,
    sample_u_log,
    verify_membership,
)
from illposed.loworder import EULER_GAMMA, abel_order_derivative_identity_gap

PARAMS = LogExampleParams(c=0.5, kappa=2.0)


def test_params_validation():
    with pytest.raises(DomainError):
        LogExampleParams(c=1.0, kappa=2.0)
    with pytest.raises(DomainError):
        LogExampleParams(c=0.5, kappa=0.0)
    LogExampleParams(c=0.5, kappa=0.5)  # sub-threshold candidates are expressible


def test_u_log_values():
    u = sample_u_log(PARAMS, 64)
    assert u.values[0] == 0.0
    # u(1) = (log 2)^{-2}, frozen from independent arithmetic
    assert math.isclose(u.values[-1], 2.0813689810056077, rel_tol=1e-13)


def test_u_log_monotone_increasing():
    u = sample_u_log(PARAMS, 256)
    assert np.all(np.diff(u.values) > 0.0)


def test_log_kernel_constant_oracle():
    # int_0^x log(x - xi) dxi = x (log x - 1); the rule integrates the
    # piecewise-linear interpolant exactly, and a constant is linear
    n = 128
    ones = GridFunction(np.ones(n + 1), "sup")
    # bypass the u(0) = 0 gate by evaluating pointwise
    for x in (0.25, 0.5, 1.0):
        got = log_kernel_apply_at(ones, x)
        assert math.isclose(got, x * (math.log(x) - 1.0), rel_tol=1e-12)
    assert math.isclose(log_kernel_apply_at(ones, 1.0), -1.0, rel_tol=1e-12)


def test_log_kernel_zero():
    u = GridFunction(np.zeros(65), "sup")
    out = log_kernel_apply(u)
    assert out.norm() == 0.0
    assert out.values[0] == 0.0


def test_log_kernel_requires_vanishing_origin():
    with pytest.raises(DomainError):
        log_kernel_apply(GridFunction(np.ones(65), "sup"))


def test_log_kernel_refinement_for_smooth_input():
    # sup distance between successive refinements drops by at least 1.8x
    def s_on_grid(n):
        x = np.linspace(0.0, 1.0, n + 1)
        u = GridFunction(x * (1.0 - x), "sup")
        return log_kernel_apply(u)

    gaps = []
    for n in (64, 128, 256):
        coarse = s_on_grid(n)
        fine = s_on_grid(2 * n)
        gaps.append(np.max(np.abs(fine.values[::2] - coarse.values)))
    assert gaps[1] <= gaps[0] / 1.8
    assert gaps[2] <= gaps[1] / 1.8


def test_w_decay_curve_strictly_decreasing():
    xs = [2.0**-k for k in range(4, 21)]
    w = log_kernel_derivative(PARAMS, xs)
    mags = np.abs(w)
    assert np.all(np.diff(mags) < 0.0)
    assert np.all(w < 0.0)  # log(x - xi) < 0 and u' > 0 on (0, 1)


def test_w_no_decay_below_threshold_kappa():
    # kappa = 0.5 < 1: |w| grows like log(1/x)^{1/2} instead of decaying
    bad = LogExampleParams(c=0.5, kappa=0.5)
    xs = [2.0**-k for k in (4, 10, 16)]
    mags = np.abs(log_kernel_derivative(bad, xs))
    assert mags[0] < mags[1] < mags[2]


def test_w_finite_difference_cross_check():
    u = sample_u_log(PARAMS, 512)
    h = 1e-4
    fd = (log_kernel_apply_at(u, 0.5 + h) - log_kernel_apply_at(u, 0.5 - h)) / (2.0 * h)
    w = float(log_kernel_derivative(PARAMS, [0.5])[0])
    assert abs(fd - w) <= 1e-3 * abs(w)


def test_w_matches_transform_derivative_at_ten_points():
    u = sample_u_log(PARAMS, 512)
    h = 1e-4
    xs = np.linspace(0.15, 0.9, 10)
    w = log_kernel_derivative(PARAMS, xs)
    for x, wx in zip(xs, w):
        fd = (log_kernel_apply_at(u, x + h) - log_kernel_apply_at(u, x - h)) / (2.0 * h)
        assert abs(fd - wx) <= 1e-3 * abs(wx)


def test_log_kernel_transform_bounded():
    # ||S u|| <= M ||u||: the empirical bound is stable under refinement
    norms = []
    for n in (128, 256, 512):
        u = sample_u_log(PARAMS, n)
        norms.append(log_kernel_apply(u).norm() / u.norm())
    assert abs(norms[2] - norms[1]) <= 0.02 * norms[1]
    assert abs(norms[1] - norms[0]) <= 0.02 * norms[0]


def test_w_dual_quadrature_agreement():
    xs = [1.0, 0.5, 0.125]
    adaptive = log_kernel_derivative(PARAMS, xs)
    graded = log_kernel_derivative(PARAMS, xs, method="graded")
    assert np.max(np.abs(adaptive - graded)) <= 1e-5 * np.max(np.abs(adaptive))


def test_w_domain_checks():
    with pytest.raises(DomainError):
        log_kernel_derivative(PARAMS, [0.0])
    with pytest.raises(DomainError):
        log_kernel_derivative(PARAMS, [0.5], method="bogus")


def test_abel_order_derivative_identity():
    u = sample_u_log(PARAMS, 4096)
    gap = abel_order_derivative_identity_gap(u, (0.3, 0.4, 0.5, 0.6, 0.7))
    assert gap <= 1e-3


def test_abel_order_derivative_identity_monomial():
    # closed form for u = xi: d/dp (J_p u)|_{p=1} = x^2 log(x)/2 - x^2 (3 - 2 gamma)/4
    n = 2048
    x = np.linspace(0.0, 1.0, n + 1)
    u = GridFunction(x, "sup")
    from illposed.fractional import _binomial_lags

    eps, h = 1e-4, 1.0 / n
    lag = (_binomial_lags(h, 1.0 + eps, n) - _binomial_lags(h, 1.0 - eps, n)) / (2.0 * eps)
    deriv = np.zeros(n + 1)
    deriv[1:] = np.convolve(lag, u.values[1:])[:n]
    closed = 0.5 * x[1:] ** 2 * np.log(x[1:]) - x[1:] ** 2 * (3.0 - 2.0 * EULER_GAMMA) / 4.0
    idx = np.array([n // 4, n // 2, 3 * n // 4, n])
    assert np.max(np.abs(deriv[idx] - closed[idx - 1])) <= 2e-3


def test_verify_membership_passes_for_good_parameters():
    report = verify_membership(PARAMS, n=256, identity_n=2048)
    assert report.verdict
    assert report.w_decreasing
    assert report.log_quotients_cauchy
    assert report.derivative_match_ok
    d = report.to_dict()
    assert d["verdict"] == "pass"
    assert len(d["w_decay_curve"]["x"]) == len(d["w_decay_curve"]["w"])


def test_verify_membership_fails_below_threshold():
    report = verify_membership(LogExampleParams(c=0.5, kappa=0.5), n=256, identity_n=1024)
    assert not report.w_decreasing
    assert not report.verdict
    assert report.to_dict()["verdict"] == "fail"


def test_verify_membership_constant_probe_not_cauchy():
    report = verify_membership(PARAMS, n=256, identity_n=1024, u_values=np.ones(257))
    assert not report.log_quotients_cauchy
    assert not report.verdict
