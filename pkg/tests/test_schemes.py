import math

import numpy as np
import pytest

from illposed import (
    DomainError,
    RegularizerConfig,
    apply,
    cauchy_method,
    companion_apply,
    diagonal_operator,
    exp_decay_diagonal,
    fractional_power_exact,
    integration_operator,
    lavrentiev_iterated,
    qualification_check,
    regularize,
    regularizer_apply,
    shifted_solve,
)

LAV1 = RegularizerConfig("lavrentiev", m=1)
LAV2 = RegularizerConfig("lavrentiev", m=2)
CAUCHY = RegularizerConfig("cauchy")


def scalar_op(s):
    return diagonal_operator([s, s], "sup")


def test_lavrentiev_classical_scalar():
    s, alpha = 0.6, 0.1
    op = scalar_op(s)
    u = lavrentiev_iterated(op, 1, alpha, op.grid_function([s, s]), op.zeros())
    np.testing.assert_allclose(u.values, s / (s + alpha), rtol=1e-14)


def test_lavrentiev_consistent_data_is_fixed_point():
    op = exp_decay_diagonal(15)
    ubar = op.grid_function(np.linspace(1.0, 0.2, op.dim))
    f = apply(op, ubar)
    for m in (1, 2, 4):
        for alpha in (1e-4, 0.3, 10.0):
            u = lavrentiev_iterated(op, m, alpha, f, ubar)
            assert (u - ubar).norm() <= 1e-11 * ubar.norm()


def test_lavrentiev_matches_explicit_resolvent_sum():
    # oracle: u = ubar - R_alpha(A ubar - f) with
    # R_alpha = alpha^{-1} sum_{j=1}^m alpha^j (A + alpha I)^{-j}
    n, m, alpha = 128, 2, 0.05
    op = integration_operator(n)
    rng = np.random.Generator(np.random.Philox(key=17))
    f = op.grid_function(rng.standard_normal(op.dim))
    ubar = op.grid_function(rng.standard_normal(op.dim))
    got = lavrentiev_iterated(op, m, alpha, f, ubar)
    g = apply(op, ubar) - f
    r_g = op.zeros()
    term = g
    for _ in range(m):
        term = alpha * shifted_solve(op, alpha, term)
        r_g = r_g + term
    expected = ubar - (1.0 / alpha) * r_g
    assert (got - expected).norm() <= 1e-10 * max(expected.norm(), 1.0)


def test_lavrentiev_rejects_nonpositive_alpha():
    op = scalar_op(1.0)
    with pytest.raises(DomainError):
        lavrentiev_iterated(op, 1, 0.0, op.ones(), op.zeros())


def test_cauchy_scalar_closed_form_integrator():
    op = scalar_op(1.0)
    u = cauchy_method(op, 1.0, op.ones(), op.zeros(), CAUCHY, force_integrator=True)
    assert abs(u.values[0] - (1.0 - math.exp(-1.0))) <= 1e-6


def test_cauchy_exact_diagonal_path():
    s = 0.7
    op = scalar_op(s)
    u = cauchy_method(op, 0.5, op.ones(), op.zeros(), CAUCHY)
    np.testing.assert_allclose(u.values, (1.0 - math.exp(-2.0 * s)) / s, rtol=1e-13)


def test_cauchy_initial_condition():
    op = integration_operator(64)
    ubar = op.grid_function(np.linspace(0.5, 1.0, op.dim))
    f = op.ones()
    u = cauchy_method(op, 1e6, f, ubar, CAUCHY)
    tol = 1e-5 * (f.norm() + apply(op, ubar).norm())
    assert (u - ubar).norm() <= tol


def test_cauchy_stationary_solution():
    op = exp_decay_diagonal(10)
    ubar = op.grid_function(np.linspace(1.0, 0.1, op.dim))
    f = apply(op, ubar)
    for alpha in (1e-3, 1.0):
        u = cauchy_method(op, alpha, f, ubar, CAUCHY)
        assert (u - ubar).norm() <= 1e-11 * ubar.norm()


def test_companion_lavrentiev_scalar():
    s, alpha = 0.4, 0.25
    op = scalar_op(s)
    for m in (1, 2, 3):
        cfg = RegularizerConfig("lavrentiev", m=m)
        v = companion_apply(op, cfg, alpha, op.ones())
        np.testing.assert_allclose(v.values, (alpha / (s + alpha)) ** m, rtol=1e-13)


def test_companion_cauchy_scalar_exponential():
    s = 0.8
    op = scalar_op(s)
    v = companion_apply(op, CAUCHY, 1.0, op.ones())
    np.testing.assert_allclose(v.values, math.exp(-s), rtol=1e-13)
    vi = cauchy_method(op, 1.0, op.zeros(), op.ones(), CAUCHY, force_integrator=True)
    assert abs(vi.values[0] - math.exp(-s)) <= 1e-6


def test_companion_large_alpha_approaches_identity():
    op = integration_operator(64)
    u = op.grid_function(np.linspace(0.0, 1.0, op.dim))
    alpha = 1e6 * op.op_norm
    v = companion_apply(op, LAV2, alpha, u)
    assert (v - u).norm() <= 1e-4 * u.norm()


def test_regularize_exact_data_exact_guess():
    op = exp_decay_diagonal(12)
    u_true = op.grid_function(np.linspace(1.0, 0.1, op.dim))
    f = apply(op, u_true)
    for cfg in (LAV1, LAV2, CAUCHY):
        u = regularize(op, cfg, 0.3, f, u_true)
        assert (u - u_true).norm() <= 1e-11 * u_true.norm()


def test_regularize_scalar_arithmetic():
    # sigma = 1, u_true = 1, ubar = 0, noisy datum 1.01, alpha = 0.1
    op = scalar_op(1.0)
    u = regularize(op, LAV1, 0.1, op.grid_function([1.01, 1.01]), op.zeros())
    np.testing.assert_allclose(u.values, 1.01 / 1.1, rtol=1e-14)


def test_regularize_error_decomposition():
    # u_alpha - u_true = S_alpha (ubar - u_true) - R_alpha (A u_true - f_delta)
    op = exp_decay_diagonal(20)
    rng = np.random.Generator(np.random.Philox(key=23))
    u_true = op.grid_function(rng.standard_normal(op.dim))
    ubar = op.grid_function(rng.standard_normal(op.dim))
    f_delta = apply(op, u_true) + 0.01 * op.grid_function(rng.standard_normal(op.dim))
    for cfg in (LAV2, CAUCHY):
        alpha = 0.05
        lhs = regularize(op, cfg, alpha, f_delta, ubar) - u_true
        rhs = companion_apply(op, cfg, alpha, ubar - u_true) - regularizer_apply(
            op, cfg, alpha, apply(op, u_true) - f_delta
        )
        assert (lhs - rhs).norm() <= 1e-11 * max(lhs.norm(), 1.0)


def test_regularize_alpha_ladder_monotone_on_exact_data():
    op = exp_decay_diagonal(25)
    u_true = op.grid_function(np.linspace(1.0, 0.5, op.dim))
    f = apply(op, u_true)
    errs = []
    for alpha in (1.0, 0.1, 0.01, 1e-3, 1e-4):
        u = regularize(op, LAV2, alpha, f, op.zeros())
        errs.append((u - u_true).norm())
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_qualification_scalar_oracle_integer_orders():
    # brute-force maximization of (alpha/(s+alpha))^m s^p alpha^{-p} over s
    svals = np.logspace(-12, 2, 3001)
    for m in (1, 2, 3):
        for p in range(0, m + 1):
            worst = 0.0
            for alpha in np.logspace(-8, 2, 21):
                ratios = (alpha / (svals + alpha)) ** m * svals**p * alpha ** (-p)
                worst = max(worst, ratios.max())
            assert worst <= 1.0 + 1e-9


def test_qualification_check_diagonal():
    op = exp_decay_diagonal(30)
    grid = np.logspace(-6, 0, 13)
    for p in (0.0, 1.0, 2.0):
        rep = qualification_check(op, LAV2, p, grid)
        assert rep.passed
        assert rep.sup_ratio <= 1.0 + 1e-9  # Hilbert case: the sharp bound is 1
        assert rep.certified_bound == (op.kappa_star + 1.0) ** 2


def test_qualification_check_non_integer_constant():
    op = exp_decay_diagonal(20)
    rep = qualification_check(op, LAV2, 0.5, np.logspace(-4, 0, 9))
    assert rep.certified_bound == 2.0 * (op.kappa_star + 1.0) ** 1.5
    assert rep.passed


def test_qualification_beyond_saturation_raises():
    op = exp_decay_diagonal(10)
    with pytest.raises(DomainError, match="saturation"):
        qualification_check(op, LAV2, 2.5, [0.1])


def test_divergence_beyond_saturation_detected():
    # p slightly above m: the decay ratio grows like alpha^{m-p} as alpha -> 0
    op = exp_decay_diagonal(40)
    p = 2.5
    g = fractional_power_exact(op, p, op.ones())

    def ratio(alpha):
        return companion_apply(op, LAV2, alpha, g).norm() / (alpha**p * op.ones().norm())

    assert ratio(1e-6) / ratio(1e-2) > 50.0


def test_cauchy_qualification_reported_without_verdict():
    op = exp_decay_diagonal(20)
    rep = qualification_check(op, CAUCHY, 3.0, np.logspace(-4, 0, 9))
    assert rep.certified_bound is None and rep.passed is None
    assert rep.sup_ratio < 10.0


def test_commutation_invariant():
    rng = np.random.Generator(np.random.Philox(key=29))
    ops = (integration_operator(96), exp_decay_diagonal(20))
    for op in ops:
        u = op.grid_function(rng.standard_normal(op.dim))
        au = apply(op, u)
        for cfg in (LAV2, CAUCHY):
            for alpha in (0.01, 0.5):
                gap = (
                    regularizer_apply(op, cfg, alpha, au)
                    - apply(op, regularizer_apply(op, cfg, alpha, u))
                ).norm()
                assert gap <= 1e-10 * max(au.norm(), 1.0)


def test_growth_invariant():
    rng = np.random.Generator(np.random.Philox(key=31))
    for op in (integration_operator(96), exp_decay_diagonal(25)):
        f = op.grid_function(rng.standard_normal(op.dim))
        for cfg in (LAV1, LAV2):
            bound = cfg.growth_constant(op.kappa_star)
            for alpha in np.logspace(-6, 1, 8):
                val = float(alpha) * regularizer_apply(op, cfg, float(alpha), f).norm()
                assert val <= bound * f.norm() * (1.0 + 1e-9)
    # evolution method on the diagonal kind: alpha ||R_alpha|| <= kappa = 1
    op = exp_decay_diagonal(25)
    f = op.grid_function(rng.standard_normal(op.dim))
    for alpha in np.logspace(-6, 1, 8):
        val = float(alpha) * regularizer_apply(op, CAUCHY, float(alpha), f).norm()
        assert val <= op.kappa_star * f.norm() * (1.0 + 1e-9)


def test_continuity_in_alpha():
    op = exp_decay_diagonal(25)
    u = op.grid_function(np.linspace(1.0, 0.2, op.dim))
    for cfg in (LAV2, CAUCHY):
        for alpha in (1e-3, 0.1):
            s0 = companion_apply(op, cfg, alpha, u)
            s1 = companion_apply(op, cfg, alpha * (1.0 + 1e-6), u)
            assert (s1 - s0).norm() <= 1e-4 * max(s0.norm(), 1e-300)


def test_range_chain_decay_ordering():
    # stronger power-type smoothness decays at least as fast, pointwise in alpha
    op = exp_decay_diagonal(40)
    v = op.ones()
    p1, p2 = 0.3, 0.9
    u1 = fractional_power_exact(op, p1, v)
    u2 = fractional_power_exact(op, p2, v)
    for alpha in np.logspace(-6, -1, 6):
        d1 = companion_apply(op, LAV2, float(alpha), u1).norm() / u1.norm()
        d2 = companion_apply(op, LAV2, float(alpha), u2).norm() / u2.norm()
        assert d2 <= d1 * (1.0 + 1e-9)


def test_config_validation():
    with pytest.raises(DomainError):
        RegularizerConfig("tikhonov")
    with pytest.raises(DomainError):
        RegularizerConfig("lavrentiev", m=0)
    assert RegularizerConfig("cauchy").p0 == math.inf
    assert RegularizerConfig("lavrentiev", m=3).p0 == 3.0
