"""The two semi-infinite integrators against Gamma-integral ground truth."""

import cmath
import math

import pytest

from fracmean.gammafn import gamma
from fracmean.principal import principal_pow
from fracmean.quad import (
    NonConvergenceError,
    QuadraturePreconditionError,
    QuadratureConfig,
    integrate_marchaud,
    integrate_singular_decaying,
)

SQRT_PI = 1.7724538509055159


def test_gamma_integral_singular_endpoint():
    res = integrate_singular_decaying(lambda t: math.exp(-t), -0.5)
    assert abs(res.value - SQRT_PI) <= 1e-9
    assert res.err_estimate >= abs(res.value - SQRT_PI)
    assert res.evaluations > 0


def test_plain_exponential():
    res = integrate_singular_decaying(lambda t: math.exp(-t), 0.0)
    assert abs(res.value - 1.0) <= 1e-10


def test_oscillatory_decaying_matches_gamma_times_power():
    res = integrate_singular_decaying(lambda t: cmath.exp((1j - 1.0) * t), -0.5)
    want = gamma(0.5) * principal_pow(1.0 - 1j, -0.5)
    assert abs(res.value - want) <= 1e-9


@pytest.mark.parametrize("s", [-0.9, -0.5, -0.1, 0.0])
def test_gamma_self_test_grid(s):
    cfg = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12)
    res = integrate_singular_decaying(lambda t: math.exp(-t), s, cfg)
    want = gamma(s + 1.0).real
    assert abs(res.value - want) <= cfg.rel_tol * abs(want) + cfg.abs_tol


def test_positive_power_weight():
    # t**3 e^-2t integrates to Gamma(4)/2**4
    cfg = QuadratureConfig(truncation_decay=2.0)
    res = integrate_singular_decaying(lambda t: math.exp(-2.0 * t), 3.0, cfg)
    want = 6.0 / 16.0
    assert abs(res.value - want) <= 1e-9


def test_linearity():
    cfg = QuadratureConfig()
    g1 = lambda t: math.exp(-t)
    g2 = lambda t: cmath.exp((2j - 1.0) * t)
    a, b = 2.0 - 1j, 0.5j
    combined = integrate_singular_decaying(lambda t: a * g1(t) + b * g2(t), -0.3, cfg)
    parts = a * integrate_singular_decaying(g1, -0.3, cfg).value + b * integrate_singular_decaying(g2, -0.3, cfg).value
    tol = 3.0 * (combined.err_estimate + 1e-10)
    assert abs(combined.value - parts) <= tol


def test_refinement_monotonicity_of_error_estimate():
    # with tolerances beyond reach the level cap is hit and the exception
    # carries the last-two-level disagreement; it must shrink with the cap
    errs = []
    for cap in (4, 5, 6):
        cfg = QuadratureConfig(rel_tol=1e-16, abs_tol=1e-300, max_level=cap)
        try:
            res = integrate_singular_decaying(lambda t: math.exp(-t), -0.5, cfg)
            errs.append(res.err_estimate)
        except NonConvergenceError as exc:
            errs.append(exc.err_estimate)
    assert errs[0] >= errs[1] >= errs[2]


def test_precondition_s_out_of_range():
    with pytest.raises(QuadraturePreconditionError):
        integrate_singular_decaying(lambda t: math.exp(-t), -1.0)


def test_nonconvergence_raises_at_level_cap():
    cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-15, max_level=3)
    with pytest.raises(NonConvergenceError):
        integrate_singular_decaying(lambda t: math.exp(-t), -0.9, cfg)


def test_marchaud_basic_identity():
    # int (1 - e^-t) t^(-1-d) dt = Gamma(1-d)/d
    res = integrate_marchaud(1.0, lambda u: math.exp(-u), 0.5)
    assert abs(res.value - 2.0 * SQRT_PI) <= 1e-9
    res = integrate_marchaud(1.0, lambda u: math.exp(-u), 0.3)
    want = gamma(0.7).real / 0.3
    assert abs(res.value - want) <= 1e-9


def test_marchaud_zero_integrand():
    res = integrate_marchaud(1.0, lambda u: 1.0, 0.4)
    assert abs(res.value) <= 1e-12


def test_marchaud_complex_phase():
    # f(u) = exp(iu * i) = exp(-u), delta = 0.3, same identity
    res = integrate_marchaud(1.0, lambda u: cmath.exp(1j * u * 1j), 0.3)
    want = gamma(0.7).real / 0.3
    assert abs(res.value - want) <= 1e-9


def test_marchaud_complex_order():
    # exact value Gamma(1-d)/d holds for complex d as well
    delta = 0.5 + 0.2j
    res = integrate_marchaud(1.0, lambda u: math.exp(-u), delta)
    want = gamma(1.0 - delta) / delta
    assert abs(res.value - want) <= 1e-8 * abs(want)


def test_marchaud_lipschitz_violation_detected():
    with pytest.raises(QuadraturePreconditionError):
        integrate_marchaud(1.0, lambda u: 1.0 - math.sqrt(u), 0.5)


def test_marchaud_delta_out_of_range():
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(QuadraturePreconditionError):
            integrate_marchaud(1.0, lambda u: math.exp(-u), bad)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_level=2)
    with pytest.raises(ValueError):
        QuadratureConfig(max_level=15)
    with pytest.raises(ValueError):
        QuadratureConfig(truncation_decay=0.0)
