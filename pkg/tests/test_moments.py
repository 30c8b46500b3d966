"""Fractional moments and power-mean expectations: routes against oracles."""

import cmath
import math

import numpy as np
import pytest

from fracmean.distributions import Cauchy, Empirical, MomentExistenceError, Poincare, ScaledT3, SupportError, TwoPoint
from fracmean.moments import (
    MCConfig,
    MomentEstimate,
    PowerMeanSpec,
    Route,
    RouteUnavailableError,
    closed_moment,
    continuity_scan,
    frac_moment,
    frac_moment_mc,
    frac_moment_neg,
    frac_moment_pos,
    power_mean,
    power_mean_expectation,
    t3_product_identity,
)
from fracmean.principal import BranchDomainError, principal_pow

CAUCHY = Cauchy(0.0, 1.0)
T3 = ScaledT3(0.0, 1.0)
POIN = Poincare(1.0, 0.0, 1.0)


# --- the statistic itself -----------------------------------------------------


def test_power_mean_is_arithmetic_at_p_one():
    vals = [1 + 1j, 3 + 0j, 0.5j]
    assert abs(power_mean(vals, 1.0) - np.mean(vals)) < 1e-15


def test_power_mean_idempotency():
    assert abs(power_mean([2 + 3j], -0.7) - (2 + 3j)) < 1e-14
    assert abs(power_mean([1j, 1j], -0.5) - 1j) < 1e-15
    assert abs(power_mean([1j, 1j, 1j], 0.0) - 1j) < 1e-15


def test_power_mean_zero_rejection():
    with pytest.raises(BranchDomainError):
        power_mean([1j, 0.0], -0.5)
    with pytest.raises(BranchDomainError):
        power_mean([1j, 0.0], 0.0)
    # p > 0 tolerates zeros through the 0**p = 0 convention
    assert abs(power_mean([0.0, 4.0], 0.5) - 1.0) < 1e-14


def test_power_mean_holder_bound_exact():
    # |PM_p| <= (1/n) sum |z_j| for p in (0, 1], upper-half-plane values
    rng = np.random.default_rng(71)
    for _ in range(10_000):
        n = rng.integers(2, 6)
        vals = rng.normal(size=n) + 1j * np.abs(rng.normal(size=n))
        p = rng.uniform(1e-6, 1.0)
        assert abs(power_mean(vals, p)) <= np.mean(np.abs(vals)) * (1 + 1e-12)


def test_t3_product_identity_trivial_and_grid():
    lhs, rhs = t3_product_identity(-0.5, 0)
    assert lhs == 1.0 and rhs == 1.0
    lhs, rhs = t3_product_identity(-0.5, 1)
    assert abs(lhs - (-1.0)) < 1e-12 and rhs == -1.0
    for p in (-0.9, -0.5, -0.2, -0.05):
        for k in range(7):
            lhs, rhs = t3_product_identity(p, k)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1.0)


# --- closed forms ---------------------------------------------------------------


def test_closed_moments():
    assert abs(closed_moment(CAUCHY, 1j, -0.5) - (0.5 - 0.5j)) < 1e-15
    want_t3 = principal_pow(2j, -1.5) * (2.5j)
    assert abs(closed_moment(T3, 1j, -0.5) - want_t3) < 1e-15
    assert abs(want_t3 - (0.625 - 0.625j)) < 1e-15
    assert abs(closed_moment(POIN, 0.0, 0.5) - cmath.exp(1j * math.pi / 4)) < 1e-15
    assert closed_moment(POIN, 1j, 0.5) is None  # no closed shifted form
    tp = TwoPoint(1j, 2j, 0.25)
    want = 0.25 * principal_pow(1j, 0.3) + 0.75 * principal_pow(2j, 0.3)
    assert abs(closed_moment(tp, 0.0, 0.3) - want) < 1e-15


def test_closed_moment_existence_guards():
    with pytest.raises(MomentExistenceError):
        closed_moment(CAUCHY, 1j, 1.0)
    with pytest.raises(MomentExistenceError):
        closed_moment(T3, 1j, 3.0)
    with pytest.raises(MomentExistenceError):
        closed_moment(CAUCHY, 0.0, -1.5)  # real alpha at deep negative order


def test_shift_consistency_at_order_one():
    # E[(X + alpha)^1] = E[X] + alpha for finite-mean laws
    assert abs(closed_moment(T3, 1j, 1.0) - 1j) < 1e-15  # mu = 0
    assert abs(closed_moment(ScaledT3(0.4, 2.0), 0.3 + 1j, 1.0) - (0.7 + 1j)) < 1e-14
    assert abs(closed_moment(POIN, 0.0, 1.0) - 1j) < 1e-15
    tp = TwoPoint(2.0, -1.0, 0.5)
    assert abs(closed_moment(tp, 1j, 1.0) - (0.5 + 1j)) < 1e-15


# --- quadrature routes ----------------------------------------------------------


@pytest.mark.parametrize("lam", [-0.25, -0.5, -0.9, complex(-0.5, 0.3)])
def test_frac_moment_neg_cauchy(lam):
    est = frac_moment_neg(CAUCHY, 1j, lam)
    want = principal_pow(2j, lam)
    assert abs(est.value - want) <= 1e-6 * abs(want)
    assert est.method is Route.QUAD_NEG


@pytest.mark.parametrize("lam", [-0.5, -1.0])
def test_frac_moment_neg_poincare(lam):
    est = frac_moment_neg(POIN, 0.0, lam)
    want = principal_pow(1j, lam)
    assert abs(est.value - want) <= 1e-6 * abs(want)


def test_frac_moment_neg_t3():
    est = frac_moment_neg(T3, 1j, -0.5)
    assert abs(est.value - (0.625 - 0.625j)) <= 1e-6


def test_frac_moment_neg_preconditions():
    with pytest.raises(ValueError):
        frac_moment_neg(CAUCHY, 1j, 0.5)
    with pytest.raises(SupportError):
        frac_moment_neg(CAUCHY, 0.0, -0.5)  # Im(alpha) = 0, real support


@pytest.mark.parametrize("lam,want", [(0.5, cmath.exp(1j * math.pi / 4)), (1.5, principal_pow(1j, 1.5))])
def test_frac_moment_pos_poincare(lam, want):
    est = frac_moment_pos(POIN, 0.0, lam)
    assert abs(est.value - want) <= 1e-4 * abs(want)
    assert est.method is Route.QUAD_POS


def test_frac_moment_pos_poincare_shifted_params():
    est = frac_moment_pos(Poincare(2.0, 1.0, 1.0), 0.0, 0.5)
    want = principal_pow(complex(-0.5, 0.5), 0.5)
    assert abs(est.value - want) <= 1e-6 * abs(want)


def test_frac_moment_pos_point_mass_at_one():
    est = frac_moment_pos(TwoPoint(1.0, 1.0, 1.0), 0.0, 0.5)
    assert abs(est.value - 1.0) <= 1e-8


def test_frac_moment_pos_two_point_mixed_atoms():
    tp = TwoPoint(2.0, -1.0 + 0.5j, 0.5)
    lam = 0.7
    est = frac_moment_pos(tp, 0.0, lam)
    want = closed_moment(tp, 0.0, lam)
    assert abs(est.value - want) <= 1e-7 * abs(want)


@pytest.mark.parametrize("lam", [0.5, 1.5, 2.5])
def test_frac_moment_pos_t3_vs_closed(lam):
    est = frac_moment_pos(T3, 1j, lam)
    want = closed_moment(T3, 1j, lam)
    tol = 2e-3 if lam > 2 else 1e-6  # E|Z|^3 = inf makes the last stretch rough
    assert abs(est.value - want) <= tol * abs(want)


def test_frac_moment_pos_rejections():
    with pytest.raises(MomentExistenceError):
        frac_moment_pos(CAUCHY, 1j, 0.5)
    with pytest.raises(MomentExistenceError):
        frac_moment_pos(T3, 1j, 3.2)
    with pytest.raises(ValueError):
        frac_moment_pos(POIN, 0.0, 2.0)  # integer order: not a fractional route


# --- Monte Carlo -----------------------------------------------------------------


def test_frac_moment_mc_point_mass():
    est = frac_moment_mc(TwoPoint(1j, 1j, 0.5), 0.0, 2.0, MCConfig(samples=4096, seed=1))
    assert abs(est.value - (-1.0)) < 1e-12
    assert est.uncertainty < 1e-12


def test_frac_moment_mc_cauchy_inverse():
    est = frac_moment_mc(CAUCHY, 1j, -1.0, MCConfig(samples=200_000, seed=2))
    assert abs(est.value - (-0.5j)) <= 4.0 * est.uncertainty


def test_frac_moment_mc_poincare_root():
    est = frac_moment_mc(POIN, 0.0, 0.5, MCConfig(samples=200_000, seed=3))
    assert abs(est.value - cmath.exp(1j * math.pi / 4)) <= 4.0 * est.uncertainty


def test_frac_moment_dispatch_and_meta():
    est = frac_moment(CAUCHY, 1j, -0.5)
    assert est.method is Route.CLOSED and est.uncertainty == 0.0
    est = frac_moment(POIN, 1j, -0.5)  # shifted: no closed form, quad applies
    want = frac_moment_mc(POIN, 1j, -0.5, MCConfig(samples=400_000, seed=5)).value
    assert est.method is Route.QUAD_NEG
    assert abs(est.value - want) <= 0.01
    est = frac_moment(CAUCHY, 1j, 0.0)
    assert est.value == 1.0 and est.method is Route.CLOSED
    with pytest.raises(RouteUnavailableError):
        frac_moment(POIN, 1j, 0.5, route=Route.CLOSED)


# --- power-mean expectations -------------------------------------------------------


def test_closed_cauchy_power_mean_invariance():
    for p in (-1.0, -0.5, -0.1):
        for n in (2, 3, 5):
            est = power_mean_expectation(CAUCHY, PowerMeanSpec(p=p, n=n, alpha=1j), Route.CLOSED)
            assert est.value == 2j
    with pytest.raises(RouteUnavailableError):
        power_mean_expectation(CAUCHY, PowerMeanSpec(p=0.5, n=2, alpha=1j), Route.CLOSED)


def test_closed_poincare_power_mean_invariance():
    for p in (-1.0, -0.5, 0.0, 0.5, 1.0):
        est = power_mean_expectation(POIN, PowerMeanSpec(p=p, n=4), Route.CLOSED)
        assert est.value == 1j
    est = power_mean_expectation(Poincare(2.0, 1.0, 1.0), PowerMeanSpec(p=0.5, n=2), Route.CLOSED)
    assert est.value == complex(-0.5, 0.5)


def test_closed_t3_power_mean_value_and_slope():
    # n = 2, gamma + alpha = 2i: E[M](p) = i (1 + (1 - p)/8), an affine
    # function of p with |slope| = 1!/(2^2 |2i|^1) = 1/8
    for p in (-0.5, -0.9, -0.1):
        est = power_mean_expectation(T3, PowerMeanSpec(p=p, n=2, alpha=1j), Route.CLOSED)
        want = 1j * (1.0 + (1.0 - p) / 8.0)
        assert abs(est.value - want) < 1e-14
    ps = np.arange(-0.9, -0.05, 0.1)
    vals = np.array(
        [
            power_mean_expectation(T3, PowerMeanSpec(p=p, n=2, alpha=1j), Route.CLOSED).value
            for p in ps
        ]
    )
    coeffs = np.polyfit(ps, vals, 1)
    residual = np.max(np.abs(np.polyval(coeffs, ps) - vals))
    assert residual <= 1e-10
    assert abs(abs(coeffs[0]) - 0.125) <= 1e-8


def test_two_point_power_mean_enumeration_matches_mc():
    tp = TwoPoint(1j, 2j, 0.3)
    spec = PowerMeanSpec(p=0.5, n=3)
    closed = power_mean_expectation(tp, spec, Route.CLOSED)
    mc = power_mean_expectation(tp, spec, Route.MONTE_CARLO, mc=MCConfig(samples=200_000, seed=8))
    assert abs(closed.value - mc.value) <= 4.0 * mc.uncertainty


@pytest.mark.parametrize("p", [-0.5, 0.5])
def test_frac_deriv_poincare_criterion_cells(p):
    est = power_mean_expectation(POIN, PowerMeanSpec(p=p, n=2), Route.FRAC_DERIV)
    assert abs(est.value - 1j) <= 1e-4


def test_frac_deriv_poincare_non_integer_reciprocal():
    est = power_mean_expectation(POIN, PowerMeanSpec(p=0.6, n=3), Route.FRAC_DERIV)
    assert abs(est.value - 1j) <= 1e-6


def test_frac_deriv_matches_closed_for_cauchy_and_t3():
    est = power_mean_expectation(CAUCHY, PowerMeanSpec(p=-0.5, n=3, alpha=1j), Route.FRAC_DERIV)
    assert abs(est.value - 2j) <= 1e-7
    est = power_mean_expectation(T3, PowerMeanSpec(p=-0.5, n=2, alpha=1j), Route.FRAC_DERIV)
    assert abs(est.value - 1.1875j) <= 1e-7


def test_frac_deriv_geometric_branch():
    est = power_mean_expectation(POIN, PowerMeanSpec(p=0.0, n=2), Route.FRAC_DERIV)
    assert abs(est.value - 1j) <= 1e-6
    assert est.meta.get("geometric") is True


def test_frac_deriv_ordinal_matches_mc():
    # p = 1/2 means a plain second derivative of the transform
    quad = power_mean_expectation(POIN, PowerMeanSpec(p=0.5, n=2), Route.FRAC_DERIV)
    mc = power_mean_expectation(
        POIN, PowerMeanSpec(p=0.5, n=2), Route.MONTE_CARLO, mc=MCConfig(samples=200_000, seed=9)
    )
    assert quad.meta.get("ordinal") is True
    assert abs(quad.value - mc.value) <= 4.0 * mc.uncertainty


def test_frac_deriv_rejects_cauchy_positive():
    with pytest.raises(MomentExistenceError):
        power_mean_expectation(CAUCHY, PowerMeanSpec(p=0.5, n=2, alpha=1j), Route.FRAC_DERIV)


def test_mc_power_mean_sample_size_invariance():
    for model, target in ((CAUCHY, 2j), (POIN, 1j)):
        alpha = 1j if model is CAUCHY else 0j
        for n in (2, 3, 5):
            est = power_mean_expectation(
                model,
                PowerMeanSpec(p=-0.5, n=n, alpha=alpha),
                Route.MONTE_CARLO,
                mc=MCConfig(samples=60_000, seed=10),
            )
            assert abs(est.value - target) <= 4.0 * est.uncertainty


def test_t3_nonconstancy_exceeds_noise():
    lo = power_mean_expectation(T3, PowerMeanSpec(p=-0.9, n=2, alpha=1j), Route.CLOSED)
    hi = power_mean_expectation(T3, PowerMeanSpec(p=-0.1, n=2, alpha=1j), Route.CLOSED)
    gap = abs(lo.value - hi.value)
    assert abs(gap - 0.1) < 1e-14  # |i*0.8/8|
    mcs = [
        power_mean_expectation(
            T3, PowerMeanSpec(p=p, n=2, alpha=1j), Route.MONTE_CARLO, mc=MCConfig(samples=100_000, seed=12)
        )
        for p in (-0.9, -0.1)
    ]
    for est, closed in zip(mcs, (lo, hi)):
        assert abs(est.value - closed.value) <= 4.0 * est.uncertainty
    combined = math.hypot(mcs[0].uncertainty, mcs[1].uncertainty)
    assert gap > 5.0 * combined


def test_auto_route_and_meta_records_choice():
    est = power_mean_expectation(POIN, PowerMeanSpec(p=0.5, n=2), Route.AUTO)
    assert est.method is Route.CLOSED and est.meta["auto"] is True
    est = power_mean_expectation(POIN, PowerMeanSpec(p=0.5, n=2, alpha=1j), Route.AUTO)
    assert est.method is not Route.CLOSED


def test_moment_estimate_json_shape():
    est = frac_moment(CAUCHY, 1j, -0.5)
    blob = est.to_json()
    assert set(blob) == {"value", "uncertainty", "method", "meta"}
    assert abs(blob["value"]["re"] - 0.5) < 1e-14
    assert abs(blob["value"]["im"] + 0.5) < 1e-14
    assert blob["method"] == "closed"


# --- continuity scans ---------------------------------------------------------------


def test_continuity_scan_poincare_constant():
    grid = np.arange(-0.9, 0.95, 0.3)
    table = continuity_scan(POIN, 0.0, 2, grid, Route.MONTE_CARLO, mc=MCConfig(samples=20_000, seed=13))
    assert all(row.estimate is not None for row in table.rows)
    assert table.max_jump <= 4.0 * table.max_jump_uncertainty


def test_continuity_scan_point_mass_idempotent():
    pm = TwoPoint(1j, 1j, 0.5)
    grid = [-0.9, -0.5, 0.0, 0.5, 0.9]
    table = continuity_scan(pm, 0.0, 3, grid, Route.CLOSED)
    for row in table.rows:
        assert abs(row.estimate.value - 1j) < 1e-12
    assert table.max_jump < 1e-12


def test_continuity_scan_records_errors_and_continues():
    grid = [-0.5, 0.5]  # positive p unavailable on the closed Cauchy route
    table = continuity_scan(CAUCHY, 1j, 2, grid, Route.CLOSED)
    assert table.rows[0].estimate is not None
    assert table.rows[1].estimate is None and "Route" in table.rows[1].error


def test_scan_csv_export(tmp_path):
    grid = [-0.5, -0.25]
    table = continuity_scan(CAUCHY, 1j, 2, grid, Route.CLOSED)
    path = tmp_path / "scan.csv"
    table.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "p,re,im,uncertainty,method"
    assert len(lines) == 3
