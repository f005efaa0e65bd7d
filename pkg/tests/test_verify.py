import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from subordination import (
    DegenerateSampleError,
    DomainError,
    Eigenfunction,
    EmpiricalDistribution,
    ParameterError,
    RngStream,
    caputo_derivative,
    caputo_refinement,
    chi_square_gof,
    integrate_density,
    ks_critical_value,
    ks_statistic,
    laplace_transform_of_density,
    mittag_leffler,
    residual_alpha_time_pde,
    residual_fractional,
    residual_ibm_pde,
    residual_n_order,
    sample_symmetric_stable,
    stable_kernel_pde_residual,
    stable_subordinator_density,
    tail_drift,
    tail_exponent,
)
from subordination.verify import _l1_weights, _n_order_coefficients

E_ERFC1 = math.e * math.erfc(1.0)
EIG = Eigenfunction(lam=-1.0)


# -- Caputo ----------------------------------------------------------------------


def test_caputo_of_identity():
    assert abs(caputo_derivative(lambda t: t, 0.5, 1.0, n_nodes=4096) - 2 / math.sqrt(math.pi)) < 1e-3


@pytest.mark.parametrize("c", [0.0, 1.0, -3.5])
def test_caputo_of_constant_is_zero(c):
    assert caputo_derivative(lambda t: np.full_like(t, c), 0.3, 2.0) == 0.0


def test_caputo_eigenrelation():
    u = lambda t: np.array([mittag_leffler(0.5, -math.sqrt(s)) for s in t])
    assert abs(caputo_derivative(u, 0.5, 1.0, n_nodes=1024) + E_ERFC1) < 1e-3


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("p", [1, 2])
def test_caputo_power_rule_order(beta, p):
    exact = math.gamma(p + 1) / math.gamma(p + 1 - beta)
    _, errors, orders = caputo_refinement(lambda t: t**p, beta, 1.0, exact)
    # p = 1 is reproduced to roundoff, so only the p = 2 orders are meaningful
    if p == 2:
        assert np.all(np.diff(errors) < 0)
        assert np.min(orders) >= 0.9 * (2 - beta)
        if beta == 0.5:
            assert np.min(orders) >= 1.4
    else:
        assert errors[-1] < 1e-10


@settings(max_examples=20, deadline=None)
@given(beta=st.floats(0.01, 0.99), n=st.integers(1, 5000))
def test_l1_weights_positive_and_telescoping(beta, n):
    w = _l1_weights(n, beta)
    assert np.all(w > 0)
    assert np.all(np.diff(w) <= 1e-15)
    assert w.sum() == pytest.approx(n ** (1 - beta), rel=1e-10)


def test_caputo_validation():
    with pytest.raises(ParameterError):
        caputo_derivative(lambda t: t, 1.0, 1.0)
    with pytest.raises(DomainError):
        caputo_derivative(lambda t: t, 0.5, 0.0)
    with pytest.raises(DomainError):
        caputo_derivative(np.zeros(10), 0.5, 1.0)
    grid = np.linspace(0.0, 0.9, 100)
    with pytest.raises(DomainError, match="does not cover"):
        caputo_derivative(grid, 0.5, 1.0, times=grid)
    uneven = np.linspace(0.0, 1.0, 100) ** 2
    with pytest.raises(DomainError, match="uniform"):
        caputo_derivative(uneven, 0.5, 1.0, times=uneven)


# -- fractional residual -------------------------------------------------------------------


def test_fractional_residual_eigenfunction():
    assert residual_fractional(EIG, 0.5, 1.0, 0.0).max_rel_residual < 1e-3


def test_fractional_residual_one_third_lattice():
    r = residual_fractional(EIG, 1 / 3, [0.5, 1.0, 2.0], 0.0)
    assert r.max_rel_residual < 1e-3
    assert len(r.eval_points) == 3


def test_fractional_residual_rejects_exponential():
    wrong = lambda spec, t, x: spec.initial(x) * np.exp(spec.lam * np.asarray(t))
    assert residual_fractional(EIG, 0.5, 1.0, 0.0, solution=wrong).max_rel_residual > 0.05


# -- Brownian-time PDE ----------------------------------------------------------------------


def test_ibm_residual_at_one():
    assert residual_ibm_pde(EIG, 1.0, 0.0).max_rel_residual < 1e-5


@pytest.mark.parametrize("t", [0.1, 10.0])
def test_ibm_residual_lattice(t):
    assert residual_ibm_pde(EIG, t, 0.0).max_rel_residual < 1e-4


def test_ibm_residual_with_fractional_solution():
    r = residual_ibm_pde(EIG, [0.1, 1.0, 10.0], 0.0, solution="fractional")
    assert r.max_rel_residual < 1e-4


def test_ibm_residual_rejects_plain_heat():
    wrong = lambda spec, t, x: spec.apply(np.asarray(t), x)
    assert residual_ibm_pde(EIG, 1.0, 0.0, solution=wrong).max_rel_residual > 0.05


def test_ibm_step_must_fit():
    with pytest.raises(ParameterError):
        residual_ibm_pde(EIG, 1e-5, 0.0)


def test_residual_report_invariants():
    r = residual_ibm_pde(EIG, [0.5, 2.0], 0.3)
    assert r.scale > 0
    assert r.max_rel_residual == pytest.approx(np.max(np.abs(r.residuals)) / r.scale)
    assert r.passed(1e-4)


# -- n-th order PDE ------------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_n_two_coefficient_is_ibm_forcing(t):
    assert _n_order_coefficients(2, t, "corrected")[0] == pytest.approx(1 / math.sqrt(math.pi * t))


def test_n_two_reduces_to_ibm():
    a = residual_n_order(EIG, 2, 1.0)
    b = residual_ibm_pde(EIG, 1.0, 0.0, solution="fractional")
    assert a.residuals[0] == pytest.approx(b.residuals[0], abs=1e-12)


def test_n_three_corrected_exponent():
    r = residual_n_order(EIG, 3, 1.0)
    assert r.max_rel_residual < 1e-4


def test_n_three_printed_exponent_fails_off_t_equal_one():
    r = residual_n_order(EIG, 3, exponent="printed")
    assert r.max_rel_residual > 0.1
    assert r.details["corrected_max_rel_residual"] < 1e-4


def test_n_order_mittag_leffler_derivative_identity():
    # d/dt E_b(lam t^b) by the series, against the right-hand side of the n-th order PDE
    beta, lam, t = 1 / 3, -1.0, 0.7
    k = np.arange(1, 200)
    deriv = np.sum(lam**k * k * beta * t ** (k * beta - 1) / np.array([math.gamma(kk * beta + 1) for kk in k]))
    rhs = sum(t ** (j * beta - 1) * lam**j / math.gamma(j * beta) for j in (1, 2)) + lam**3 * mittag_leffler(beta, lam * t**beta)
    assert deriv == pytest.approx(rhs, rel=1e-12)


def test_n_order_validation():
    with pytest.raises(ParameterError):
        residual_n_order(EIG, 5, 1.0)
    with pytest.raises(ParameterError):
        residual_n_order(EIG, 3, 1.0, exponent="other")


# -- alpha-time PDE -------------------------------------------------------------------------


def test_alpha_one_residual():
    assert residual_alpha_time_pde(EIG, 1.0, 1.0, 0.0).max_rel_residual < 1e-4


def test_alpha_one_constant_data():
    # every term vanishes; what is left is finite-difference roundoff on u = 1
    r = residual_alpha_time_pde(Eigenfunction(lam=0.0), 1.0, 1.0, 0.0)
    assert np.max(np.abs(r.residuals)) < 1e-9


def test_alpha_half_residual():
    r = residual_alpha_time_pde(EIG, 0.5, 1.0, 0.0)
    assert r.max_rel_residual < 1e-3
    assert r.details["fd_error"] < 1e-3 * r.scale


def test_alpha_time_rejects_brownian_time_solution():
    for alpha in (1.0, 0.5):
        r = residual_alpha_time_pde(EIG, alpha, 1.0, 0.0, solution="brownian_time")
        assert r.max_rel_residual > 0.05


def test_alpha_time_validation():
    with pytest.raises(ParameterError):
        residual_alpha_time_pde(EIG, 1.5, 1.0, 0.0)


# -- stable kernel PDE -------------------------------------------------------------------------


def test_kernel_pde_alpha_one():
    r = stable_kernel_pde_residual(1, 1, 1.0, 0.5)
    assert r.max_rel_residual < 1e-8
    assert r.details["analytic_gap"] < 1e-10


def test_kernel_pde_alpha_half():
    assert stable_kernel_pde_residual(1, 2, 1.0, 0.0).max_rel_residual < 1e-6


@pytest.mark.parametrize("lm", [(1, 1), (1, 2)])
@pytest.mark.parametrize("s", [0.3, 1.7])
def test_kernel_pde_symmetric_in_s(lm, s):
    a = stable_kernel_pde_residual(*lm, 1.0, s)
    b = stable_kernel_pde_residual(*lm, 1.0, -s)
    assert a.residuals[0] == b.residuals[0]


def test_kernel_pde_rejects_wrong_kernel():
    assert stable_kernel_pde_residual(1, 1, 1.0, 0.5, kernel_alpha=2.0).max_rel_residual > 0.05


def test_kernel_pde_validation():
    with pytest.raises(ParameterError):
        stable_kernel_pde_residual(2, 1, 1.0, 0.0)
    with pytest.raises(DomainError):
        stable_kernel_pde_residual(1, 1, 0.0, 0.0)


# -- KS ---------------------------------------------------------------------------------------


def test_ks_identical_samples():
    a = np.random.default_rng(0).standard_normal(500)
    r = ks_statistic(a, a)
    assert r.distance == 0.0 and not r.reject_5pct


def test_ks_matches_scipy():
    rng = np.random.default_rng(1)
    a, b = rng.standard_normal(2000), rng.standard_normal(1500) + 0.1
    assert ks_statistic(a, b).distance == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)


def test_ks_critical_value():
    assert ks_critical_value(10**5, 10**5) == pytest.approx(1.358 * math.sqrt(2e-5))


def test_ks_detects_shift():
    rng = np.random.default_rng(2)
    assert ks_statistic(rng.standard_normal(10**4), rng.standard_normal(10**4) + 0.2).reject_5pct


def test_ks_validation():
    with pytest.raises(ParameterError):
        ks_statistic(np.arange(50.0), np.arange(500.0))
    with pytest.raises(DegenerateSampleError):
        ks_statistic(np.ones(200), np.arange(200.0))


def test_empirical_distribution():
    d = EmpiricalDistribution(np.array([3.0, 1.0, 2.0]))
    assert list(d.samples) == [1.0, 2.0, 3.0] and d.n == 3
    assert d.ecdf(2.0) == pytest.approx(2 / 3)
    with pytest.raises(ParameterError):
        EmpiricalDistribution(np.array([1.0]))
    with pytest.raises(ParameterError):
        EmpiricalDistribution(np.array([1.0, np.inf]))


# -- Hill ---------------------------------------------------------------------------------------


def test_hill_pareto_two():
    x = np.random.default_rng(3).pareto(2.0, 10**5) + 1.0
    fit = tail_exponent(x, 1000)
    assert abs(fit.estimated_index - 2.0) < 0.1
    assert fit.ci_low < fit.estimated_index < fit.ci_high


def test_hill_stable():
    x = sample_symmetric_stable(1.5, 1.0, 10**6, RngStream(5))
    assert abs(tail_exponent(x, 5000).estimated_index - 1.5) < 0.15


def test_hill_half_normal_has_no_power_law():
    x = np.abs(np.random.default_rng(4).standard_normal(10**6))
    d = tail_drift(x, 1000, 10000)
    assert d["drift"] > 0
    assert not d["consistent_power_law"]
    assert d["small_k"].ci_width > d["large_k"].ci_width


def test_hill_validation():
    x = np.random.default_rng(0).pareto(2.0, 1000) + 1.0
    with pytest.raises(ParameterError):
        tail_exponent(x, 10)
    with pytest.raises(ParameterError):
        tail_exponent(x, 200)
    with pytest.raises(DomainError):
        tail_exponent(-np.abs(np.random.default_rng(0).standard_normal(1000)) + 0.01, 60)


# -- density quadrature ---------------------------------------------------------------------------


def test_integrate_density_gamma():
    assert integrate_density(stats.gamma(3.0).pdf) == pytest.approx(1.0, abs=1e-10)


def test_laplace_transform_of_levy():
    pdf = lambda u: stable_subordinator_density(0.5, u)
    assert laplace_transform_of_density(pdf, 1.0) == pytest.approx(math.exp(-1.0), abs=1e-9)


def test_chi_square_accepts_true_law_rejects_wrong():
    rng = np.random.default_rng(6)
    x = rng.exponential(size=5000)
    edges = np.linspace(0.0, 4.0, 21)
    assert chi_square_gof(x, stats.expon.pdf, edges)[1] > 0.001
    assert chi_square_gof(x, stats.expon(scale=1.2).pdf, edges)[1] < 1e-6
