import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from subordination import (
    AlphaTime,
    BrownianTime,
    EmptyRequestError,
    GridError,
    InsufficientHorizonError,
    InverseStable,
    IteratedBM,
    ParameterError,
    RngStream,
    SamplePath,
    TimeGrid,
    invert_subordinator_path,
    ks_critical_value,
    ks_statistic,
    sample_gaussian,
    sample_inverse_subordinator,
    sample_stable_subordinator,
    sample_subordinated,
    sample_symmetric_stable,
    simulate_path,
)

N = 10**6


# -- streams -----------------------------------------------------------------


def test_stream_determinism():
    a = sample_gaussian(1000, RngStream(42, 0))
    b = sample_gaussian(1000, RngStream(42, 0))
    assert np.array_equal(a, b)


def test_distinct_streams_are_independent():
    a = sample_gaussian(10**5, RngStream(42, 0))
    b = sample_gaussian(10**5, RngStream(42, 1))
    assert not np.array_equal(a, b)
    # correlation of independent normals is O(n^-1/2)
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(10**5)
    c = sample_gaussian(10**5, RngStream(42, 0).child(0))
    assert abs(np.corrcoef(a, c)[0, 1]) < 4 / math.sqrt(10**5)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_stream_rejects_bad_seed(seed):
    with pytest.raises(ParameterError):
        RngStream(seed, 0)


def test_stream_accepts_full_64_bit_range():
    assert sample_gaussian(3, RngStream(2**64 - 1, 2**64 - 1)).shape == (3,)


# -- gaussian ----------------------------------------------------------------


def test_gaussian_moments():
    g = sample_gaussian(N, RngStream(1, 0))
    assert abs(g.mean()) < 4 / math.sqrt(N)
    assert abs(g.var() - 1) < 0.01


def test_gaussian_variance_stable_across_seeds():
    for seed in (3, 4, 5):
        assert abs(sample_gaussian(N, RngStream(seed, 0)).var() - 1) < 0.01


def test_empty_request():
    with pytest.raises(EmptyRequestError):
        sample_gaussian(0, RngStream(1))


# -- symmetric stable --------------------------------------------------------


def test_stable_alpha_two_is_gaussian_variance_2t():
    s = sample_symmetric_stable(2.0, 1.0, N, RngStream(2))
    assert abs(s.var() - 2.0) < 0.04


def test_cauchy_characteristic_function():
    s = sample_symmetric_stable(1.0, 1.0, N, RngStream(3))
    assert abs(np.mean(np.cos(s)) - math.exp(-1)) < 0.01


def test_stable_median_is_zero():
    s = sample_symmetric_stable(1.5, 1.0, N, RngStream(4))
    assert abs(np.median(s)) < 0.01


@pytest.mark.parametrize("alpha", [0.5, 1.2, 1.5, 1.8])
@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0])
def test_stable_characteristic_function(alpha, xi):
    t = 0.7
    s = sample_symmetric_stable(alpha, t, N, RngStream(5, int(alpha * 10)))
    c = np.cos(xi * s)
    sigma = c.std() / math.sqrt(N)
    assert abs(c.mean() - math.exp(-t * xi**alpha)) < 4 * sigma


@pytest.mark.parametrize("alpha", [0.0, -1.0, 2.5, float("nan")])
def test_stable_rejects_alpha(alpha):
    with pytest.raises(ParameterError):
        sample_symmetric_stable(alpha, 1.0, 10, RngStream(1))


# -- subordinator ------------------------------------------------------------


def test_subordinator_laplace_half():
    d = sample_stable_subordinator(0.5, 1.0, N, RngStream(6))
    assert abs(np.mean(np.exp(-d)) - math.exp(-1)) < 0.005
    assert abs(np.mean(np.exp(-4 * d)) - math.exp(-2)) < 0.005


@pytest.mark.parametrize("beta", [0.2, 1 / 3, 0.5, 2 / 3, 0.9])
def test_subordinator_laplace_bands(beta):
    t = 1.5
    d = sample_stable_subordinator(beta, t, N, RngStream(7, int(beta * 100)))
    for s in (0.5, 1.0, 2.0, 4.0):
        e = np.exp(-s * d)
        assert abs(e.mean() - math.exp(-t * s**beta)) < 4 * e.std() / math.sqrt(N)


@pytest.mark.parametrize("beta", [0.0, 1.0, 1.5])
def test_subordinator_rejects_beta(beta):
    with pytest.raises(ParameterError, match=r"\(0, 1\)"):
        sample_stable_subordinator(beta, 1.0, 10, RngStream(1))


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.05, 0.95), t=st.floats(1e-3, 1e3), seed=st.integers(0, 2**64 - 1))
def test_subordinator_positive_and_finite(beta, t, seed):
    d = sample_stable_subordinator(beta, t, 2000, RngStream(seed))
    assert np.all(d > 0)
    assert np.all(np.isfinite(d))


# -- inverse subordinator ----------------------------------------------------


def test_inverse_half_matches_half_normal():
    n = 10**5
    e = sample_inverse_subordinator(0.5, 1.0, n, RngStream(8))
    h = np.abs(math.sqrt(2.0) * sample_gaussian(n, RngStream(9)))
    assert ks_statistic(e, h).distance < ks_critical_value(n, n)


def test_inverse_half_mean():
    e = sample_inverse_subordinator(0.5, 1.0, N, RngStream(10))
    assert abs(e.mean() - 2 / math.sqrt(math.pi)) < 0.01 * 2 / math.sqrt(math.pi)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.05, 0.95), t=st.floats(1e-3, 1e3), seed=st.integers(0, 2**32))
def test_inverse_positive_and_finite(beta, t, seed):
    e = sample_inverse_subordinator(beta, t, 2000, RngStream(seed))
    assert np.all(e > 0)
    assert np.all(np.isfinite(e))


def test_inverse_self_similarity():
    # E_t = t^beta E_1 in law; the exact sampler realises it sample by sample
    a = sample_inverse_subordinator(0.4, 3.0, 100, RngStream(11))
    b = sample_inverse_subordinator(0.4, 1.0, 100, RngStream(11))
    assert np.allclose(a, 3.0**0.4 * b, rtol=1e-12)


# -- grids and paths ---------------------------------------------------------


def test_uniform_grid():
    g = TimeGrid.uniform(2.0, 8)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 2.0
    assert g.n_steps == 8 and g.t_max == 2.0
    assert np.all(np.diff(g.nodes) > 0)


@pytest.mark.parametrize("nodes", [[0.0, 1.0, 1.0], [0.0, 2.0, 1.0], [0.5, 1.0], [0.0]])
def test_grid_rejects_bad_nodes(nodes):
    with pytest.raises(GridError):
        TimeGrid(nodes)


def test_path_length_must_match_grid():
    with pytest.raises(GridError):
        SamplePath(TimeGrid.uniform(1.0, 4), np.zeros(3))


def test_brownian_terminal_variance():
    grid = TimeGrid.uniform(1.0, 1000)
    path = simulate_path("brownian", grid, RngStream(12), n_paths=10**4)
    assert path.values.shape == (10**4, 1001)
    assert abs(path.values[:, -1].var() - 2.0) < 0.06


def test_subordinator_paths_non_decreasing():
    grid = TimeGrid.uniform(3.0, 500)
    path = simulate_path("subordinator", grid, RngStream(13), beta=0.5, n_paths=200)
    assert np.all(path.values[:, 0] == 0.0)
    assert np.all(np.diff(path.values, axis=1) >= 0)


def test_two_sided_brownian_starts_at_zero():
    grid = TimeGrid.uniform(1.0, 100)
    pair = simulate_path("two_sided_brownian", grid, RngStream(14))
    assert pair.plus.values[0] == 0.0 and pair.minus.values[0] == 0.0
    assert not np.array_equal(pair.plus.values, pair.minus.values)


def test_stable_path_increments_have_stable_law():
    grid = TimeGrid.uniform(1.0, 10)
    path = simulate_path("symmetric_stable", grid, RngStream(15), alpha=1.5, n_paths=10**5)
    c = np.cos(path.values[:, -1])
    assert abs(c.mean() - math.exp(-1.0)) < 4 * c.std() / math.sqrt(10**5)


def test_simulate_path_rejects_unknown_kind():
    with pytest.raises(ParameterError):
        simulate_path("levy", TimeGrid.uniform(1.0, 4), RngStream(1))


# -- path inversion ----------------------------------------------------------


def test_invert_identity_path():
    grid = TimeGrid(np.linspace(0.0, 2.0, 21))
    assert invert_subordinator_path(SamplePath(grid, grid.nodes.copy()), 1.0) == pytest.approx(1.0)


def test_invert_interpolates_inside_jump():
    path = SamplePath(TimeGrid([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 3.0]))
    assert invert_subordinator_path(path, 1.0) == pytest.approx(1.2)


def test_invert_needs_horizon():
    path = SamplePath(TimeGrid([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 3.0]))
    with pytest.raises(InsufficientHorizonError):
        invert_subordinator_path(path, 3.0)


def _path_inverse_ks(n_steps, n=10**5, seed=16, batch=5000):
    grid = TimeGrid.uniform(8.0, n_steps)
    root = RngStream(seed)
    e_path, kept = [], 0
    for b in range(n // batch):
        path = simulate_path("subordinator", grid, root.child(b), beta=0.5, n_paths=batch)
        # P[D_8 <= 1] is about 1e-3; those replicates have a too-short horizon
        ok = path.values[:, -1] > 1.0
        kept += int(ok.sum())
        e_path.append(invert_subordinator_path(SamplePath(grid, path.values[ok]), 1.0))
    exact = sample_inverse_subordinator(0.5, 1.0, n, RngStream(seed, 1))
    return ks_statistic(np.concatenate(e_path), exact).distance, kept / n


@pytest.mark.slow
def test_path_inversion_matches_exact_sampler():
    d_fine, kept = _path_inverse_ks(2000)
    assert kept > 0.99
    assert d_fine < 0.01
    d_coarse, _ = _path_inverse_ks(50)
    assert d_coarse > d_fine


# -- subordinated marginals --------------------------------------------------


def test_corollary_marginals_agree():
    n = 10**5
    a = sample_subordinated(BrownianTime(), 1.0, n, RngStream(17, 0))
    b = sample_subordinated(InverseStable(0.5), 1.0, n, RngStream(17, 1))
    assert not ks_statistic(a, b).reject_5pct


def test_nonequivalent_marginals_differ():
    n = 10**5
    a = sample_subordinated(InverseStable(1 / 3), 1.0, n, RngStream(18, 0))
    b = sample_subordinated(AlphaTime(1.5), 1.0, n, RngStream(18, 1))
    assert ks_statistic(a, b).reject_5pct


def test_iterated_bm_near_start():
    # Z_t - z scales like t^(1/4): at t = 1e-6 about 5% of samples still sit beyond 0.1
    d6 = np.abs(sample_subordinated(IteratedBM(z=3.0), 1e-6, 10**4, RngStream(19)) - 3.0)
    d8 = np.abs(sample_subordinated(IteratedBM(z=3.0), 1e-8, 10**4, RngStream(19)) - 3.0)
    assert np.mean(d6 < 0.1) > 0.9
    assert np.all(d8 < 0.1)
    assert np.allclose(d6, d8 * 100.0**0.25, rtol=1e-9)


def test_iterated_bm_matches_brownian_time_law():
    # X(Y_t) with two-sided X and X(|Y_t|) have the same one-dimensional law
    n = 10**5
    a = sample_subordinated(IteratedBM(), 1.0, n, RngStream(20, 0))
    b = sample_subordinated(BrownianTime(), 1.0, n, RngStream(20, 1))
    assert not ks_statistic(a, b).reject_5pct


def test_stable_outer_process():
    # X(|Y_1|) with Cauchy outer X: characteristic function E exp(-|Y_1|) at xi = 1
    n = 10**5
    z = sample_subordinated(BrownianTime(), 1.0, n, RngStream(21), outer=1.0)
    z2 = sample_subordinated(BrownianTime(), 1.0, n, RngStream(21), outer=("symmetric_stable", 1.0))
    assert np.array_equal(z, z2)
    exact = math.e * math.erfc(1.0)
    c = np.cos(z)
    assert abs(c.mean() - exact) < 4 * c.std() / math.sqrt(n)


def test_subordinated_start_point():
    z = sample_subordinated(InverseStable(0.5), 1.0, 1000, RngStream(22), x0=5.0)
    w = sample_subordinated(InverseStable(0.5), 1.0, 1000, RngStream(22))
    assert np.allclose(z - 5.0, w)


@pytest.mark.parametrize("make", [lambda: InverseStable(1.0), lambda: InverseStable(0.0), lambda: AlphaTime(2.5), lambda: AlphaTime(0.0)])
def test_kind_validation(make):
    with pytest.raises(ParameterError):
        make()


def test_unknown_outer_rejected():
    with pytest.raises(ParameterError):
        sample_subordinated(BrownianTime(), 1.0, 10, RngStream(1), outer="poisson")


def test_chi_square_against_half_normal():
    e = sample_inverse_subordinator(0.5, 1.0, 10**5, RngStream(23))
    edges = np.linspace(0.0, 5.0, 26)
    counts, _ = np.histogram(e, np.append(edges, np.inf))
    cdf = np.append(stats.halfnorm.cdf(edges, scale=math.sqrt(2.0)), 1.0)
    expected = np.diff(cdf) * e.size
    chi2 = np.sum((counts - expected) ** 2 / expected)
    assert chi2 < stats.chi2.ppf(0.999, counts.size - 1)
