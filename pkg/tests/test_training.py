import numpy as np
import pytest
from numpy.testing import assert_allclose

from lblift import (DerivSpec, NceTrainConfig, analytic_coefficients,
                    apply_lift, augment_time_derivative, extract_pde, restrict,
                    train_coefficients)
from lblift.training import buffer_width, default_probe_positions
from lblift.training import test_density_profiles as density_profiles

from conftest import benchmark_params, gaussian_density


def test_config_validation():
    with pytest.raises(ValueError):
        NceTrainConfig(spatial_order=0)
    with pytest.raises(ValueError):
        NceTrainConfig(spatial_order=7)
    with pytest.raises(ValueError):
        NceTrainConfig(m=5)
    with pytest.raises(ValueError):
        NceTrainConfig(test_cells=10)  # smaller than the edge margins allow


def test_test_density_profiles():
    cfg = NceTrainConfig(spatial_order=3, test_cells=60)
    profiles = density_profiles(cfg, 1)
    assert len(profiles) == 1
    width = buffer_width(cfg)
    n = 60 + 2 * width
    x = (np.arange(n) - width) * (cfg.test_length / cfg.test_cells)
    expected = x + x ** 2 / 2 + x ** 3 / 6
    assert_allclose(profiles[0], expected, rtol=1e-13, atol=1e-15)
    # 2D: one density per scale, stacked to keep the system nonsingular
    profiles2 = density_profiles(cfg, 2)
    assert len(profiles2) == cfg.spatial_order + 1
    assert all(p.shape == (n, n) for p in profiles2)


def test_default_probes_fit_margins():
    cfg = NceTrainConfig(spatial_order=2, m=1, test_cells=60)
    probes = default_probe_positions(cfg, 4)
    assert probes == (10, 20, 30, 40)
    # too small for the 10,20,... ladder: falls back to spread positions
    tight = NceTrainConfig(spatial_order=2, m=1, test_cells=24)
    fallback = default_probe_positions(tight, 4)
    margin = tight.m + 3
    assert len(fallback) == 4
    assert all(margin <= p <= 24 - 1 - margin for p in fallback)
    assert len(set(fallback)) == 4


def test_recovers_analytic_coefficients():
    p = benchmark_params("D1Q3")
    result = train_coefficients(NceTrainConfig(spatial_order=2, m=1), p)
    exact = analytic_coefficients(p, 2)
    for spec in exact.terms:
        assert_allclose(result.coefficients.terms[spec], exact.terms[spec],
                        atol=1e-12)
    assert result.iterations <= 10
    assert result.residual < 1e-11


def test_trained_lift_conserves_mass():
    p = benchmark_params("D1Q3", advection=(0.66,))
    result = train_coefficients(NceTrainConfig(spatial_order=2, m=1), p)
    rho = gaussian_density(p)
    lifted = apply_lift(rho, result.coefficients, p)
    assert_allclose(restrict(lifted), rho, rtol=1e-12)
    # the trained columns themselves carry no mass
    for col in result.coefficients.terms.values():
        assert abs(col.sum()) < 1e-12


def test_training_on_probe_fallback_grid():
    p = benchmark_params("D1Q3")
    cfg = NceTrainConfig(spatial_order=2, m=1, test_cells=24, test_length=1.2)
    result = train_coefficients(cfg, p)
    exact = analytic_coefficients(p, 2)
    for spec in exact.terms:
        assert_allclose(result.coefficients.terms[spec], exact.terms[spec],
                        atol=1e-10)


def test_explicit_probes_validated():
    p = benchmark_params("D1Q3")
    with pytest.raises(ValueError):
        train_coefficients(
            NceTrainConfig(spatial_order=2, m=1, probe_indices=(1, 20)), p)
    with pytest.raises(ValueError):
        train_coefficients(
            NceTrainConfig(spatial_order=2, m=1, probe_indices=(20, 20)), p)
    with pytest.raises(ValueError):  # fewer probes than unknowns
        train_coefficients(
            NceTrainConfig(spatial_order=2, m=1, probe_indices=(20,)), p)


def test_test_grid_spacing_must_match_production():
    p = benchmark_params("D1Q3")  # dx = 0.05
    cfg = NceTrainConfig(spatial_order=2, m=1, test_length=3.0, test_cells=30)
    with pytest.raises(ValueError):
        train_coefficients(cfg, p)  # test dx would be 0.1


def test_augment_pins_time_column():
    p = benchmark_params("D1Q3")
    cfg = NceTrainConfig(spatial_order=2, m=1)
    trained = train_coefficients(cfg, p)
    aug = augment_time_derivative(trained.coefficients, cfg, p)
    gamma = aug.coefficients.time_term
    assert_allclose(gamma, -p.dt / p.omega * p.equilibrium_weights(), atol=0)
    assert_allclose(gamma.sum(), -p.dt / p.omega, rtol=1e-15)
    assert aug.sigma_min > 0 and np.isfinite(aug.sigma_max)
    # the refit absorbs rho_t = D rho_xx into the d2 column: its shift
    # from the unaugmented fit is D (dt/omega) w_i, the d1 column is
    # untouched (no advection, no odd time signal)
    shift = (aug.coefficients.terms[DerivSpec((2,))]
             - trained.coefficients.terms[DerivSpec((2,))])
    assert_allclose(shift, 1.0 * p.dt / p.omega * p.equilibrium_weights(),
                    rtol=1e-4)
    assert_allclose(aug.coefficients.terms[DerivSpec((1,))],
                    trained.coefficients.terms[DerivSpec((1,))], atol=1e-10)


def test_extract_pde_modes_agree():
    p = benchmark_params("D1Q3")
    cfg = NceTrainConfig(spatial_order=2, m=1)
    aug = augment_time_derivative(train_coefficients(cfg, p).coefficients,
                                  cfg, p)
    summed = extract_pde(aug.coefficients, mode="summation")
    nulled = extract_pde(aug.coefficients, mode="nullspace",
                         system=aug.system)
    assert_allclose(summed.diffusion, 1.0, atol=1e-6)
    assert_allclose(summed.diffusion, nulled.diffusion, atol=1e-8)
    assert_allclose(summed.advection, (0.0,), atol=1e-8)


def test_extract_requires_time_term():
    p = benchmark_params("D1Q3")
    trained = train_coefficients(NceTrainConfig(spatial_order=2, m=1), p)
    with pytest.raises(ValueError):
        extract_pde(trained.coefficients)


def test_two_d_training_matches_one_d_structure():
    """D2Q5 axis coefficients: the pure x-derivative columns mirror the
    1D pattern on the moving directions, and training reproduces its own
    fixed point (residual certificate)."""
    p = benchmark_params("D2Q5")
    cfg = NceTrainConfig(spatial_order=2, m=1, test_cells=60)
    result = train_coefficients(cfg, p)
    assert result.residual < 1e-10
    co = result.coefficients.terms
    # symmetry between the two axes: d/dx column on (+1,0)/(-1,0) equals
    # d/dy column on (0,+1)/(0,-1)
    dx_col = co[DerivSpec((1, 0))]
    dy_col = co[DerivSpec((0, 1))]
    assert_allclose(dx_col[1], dy_col[2], atol=1e-12)
    assert_allclose(dx_col[3], dy_col[4], atol=1e-12)
    assert_allclose(dx_col[0], dy_col[0], atol=1e-12)
