import numpy as np
import pytest
from numpy.testing import assert_allclose

from lblift import (CrConfig, constrained_smooth, cr_lift, cr_map, equilibrium,
                    moments, restrict, run_lbm)
from lblift.constrained_runs import extrapolation_weights

from conftest import benchmark_params, gaussian_density


def test_extrapolation_weights_binomial():
    assert_allclose(extrapolation_weights(0), [1.0])
    assert_allclose(extrapolation_weights(1), [2.0, -1.0])
    assert_allclose(extrapolation_weights(2), [3.0, -3.0, 1.0])
    assert_allclose(extrapolation_weights(3), [4.0, -6.0, 4.0, -1.0])
    for m in range(4):
        assert_allclose(extrapolation_weights(m).sum(), 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        CrConfig(m=4)
    with pytest.raises(ValueError):
        CrConfig(tol=0.0)
    with pytest.raises(ValueError):
        CrConfig(m=2, locality=2)  # window narrower than m+1


def test_constrained_smooth_pins_density():
    p = benchmark_params("D1Q3")
    rho = gaussian_density(p, cells=40)
    f = equilibrium(rho, p)
    for m in range(4):
        g = constrained_smooth(f, rho, m, p)
        assert_allclose(restrict(g), rho, rtol=1e-14, atol=1e-14)


def test_cr_map_shapes():
    p = benchmark_params("D1Q3")
    rho = gaussian_density(p, cells=30)
    v = np.zeros((2, 30))
    out = cr_map(rho, v, CrConfig(m=1), p)
    assert out.shape == (2, 30)


def test_uniform_density_lifts_to_equilibrium():
    p = benchmark_params("D1Q3")
    rho = np.full(24, 0.8)
    res = cr_lift(rho, CrConfig(m=2), p)
    assert res.converged
    assert_allclose(res.f, equilibrium(rho, p), atol=1e-13)


def test_cr_lift_converges_and_improves_with_m():
    p = benchmark_params("D1Q3")
    f_ref = run_lbm(equilibrium(gaussian_density(p), p), p, 1000)
    rho = restrict(f_ref)
    errs = []
    for m in (0, 1, 2):
        res = cr_lift(rho, CrConfig(m=m), p)
        assert res.converged, f"m={m} failed to converge"
        assert res.residual <= CrConfig(m=m).tol * max(
            1.0, float(np.abs(np.stack(
                [moments(res.f).phi, moments(res.f).xi])).max()))
        errs.append(np.linalg.norm(res.f - f_ref))
    assert errs[0] > errs[1] > errs[2]


def test_cr_lift_preserves_density_exactly():
    p = benchmark_params("D1Q3", advection=(0.66,))
    rho = gaussian_density(p, cells=50)
    res = cr_lift(rho, CrConfig(m=1), p)
    assert res.converged
    assert_allclose(restrict(res.f), rho, rtol=1e-13)


def test_localized_jacobian_matches_dense():
    p = benchmark_params("D1Q3")
    rho = gaussian_density(p, cells=60)
    dense = cr_lift(rho, CrConfig(m=1), p)
    local = cr_lift(rho, CrConfig(m=1, locality=3), p)
    assert dense.converged and local.converged
    assert_allclose(local.f, dense.f, atol=1e-10)
    assert local.lbm_steps < dense.lbm_steps


def test_nonconvergence_reported_not_raised():
    p = benchmark_params("D1Q3")
    rho = gaussian_density(p, cells=30)
    res = cr_lift(rho, CrConfig(m=1, tol=1e-30, max_iter=2), p)
    assert not res.converged
    assert res.iterations <= 2
    assert np.isfinite(res.residual)


def test_step_accounting_scales_with_m():
    """Each residual evaluation costs m+1 LBM steps, so lbm_steps must be
    at least (m+1) * iterations."""
    p = benchmark_params("D1Q3")
    rho = gaussian_density(p, cells=40)
    for m in range(4):
        res = cr_lift(rho, CrConfig(m=m, locality=m + 2), p)
        assert res.converged
        assert res.lbm_steps >= (m + 1) * res.iterations
