"""Shared model setups: the three benchmark parameter sets."""

from fractions import Fraction

import numpy as np
import pytest

from lblift import LbmParams, VELOCITY_SETS, equilibrium, run_lbm

# Relaxation rates that make the macroscopic diffusion coefficient
# exactly 1 for each benchmark model (0.9091 etc. are their roundings).
OMEGA = {
    "D1Q3": float(Fraction(10, 11)),
    "D2Q5": float(Fraction(50, 31)),
    "D2Q9": float(Fraction(125, 64)),
}
DT = {"D1Q3": 1e-3, "D2Q5": 1e-4, "D2Q9": 1e-5}


def benchmark_params(name: str, advection=()) -> LbmParams:
    """L = 10 at n = 200 cells; dt and omega per model."""
    return LbmParams(vset=VELOCITY_SETS[name], dx=0.05, dt=DT[name],
                     omega=OMEGA[name], advection=advection)


def gaussian_density(params: LbmParams, cells: int = 200) -> np.ndarray:
    x = np.arange(cells) * params.dx
    mid = cells * params.dx / 2.0
    bump = np.exp(-((x - mid) ** 2))
    if params.vset.dimension == 1:
        return bump
    return np.outer(bump, bump)


@pytest.fixture(scope="session")
def d1_params():
    return benchmark_params("D1Q3")


@pytest.fixture(scope="session")
def d1_adv_params():
    return benchmark_params("D1Q3", advection=(0.66,))


@pytest.fixture(scope="session")
def d1_reference(d1_params):
    """Settled 1D state: 1000 free steps from an equilibrium start."""
    return run_lbm(equilibrium(gaussian_density(d1_params), d1_params),
                   d1_params, 1000)


@pytest.fixture(scope="session")
def d1_adv_reference(d1_adv_params):
    return run_lbm(equilibrium(gaussian_density(d1_adv_params), d1_adv_params),
                   d1_adv_params, 1000)
