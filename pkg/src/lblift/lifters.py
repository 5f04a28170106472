"""Interchangeable lifting operators behind one small interface.

Every lifter maps a density field to a distribution field for a given
model, via .lift(rho, params).  The hybrid solver and the benchmark
harness only ever talk to this interface, so equilibrium, closed-form
coefficients, trained coefficients, and constrained-runs lifting are
drop-in replacements for one another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constrained_runs import CrConfig, cr_lift
from .lattice import LbmParams, equilibrium
from .lifting import LiftCoefficients, apply_lift


class EquilibriumLifter:
    """f = f_eq(rho): the crudest lift, and the baseline everywhere."""

    name = "equilibrium"

    def lift(self, rho: np.ndarray, params: LbmParams) -> np.ndarray:
        return equilibrium(rho, params)


@dataclass
class CoefficientLifter:
    """Derivative-correction lift with fixed coefficient vectors.

    Works for closed-form and trained coefficient sets alike; the
    fingerprint check inside apply_lift refuses mismatched models.
    """

    coefficients: LiftCoefficients
    name: str = "coefficients"

    def lift(self, rho: np.ndarray, params: LbmParams) -> np.ndarray:
        return apply_lift(rho, self.coefficients, params)


@dataclass
class CrLifter:
    """Constrained-runs lift: solves for the missing moments on the fly.

    Unlike the coefficient routes this pays LBM steps at every
    application, which is what the cost accounting is designed to show.
    """

    config: CrConfig
    name: str = "constrained-runs"

    def lift(self, rho: np.ndarray, params: LbmParams) -> np.ndarray:
        result = cr_lift(rho, self.config, params)
        if not result.converged:
            raise RuntimeError(
                f"constrained-runs lift stalled at residual {result.residual:.3e} "
                f"after {result.iterations} iterations")
        return result.f
