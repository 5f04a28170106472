"""Constrained-runs lifting.

Slaves the non-conserved moments of a distribution field to a given
density by repeatedly stepping the LBM while pinning the density, then
extrapolating the evolved state backward in time.  The m-th order scheme
damps the (m+1)-th time difference of the fast moments, so m = 0 keeps
them constant, m = 1 linear, and so on.

The fixed point of that map is found by Picard iteration (m = 0) or by
Newton's method on the residual r(v) = v - cr_map(v).  Both solvers work
on full periodic density fields; the D1Q3 moment-space interface matches
the (rho, phi, xi) transform of the lattice module.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .lattice import (
    LbmParams,
    Moments,
    equilibrium,
    from_moments,
    moments,
    reset_density,
    stream_collide,
)


@dataclass(frozen=True)
class CrConfig:
    """Settings for the constrained-runs fixed point solve.

    jacobian_eps is a base perturbation, scaled at use by max(1, |v|_inf).
    locality, when set, is the half-width of the response window used to
    assemble the Newton Jacobian from batched perturbations; None builds
    the full dense Jacobian one column at a time.
    """

    m: int = 1
    tol: float = 1e-13
    max_iter: int = 100
    jacobian_eps: float = 1e-7
    locality: Optional[int] = None

    def __post_init__(self):
        if self.m not in (0, 1, 2, 3):
            raise ValueError(f"extrapolation order m={self.m}, expected 0..3")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.locality is not None and self.locality < self.m + 1:
            raise ValueError("locality window narrower than m+1 cells")


@dataclass
class CrResult:
    """Lifted field plus solver diagnostics."""

    f: np.ndarray
    iterations: int
    lbm_steps: int
    residual: float
    converged: bool


def extrapolation_weights(m: int) -> np.ndarray:
    """Backward extrapolation weights over states at t = dt, ..., (m+1) dt.

    Enforcing a vanishing (m+1)-th forward difference at t = 0 gives
    v(0) = sum_j (-1)^(j+1) C(m+1, j) v(j dt).  The weights sum to 1.
    """
    return np.array(
        [(-1) ** (j + 1) * comb(m + 1, j) for j in range(1, m + 2)],
        dtype=float,
    )


def constrained_smooth(f: np.ndarray, rho0: np.ndarray, m: int,
                       params: LbmParams) -> np.ndarray:
    """m+1 free LBM steps, backward extrapolation, density pinned to rho0.

    The snapshots of the run are combined with the binomial weights of
    extrapolation_weights, which zeroes the (m+1)-th forward time
    difference at t = 0; since the weights sum to 1 this is an affine
    combination.  The density of the extrapolated field is then reset to
    rho0 (the reset only touches the rest direction, so the extrapolated
    fast moments are kept exactly).  Resetting the density after every
    step instead would hand every m the m = 0 fixed point: a state that
    is invariant under one constrained step is invariant under any
    binomial combination of them, and the m >= 1 benchmark errors never
    drop.  Works for any velocity set on a periodic grid.
    """
    weights = extrapolation_weights(m)
    out = np.zeros_like(np.asarray(f, dtype=float))
    for w in weights:
        f = stream_collide(f, params)
        out += w * f
    return reset_density(out, rho0)


def cr_map(rho0: np.ndarray, v: np.ndarray, config: CrConfig,
           params: LbmParams) -> np.ndarray:
    """One application of the constrained-runs map on D1Q3 moments.

    v stacks the fast moments (phi, xi) as shape (2, n).  The map builds
    f from (rho0, v), applies constrained_smooth and returns the fast
    moments of the smoothed field.
    """
    if params.vset.q != 3:
        raise ValueError("constrained-runs moments are defined for D1Q3")
    rho0 = np.asarray(rho0, dtype=float)
    v = np.asarray(v, dtype=float)
    f = from_moments(Moments(rho=rho0, phi=v[0], xi=v[1]))
    g = constrained_smooth(f, rho0, config.m, params)
    mg = moments(g)
    return np.stack([mg.phi, mg.xi])


def cr_lift(rho0: np.ndarray, config: CrConfig,
            params: LbmParams) -> CrResult:
    """Lift a periodic density field to distribution functions.

    Solves v = cr_map(v) starting from the equilibrium moments: Picard
    iteration for m = 0, Newton with a forward-difference Jacobian for
    m >= 1.  On non-convergence the best iterate seen is returned with
    converged=False rather than raising, so callers can inspect it.
    """
    rho0 = np.asarray(rho0, dtype=float)
    m0 = moments(equilibrium(rho0, params))
    v = np.stack([m0.phi, m0.xi])
    steps_per_map = config.m + 1
    steps = 0

    if config.m == 0:
        prev = v
        residual = np.inf
        for it in range(1, config.max_iter + 1):
            v = cr_map(rho0, prev, config, params)
            steps += steps_per_map
            residual = float(np.max(np.abs(v - prev)))
            prev = v
            if residual <= config.tol:
                return CrResult(_assemble(rho0, v), it, steps, residual, True)
        return CrResult(_assemble(rho0, v), config.max_iter, steps,
                        residual, False)

    shape = v.shape
    u = v.ravel()
    best_u, best_res = u, np.inf
    iterations = 0
    for _ in range(config.max_iter):
        r = u - cr_map(rho0, u.reshape(shape), config, params).ravel()
        steps += steps_per_map
        res = float(np.max(np.abs(r)))
        if res < best_res:
            best_u, best_res = u, res
        if res <= config.tol:
            return CrResult(_assemble(rho0, u.reshape(shape)), iterations,
                            steps, res, True)
        jac, jac_steps = _jacobian(rho0, u, r, shape, config, params)
        steps += jac_steps
        u = u - np.linalg.solve(jac, r)
        iterations += 1
    return CrResult(_assemble(rho0, best_u.reshape(shape)), iterations,
                    steps, best_res, False)


def _assemble(rho0: np.ndarray, v: np.ndarray) -> np.ndarray:
    return from_moments(Moments(rho=rho0, phi=v[0], xi=v[1]))


def _jacobian(rho0, u, r, shape, config, params):
    """Forward-difference Jacobian of r(u) = u - cr_map(u).

    Dense by default.  With config.locality = W set, a perturbation at
    one node only moves the residual within W cells of it (information
    travels one cell per LBM step), so nodes further than 2W apart can
    be perturbed in the same map evaluation; the columns are then peeled
    apart from the shared response.  That cuts the evaluation count from
    2n to about 2(2W+1).
    """
    eps = config.jacobian_eps * max(1.0, float(np.max(np.abs(u))))
    size = u.size

    def residual_at(du):
        return du - cr_map(rho0, du.reshape(shape), config, params).ravel()

    steps_per_map = config.m + 1
    steps = 0
    if config.locality is None:
        jac = np.empty((size, size))
        for col in range(size):
            du = u.copy()
            du[col] += eps
            jac[:, col] = (residual_at(du) - r) / eps
            steps += steps_per_map
        return jac, steps

    width = config.locality
    n = rho0.size
    stride = 2 * width + 1
    jac = np.zeros((size, size))
    window = np.arange(-width, width + 1)
    for field in range(2):
        for color in range(min(stride, n)):
            cols = list(range(color, n, stride))
            singles = []
            # the wrap pair of a colour class may sit closer than the
            # stride; peel those columns off into solo evaluations
            while len(cols) > 1 and (n - cols[-1] + cols[0]) <= 2 * width:
                singles.append(cols.pop())
            for group in [cols] + [[s] for s in singles]:
                if not group:
                    continue
                du = u.copy()
                for j in group:
                    du[field * n + j] += eps
                dr = (residual_at(du) - r) / eps
                steps += steps_per_map
                for j in group:
                    rows = (j + window) % n
                    rows = np.concatenate([rows, rows + n])
                    jac[rows, field * n + j] = dr[rows]
    return jac, steps
