"""Numerically trained lifting coefficients and PDE extraction.

The lifting ansatz f = f_eq(rho) + sum_T a_T D_T(rho), with one
coefficient vector a_T per spatial derivative D_T, is closed numerically:
a polynomial test density is lifted with a guess for the coefficients,
the lifted state is smoothed by a short constrained run, and fresh
coefficients are read back from a linear system over a handful of probe
nodes.  Coefficients that are invariant under that map describe the slow
manifold; the fixed point is found by Newton's method.

Appending a measured time-derivative column to the probe system makes it
(near) singular, because the density obeys a closed advection-diffusion
PDE.  That is exploited twice: the PDE coefficients are read off either
from the nullspace of the enlarged system or by summing the augmented
coefficient vectors over the velocities.

All finite differences here use the same stencil accuracy as apply_lift:
trained coefficients absorb the truncation terms of the stencils they
were trained with, so training and application must match.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import ceil, factorial, sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constrained_runs import constrained_smooth
from .lattice import LbmParams, equilibrium, lbm_step_count, restrict, stream_collide
from .lifting import (
    LIFT_STENCIL_ACCURACY,
    LiftCoefficients,
    apply_lift,
    expansion_terms,
    zero_coefficients,
)
from .macro_pde import MacroPde
from .stencil import MAX_TOTAL_ORDER, DerivSpec, spatial_derivative, time_derivative_forward

# refuse probe systems whose conditioning would poison the coefficients
CONDITION_LIMIT = 1e12

# singular-value ratio below which the enlarged system counts as singular,
# i.e. as evidence that a closed PDE links the derivative columns
NULLSPACE_TOL = 1e-8


@dataclass(frozen=True)
class NceTrainConfig:
    """Settings for coefficient training.

    spatial_order is the highest derivative kept in the expansion.  The
    test domain is a small 1D interval (or square) with the production
    dx; probe_indices are positions within it, at least m+3 cells from
    its edges (in 2D the positions are used per axis and combined into a
    grid).  jacobian_eps is a base perturbation scaled per coordinate by
    max(1, |a_i|).
    """

    spatial_order: int = 2
    m: int = 1
    test_length: float = 3.0
    test_cells: int = 60
    probe_indices: Optional[Tuple[int, ...]] = None
    newton_tol: float = 1e-12
    max_newton_iter: int = 25
    jacobian_eps: float = 1e-8

    def __post_init__(self):
        if not 1 <= self.spatial_order <= MAX_TOTAL_ORDER:
            raise ValueError(
                f"spatial_order {self.spatial_order} outside 1..{MAX_TOTAL_ORDER}")
        if self.m not in (0, 1, 2, 3):
            raise ValueError(f"smoothness order m={self.m}, expected 0..3")
        if self.test_cells < 4 * (self.m + 3):
            raise ValueError("test domain too small for the edge margins")
        if self.newton_tol <= 0 or self.max_newton_iter < 1:
            raise ValueError("newton_tol must be > 0 and max_newton_iter >= 1")


@dataclass
class LinearLiftSystem:
    """The probe linear system, one identical block per velocity slot.

    block holds the derivative columns at the probe rows (time column
    last when has_time_column); block_rhs holds f - f_eq per velocity.
    matrix/rhs are the expanded block-diagonal form.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    block: np.ndarray
    block_rhs: np.ndarray
    specs: Tuple[DerivSpec, ...]
    condition: float
    has_time_column: bool = False


@dataclass
class TrainResult:
    coefficients: LiftCoefficients
    iterations: int
    lbm_steps: int
    residual: float
    system: LinearLiftSystem


@dataclass
class AugmentResult:
    coefficients: LiftCoefficients
    system: LinearLiftSystem
    sigma_min: float
    sigma_max: float
    lbm_steps: int


# ---------------------------------------------------------------------------
# Test problem: density profiles and probes.
# ---------------------------------------------------------------------------

def buffer_width(cfg: NceTrainConfig) -> int:
    # one cell of information spread per LBM step plus the edge margin
    return cfg.m + 3


def test_density_profiles(cfg: NceTrainConfig, dimension: int) -> List[np.ndarray]:
    """Polynomial test densities on the buffered test grid.

    1D uses rho(x) = sum_{k=1..R} x^k / k!: every derivative up to order
    R is present and the degree-R term keeps the top probe column
    nonzero (a single constant column is harmless).  In 2D any single
    polynomial makes the system singular, since all top-order derivative
    columns are constants over the probes and hence proportional, so R+1
    scaled copies rho_d = sum s_d^j x^j y^k / (j! k!) are stacked; the
    constants then differ per density as s_d^j, a Vandermonde pattern in
    the scales.
    """
    r = cfg.spatial_order
    dx = cfg.test_length / cfg.test_cells
    width = buffer_width(cfg)
    x = (np.arange(cfg.test_cells + 2 * width) - width) * dx
    if dimension == 1:
        rho = np.zeros_like(x)
        for k in range(1, r + 1):
            rho += x ** k / factorial(k)
        return [rho]
    if dimension != 2:
        raise ValueError(f"unsupported dimension {dimension}")
    grid_x = x[:, None]
    grid_y = x[None, :]
    profiles = []
    for d in range(r + 1):
        scale = 1.0 + 0.5 * d
        rho = np.zeros((x.size, x.size))
        for j in range(r + 1):
            for k in range(r + 1 - j):
                if j + k >= 1:
                    rho += (scale ** j / (factorial(j) * factorial(k))) \
                        * grid_x ** j * grid_y ** k
        profiles.append(rho)
    return profiles


def default_probe_positions(cfg: NceTrainConfig, count: int) -> Tuple[int, ...]:
    """Axis positions 10, 20, 30, ... or an evenly spaced fallback."""
    margin = cfg.m + 3
    last_ok = cfg.test_cells - 1 - margin
    positions = tuple(10 * (k + 1) for k in range(count))
    if positions and (positions[-1] > last_ok or positions[0] < margin):
        spread = np.linspace(margin, last_ok, count)
        positions = tuple(int(round(p)) for p in spread)
    return positions


def _resolve_probes(cfg: NceTrainConfig, dimension: int, n_terms: int):
    """Probe index tuple(s) for numpy indexing, validated against margins."""
    margin = cfg.m + 3
    if cfg.probe_indices is not None:
        axis_positions = tuple(int(p) for p in cfg.probe_indices)
    elif dimension == 1:
        axis_positions = default_probe_positions(cfg, n_terms)
    else:
        axis_positions = default_probe_positions(cfg, ceil(sqrt(n_terms)))
    if len(set(axis_positions)) != len(axis_positions):
        raise ValueError(f"duplicate probe positions in {axis_positions}")
    for p in axis_positions:
        if p < margin or p > cfg.test_cells - 1 - margin:
            raise ValueError(
                f"probe {p} is closer than m+3={margin} cells to a test-domain edge")
    if dimension == 1:
        points = [(p,) for p in axis_positions]
    else:
        points = list(product(axis_positions, axis_positions))
    if len(points) < n_terms:
        raise ValueError(
            f"{len(points)} probe points cannot determine {n_terms} coefficient vectors")
    return axis_positions, points


def _probe_index(points, width: int):
    """Buffered-grid fancy index selecting the probe nodes."""
    arrays = tuple(np.array([pt[ax] for pt in points]) + width
                   for ax in range(len(points[0])))
    return arrays if len(arrays) > 1 else arrays[0]


# ---------------------------------------------------------------------------
# Workspace: everything about the probe system that does not depend on
# the coefficients being trained.
# ---------------------------------------------------------------------------

class _Workspace:
    def __init__(self, cfg: NceTrainConfig, params: LbmParams,
                 extra_probes: bool = False):
        test_dx = cfg.test_length / cfg.test_cells
        if abs(test_dx - params.dx) > 1e-12 * params.dx:
            raise ValueError(
                f"test grid spacing {test_dx} differs from model dx {params.dx}")
        dimension = params.vset.dimension
        self.cfg = cfg
        self.params = params
        self.specs = tuple(expansion_terms(dimension, cfg.spatial_order))
        axis_positions, points = _resolve_probes(cfg, dimension, len(self.specs))
        if extra_probes:
            points = _widen_probes(points, cfg)
        self.probe_points = points
        self.probe_ix = _probe_index(points, buffer_width(cfg))
        self.densities = test_density_profiles(cfg, dimension)
        self.derivative_fields = []
        blocks = []
        for rho in self.densities:
            fields = {
                spec: spatial_derivative(rho, spec, params.dx,
                                         accuracy=LIFT_STENCIL_ACCURACY)
                for spec in self.specs
            }
            self.derivative_fields.append(fields)
            blocks.append(np.column_stack(
                [fields[spec][self.probe_ix] for spec in self.specs]))
        self.block = np.vstack(blocks)
        if not np.abs(self.block).max(axis=0).all():
            raise ValueError(
                "a derivative column vanishes at every probe; "
                "the test density cannot determine these coefficients")
        self.condition = float(np.linalg.cond(self.block))
        if self.condition > CONDITION_LIMIT:
            raise ValueError(
                f"probe system condition number {self.condition:.3g} "
                "signals bad probe placement or a degenerate test density")
        self.feq_probes = [
            equilibrium(rho, params)[(slice(None),) + _as_tuple(self.probe_ix)]
            for rho in self.densities
        ]

    def smoothed_rhs(self, coeffs: LiftCoefficients) -> np.ndarray:
        """f - f_eq at the probes after lift and constrained smoothing."""
        rows = []
        for rho, fields, feq_p in zip(self.densities, self.derivative_fields,
                                      self.feq_probes):
            lifted = apply_lift(rho, coeffs, self.params, derivatives=fields)
            smooth = constrained_smooth(lifted, rho, self.cfg.m, self.params)
            probe_vals = smooth[(slice(None),) + _as_tuple(self.probe_ix)]
            rows.append((probe_vals - feq_p).T)
        return np.vstack(rows)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.block.shape[0] == self.block.shape[1]:
            return np.linalg.solve(self.block, rhs)
        return np.linalg.lstsq(self.block, rhs, rcond=None)[0]

    def make_system(self, rhs: np.ndarray, block=None,
                    has_time_column: bool = False) -> LinearLiftSystem:
        block = self.block if block is None else block
        q = self.params.vset.q
        return LinearLiftSystem(
            matrix=np.kron(np.eye(q), block),
            rhs=rhs.T.reshape(-1),
            block=block,
            block_rhs=rhs,
            specs=self.specs,
            condition=float(np.linalg.cond(block)),
            has_time_column=has_time_column,
        )


def _as_tuple(ix):
    return ix if isinstance(ix, tuple) else (ix,)


def _widen_probes(points, cfg: NceTrainConfig):
    """Interleave shifted copies so the probe count exceeds the columns.

    The trained system is square, but a square system enlarged by a time
    column always has a null vector, which would make the singularity
    diagnostic vacuous; rank statements need more rows than columns.
    """
    margin = cfg.m + 3
    hi = cfg.test_cells - 1 - margin
    seen = set(points)
    extra = []
    for pt in points:
        shifted = tuple((p + 3) if p + 3 <= hi else (p - 3) for p in pt)
        if shifted not in seen:
            seen.add(shifted)
            extra.append(shifted)
    return sorted(points + extra)


# ---------------------------------------------------------------------------
# The coefficient map and its fixed point.
# ---------------------------------------------------------------------------

def h_map(coeffs: LiftCoefficients, cfg: NceTrainConfig,
          params: LbmParams) -> LiftCoefficients:
    """One application of the coefficient map.

    Lift the test density with the given coefficients, smooth the result
    with an order-m constrained run, and solve the probe system for the
    coefficients describing the smoothed state.  Coefficients on the
    slow manifold are invariant under this map.
    """
    ws = _Workspace(cfg, params)
    return _h_map_ws(coeffs, ws)


def _h_map_ws(coeffs: LiftCoefficients, ws: _Workspace) -> LiftCoefficients:
    coeff_matrix = ws.solve(ws.smoothed_rhs(coeffs))
    terms = {spec: coeff_matrix[k].copy() for k, spec in enumerate(ws.specs)}
    return LiftCoefficients(fingerprint=ws.params.fingerprint(), terms=terms)


def train_coefficients(cfg: NceTrainConfig, params: LbmParams) -> TrainResult:
    """Newton solve of a = h_map(a) from a = 0.

    Returns the trained coefficients with diagnostics.  The total LBM
    step count depends only on the training configuration, never on the
    production grid or run length; the coefficients are reusable for any
    density on any grid sharing (velocity set, dx, dt, omega, advection).
    """
    ws = _Workspace(cfg, params)
    start_steps = lbm_step_count()
    template = zero_coefficients(params, cfg.spatial_order)
    if tuple(template.sorted_specs()) != ws.specs:
        raise AssertionError("coefficient layout out of sync with workspace")

    def residual(flat: np.ndarray) -> np.ndarray:
        coeffs = template.with_flat(flat)
        return flat - _h_map_ws(coeffs, ws).flatten()

    flat = template.flatten()
    iterations = 0
    converged = False
    for _ in range(cfg.max_newton_iter):
        res = residual(flat)
        jac = np.empty((flat.size, flat.size))
        for col in range(flat.size):
            eps = cfg.jacobian_eps * max(1.0, abs(flat[col]))
            bumped = flat.copy()
            bumped[col] += eps
            jac[:, col] = (residual(bumped) - res) / eps
        try:
            delta = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("singular Newton system while training "
                               f"(iteration {iterations})") from exc
        flat = flat - delta
        iterations += 1
        if float(np.max(np.abs(delta))) < cfg.newton_tol:
            converged = True
            break
    final_residual = float(np.max(np.abs(residual(flat))))
    if not converged:
        raise RuntimeError(
            f"coefficient training did not converge in {iterations} Newton "
            f"iterations (last residual {final_residual:.3e})")
    coeffs = template.with_flat(flat)
    system = ws.make_system(ws.smoothed_rhs(coeffs))
    return TrainResult(
        coefficients=coeffs,
        iterations=iterations,
        lbm_steps=lbm_step_count() - start_steps,
        residual=final_residual,
        system=system,
    )


# ---------------------------------------------------------------------------
# Time-derivative augmentation and PDE extraction.
# ---------------------------------------------------------------------------

def augment_time_derivative(coeffs: LiftCoefficients, cfg: NceTrainConfig,
                            params: LbmParams) -> AugmentResult:
    """Append a measured time-derivative column to the probe system.

    The test density is lifted with the trained coefficients and run two
    free LBM steps; rho_t follows from a forward difference.  Because
    rho obeys a closed PDE, the enlarged system is near singular, which
    is recorded via its extreme singular values.  The returned
    coefficients pin the time vector to the classical first-order value
    gamma = -(dt/omega) * equilibrium weights (the enlarged system alone
    cannot split a time column from the spatial columns it is a linear
    combination of) and re-solve the spatial vectors against the moved
    column, so that summing the vectors over the velocities reproduces
    the PDE.
    """
    ws = _Workspace(cfg, params, extra_probes=True)
    start_steps = lbm_step_count()
    rhs_rows = []
    time_rows = []
    for rho, fields in zip(ws.densities, ws.derivative_fields):
        lifted = apply_lift(rho, coeffs, params, derivatives=fields)
        snapshots = [restrict(lifted)]
        f = lifted
        for _ in range(2):
            f = stream_collide(f, params)
            snapshots.append(restrict(f))
        rho_t = time_derivative_forward(snapshots, params.dt)
        probe_ix = _as_tuple(ws.probe_ix)
        feq_p = equilibrium(rho, params)[(slice(None),) + probe_ix]
        rhs_rows.append((lifted[(slice(None),) + probe_ix] - feq_p).T)
        time_rows.append(rho_t[ws.probe_ix])
    rhs = np.vstack(rhs_rows)
    time_col = np.concatenate(time_rows)

    enlarged = np.hstack([ws.block, time_col[:, None]])
    singular_values = np.linalg.svd(enlarged, compute_uv=False)
    sigma_min = float(singular_values[-1])
    sigma_max = float(singular_values[0])

    gamma = -(params.dt / params.omega) * params.equilibrium_weights()
    coeff_matrix = ws.solve(rhs - np.outer(time_col, gamma))
    terms = {spec: coeff_matrix[k].copy() for k, spec in enumerate(ws.specs)}
    augmented = LiftCoefficients(fingerprint=params.fingerprint(),
                                 terms=terms, time_term=gamma)
    system = ws.make_system(rhs, block=enlarged, has_time_column=True)
    return AugmentResult(
        coefficients=augmented,
        system=system,
        sigma_min=sigma_min,
        sigma_max=sigma_max,
        lbm_steps=lbm_step_count() - start_steps,
    )


def extract_pde(coeffs: LiftCoefficients, mode: str = "summation",
                system: Optional[LinearLiftSystem] = None) -> MacroPde:
    """Read the macroscopic PDE off the augmented coefficients.

    summation: sum each coefficient vector over the velocities; the
    density constraint sum_i f_i = rho forces
    (sum gamma) rho_t = -(sum alpha) rho_x - (sum beta) rho_xx, so
    a_hat = sum(alpha)/sum(gamma) and D_hat = -sum(beta)/sum(gamma).
    nullspace: the PDE is the null relation between the derivative
    columns and the time column of the enlarged probe system.
    """
    dimension = len(next(iter(coeffs.terms)).orders)
    if mode == "summation":
        if coeffs.time_term is None:
            raise ValueError("summation mode needs time coefficients; "
                             "augment the trained coefficients first")
        gamma_sum = float(np.sum(coeffs.time_term))
        scale = float(np.abs(coeffs.time_term).sum())
        if abs(gamma_sum) <= 1e-12 * max(scale, 1e-300):
            raise ValueError("time coefficients sum to zero; "
                             "the summation ratios are undefined")
        advection = []
        for axis in range(dimension):
            first = DerivSpec(_unit(axis, dimension, 1))
            advection.append(float(np.sum(coeffs.terms[first])) / gamma_sum)
        second = DerivSpec(_unit(0, dimension, 2))
        diffusion = -float(np.sum(coeffs.terms[second])) / gamma_sum
        return MacroPde(advection=tuple(advection), diffusion=diffusion)

    if mode != "nullspace":
        raise ValueError(f"unknown extraction mode {mode!r}")
    if system is None or not system.has_time_column:
        raise ValueError("nullspace mode needs the enlarged probe system")
    _, singular_values, v_rows = np.linalg.svd(system.block)
    ratios = singular_values / singular_values[0]
    if ratios[-1] > NULLSPACE_TOL:
        raise ValueError(
            f"enlarged system is not singular (sigma ratio {ratios[-1]:.3e}); "
            "no closed PDE relation found at the probes")
    if len(ratios) > 1 and ratios[-2] <= NULLSPACE_TOL:
        raise ValueError("enlarged system nullspace has dimension > 1; "
                         "the PDE relation is not unique")
    null_vec = v_rows[-1]
    v_time = null_vec[-1]
    if abs(v_time) < 1e-12 * np.abs(null_vec).max():
        raise ValueError("null vector has no time component; "
                         "cannot normalize to a PDE")
    advection = []
    for axis in range(dimension):
        first = DerivSpec(_unit(axis, dimension, 1))
        advection.append(float(null_vec[system.specs.index(first)] / v_time))
    second = DerivSpec(_unit(0, dimension, 2))
    diffusion = -float(null_vec[system.specs.index(second)] / v_time)
    return MacroPde(advection=tuple(advection), diffusion=diffusion)


def _unit(axis: int, dimension: int, order: int) -> Tuple[int, ...]:
    orders = [0] * dimension
    orders[axis] = order
    return tuple(orders)
