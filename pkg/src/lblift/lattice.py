"""Core lattice Boltzmann (BGK) machinery.

Velocity sets, equilibria, the stream-collide update and the moment maps
used by the lifting operators.  Distribution fields are plain numpy arrays
with the velocity index leading: shape (q, n) in 1D and (q, nx, ny) in 2D.
Density fields drop the leading axis.

The D1Q3 moment transform follows the (f_1, f_0, f_-1) ordering with
dimensionless lattice velocities c_i in {+1, 0, -1}:

    rho = f_1 + f_0 + f_-1        (density)
    phi = f_1 - f_-1              (first moment)
    xi  = (f_1 + f_-1) / 2        (half second moment)

Physical velocities are v_i = c_i * dx / dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class VelocitySet:
    """A discrete velocity set with quadrature weights.

    sound_speed_sq_factor is c_s^2 in units of (dx/dt)^2.
    """

    name: str
    dimension: int
    directions: Tuple[Tuple[int, ...], ...]
    weights: Tuple[float, ...]
    sound_speed_sq_factor: float

    def __post_init__(self):
        if len(self.directions) != len(self.weights):
            raise ValueError("one weight per direction required")
        if len(set(self.directions)) != len(self.directions):
            raise ValueError(f"duplicate directions in {self.name}")
        if abs(sum(self.weights) - 1.0) > 1e-14:
            raise ValueError(f"weights of {self.name} must sum to 1")
        for c in self.directions:
            if len(c) != self.dimension:
                raise ValueError("direction arity must match dimension")

    @property
    def q(self) -> int:
        return len(self.directions)

    def direction_array(self) -> np.ndarray:
        """Directions as an integer array of shape (q, dimension)."""
        return np.array(self.directions, dtype=int)

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)


D1Q3 = VelocitySet(
    name="D1Q3",
    dimension=1,
    directions=((1,), (0,), (-1,)),
    weights=(1 / 3, 1 / 3, 1 / 3),
    sound_speed_sq_factor=2 / 3,
)

# Rest direction first, then the four axis neighbours.
D2Q5 = VelocitySet(
    name="D2Q5",
    dimension=2,
    directions=((0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)),
    weights=(1 / 3, 1 / 6, 1 / 6, 1 / 6, 1 / 6),
    sound_speed_sq_factor=1 / 3,
)

D2Q9 = VelocitySet(
    name="D2Q9",
    dimension=2,
    directions=(
        (0, 0),
        (1, 0), (0, 1), (-1, 0), (0, -1),
        (1, 1), (-1, 1), (-1, -1), (1, -1),
    ),
    weights=(4 / 9, 1 / 9, 1 / 9, 1 / 9, 1 / 9, 1 / 36, 1 / 36, 1 / 36, 1 / 36),
    sound_speed_sq_factor=1 / 3,
)

VELOCITY_SETS = {vs.name: vs for vs in (D1Q3, D2Q5, D2Q9)}


@dataclass(frozen=True)
class LbmParams:
    """Parameters of one BGK model instance.

    advection is the macroscopic velocity vector a (length = dimension);
    zero advection gives the pure diffusion model.
    """

    vset: VelocitySet
    dx: float
    dt: float
    omega: float
    advection: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.dx <= 0 or self.dt <= 0:
            raise ValueError("dx and dt must be positive")
        if not 0.0 <= self.omega <= 2.0:
            raise ValueError(f"omega={self.omega} outside the stable range [0, 2]")
        a = self.advection
        if not a:
            a = (0.0,) * self.vset.dimension
        if len(a) != self.vset.dimension:
            raise ValueError("advection vector must match the lattice dimension")
        object.__setattr__(self, "advection", tuple(float(v) for v in a))

    @property
    def sound_speed_sq(self) -> float:
        c = self.dx / self.dt
        return self.vset.sound_speed_sq_factor * c * c

    def fingerprint(self) -> tuple:
        """Hashable identity used to match trained coefficients to a model."""
        return (self.vset.name, self.dx, self.dt, self.omega, self.advection)

    def equilibrium_weights(self) -> np.ndarray:
        """d f_eq / d rho per direction (the equilibrium bracket times w_i)."""
        w = self.vset.weight_array()
        if all(v == 0.0 for v in self.advection):
            return w
        c = self.dx / self.dt
        v = self.vset.direction_array() * c          # (q, d) physical velocities
        a = np.asarray(self.advection, dtype=float)  # (d,)
        cs2 = self.sound_speed_sq
        va = v @ a
        aa = float(a @ a)
        bracket = 1.0 + va / cs2 + va ** 2 / (2 * cs2 ** 2) - aa / (2 * cs2)
        return w * bracket


@dataclass
class Moments:
    """D1Q3 moment triple (rho, phi, xi), each an array over the grid."""

    rho: np.ndarray
    phi: np.ndarray
    xi: np.ndarray


class StepTally:
    """Running count of stream_collide invocations in this process.

    Lifting operators differ mainly in how many extra LBM steps they burn,
    so the cost accounting simply snapshots this counter around each phase.
    """

    def __init__(self) -> None:
        self.count = 0


_TALLY = StepTally()


def lbm_step_count() -> int:
    """Total number of stream_collide calls so far."""
    return _TALLY.count


def equilibrium(rho: np.ndarray, params: LbmParams) -> np.ndarray:
    """Equilibrium distribution for a density field.

    Second order in the advection velocity; reduces to w_i * rho for the
    pure diffusion model.  Conserves mass exactly: sum_i f_eq_i = rho.
    """
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != params.vset.dimension:
        raise ValueError(
            f"density rank {rho.ndim} does not match {params.vset.name}"
        )
    ew = params.equilibrium_weights()
    return ew.reshape((-1,) + (1,) * rho.ndim) * rho[None]


def restrict(f: np.ndarray) -> np.ndarray:
    """Restriction to the macroscopic density: sum over the velocity axis."""
    return np.asarray(f, dtype=float).sum(axis=0)


def stream_collide(f: np.ndarray, params: LbmParams,
                   boundary: str = "periodic") -> np.ndarray:
    """One BGK update  f_i(x + c_i dx, t + dt) = (1-w) f_i + w f_eq_i.

    Collision happens in place, then each component streams one lattice
    link.  boundary="periodic" wraps every axis.  boundary="ghost" expects
    f to carry a one-cell ghost rim along axis 0 of the grid (both ends);
    the returned array is cropped to the interior, so its grid shrinks by
    two along that axis.  The y axis stays periodic in 2D ghost mode.
    """
    f = np.asarray(f, dtype=float)
    vset = params.vset
    if f.shape[0] != vset.q:
        raise ValueError(f"expected leading axis {vset.q} for {vset.name}")
    if boundary not in ("periodic", "ghost"):
        raise ValueError(f"unknown boundary mode {boundary!r}")
    if boundary == "ghost" and f.shape[1] < 3:
        raise ValueError("ghost mode needs at least one interior cell plus rim")

    _TALLY.count += 1
    rho = restrict(f)
    post = (1.0 - params.omega) * f + params.omega * equilibrium(rho, params)

    out = np.empty_like(post)
    for k, c in enumerate(vset.directions):
        g = post[k]
        for axis, shift in enumerate(c):
            if shift:
                g = np.roll(g, shift, axis=axis)
        out[k] = g

    if boundary == "ghost":
        # wrap pollution from np.roll lands in the rim, which is dropped
        out = out[:, 1:-1]
    return out


def run_lbm(f: np.ndarray, params: LbmParams, steps: int) -> np.ndarray:
    """Advance a periodic LBM simulation by the given number of steps."""
    for _ in range(steps):
        f = stream_collide(f, params)
    return f


_M_D1Q3 = np.array([
    [1.0, 1.0, 1.0],
    [1.0, 0.0, -1.0],
    [0.5, 0.0, 0.5],
])

_MINV_D1Q3 = np.array([
    [0.0, 0.5, 1.0],
    [1.0, 0.0, -2.0],
    [0.0, -0.5, 1.0],
])


def moments(f: np.ndarray) -> Moments:
    """D1Q3 moment transform (rho, phi, xi) of a distribution field."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != 3:
        raise ValueError("moment transform is defined for D1Q3 fields")
    f1, f0, fm1 = f[0], f[1], f[2]
    return Moments(rho=f1 + f0 + fm1, phi=f1 - fm1, xi=0.5 * (f1 + fm1))


def from_moments(m: Moments) -> np.ndarray:
    """Inverse of the D1Q3 moment transform."""
    f1 = m.xi + 0.5 * m.phi
    fm1 = m.xi - 0.5 * m.phi
    f0 = m.rho - 2.0 * m.xi
    return np.stack([f1, f0, fm1])


def reset_density(f: np.ndarray, rho0: np.ndarray) -> np.ndarray:
    """Pin the density of f to rho0 keeping all non-density moments.

    The correction lands entirely on the rest direction: for D1Q3 this is
    exactly the moment-space reset of (rho, phi, xi) -> (rho0, phi, xi),
    and it generalises unchanged to D2Q5/D2Q9 (whose rest component enters
    no non-density moment of the invertible transform).
    """
    f = np.array(f, dtype=float, copy=True)
    rest = _rest_index(f.shape[0])
    f[rest] += rho0 - restrict(f)
    return f


def _rest_index(q: int) -> int:
    # D1Q3 orders (+1, 0, -1); the 2D sets put the rest direction first.
    return 1 if q == 3 else 0
