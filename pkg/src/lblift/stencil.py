"""Finite difference stencils on uniform grids.

Central stencils of selectable accuracy for spatial derivatives up to
total order 6 (mixed 2D derivatives are tensor products of the 1D
stencils), plus one-sided formulas for time derivatives from a short
sequence of snapshots.  Periodic application wraps with np.roll;
interior-only application leaves a NaN rim where the stencil would
reach across the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

MAX_TOTAL_ORDER = 6


@dataclass(frozen=True)
class DerivSpec:
    """A spatial derivative d^(a+b) / dx^a dy^b, stored as per-axis orders."""

    orders: Tuple[int, ...]

    def __post_init__(self):
        if not self.orders:
            raise ValueError("empty derivative spec")
        if any(o < 0 for o in self.orders):
            raise ValueError("derivative orders must be nonnegative")
        if self.total == 0:
            raise ValueError("zeroth derivative has no stencil")
        if self.total > MAX_TOTAL_ORDER:
            raise ValueError(
                f"total derivative order {self.total} exceeds {MAX_TOTAL_ORDER}"
            )

    @property
    def total(self) -> int:
        return sum(self.orders)

    def label(self) -> str:
        return "d" + "d".join(str(o) for o in self.orders)


@lru_cache(maxsize=None)
def fd_weights(order: int, offsets: Tuple[int, ...]) -> np.ndarray:
    """Finite difference weights for the order-th derivative at offset 0.

    Fornberg's recursion on arbitrary integer offsets, in units of the
    grid spacing.  Exact for polynomials of degree < len(offsets).
    """
    x = np.array(offsets, dtype=float)
    n = len(x)
    if order >= n:
        raise ValueError("need more points than the derivative order")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order].copy()


def central_offsets(order: int, accuracy: int = 2) -> Tuple[int, ...]:
    """Symmetric offsets of the minimal central stencil at given accuracy."""
    if accuracy < 2 or accuracy % 2:
        raise ValueError("central stencils need even accuracy >= 2")
    half = (order + 1) // 2 + accuracy // 2 - 1
    return tuple(range(-half, half + 1))


def _apply_axis(rho: np.ndarray, order: int, dx: float, axis: int,
                accuracy: int, mode: str) -> np.ndarray:
    offsets = central_offsets(order, accuracy)
    w = fd_weights(order, offsets) / dx ** order
    out = np.zeros_like(rho, dtype=float)
    for off, wk in zip(offsets, w):
        out += wk * np.roll(rho, -off, axis=axis)
    if mode == "interior":
        half = (len(offsets) - 1) // 2
        rim = [slice(None)] * rho.ndim
        for cut in (slice(0, half), slice(-half, None)):
            rim[axis] = cut
            out[tuple(rim)] = np.nan
    return out


def spatial_derivative(rho: np.ndarray, spec: DerivSpec, dx: float,
                       mode: str = "periodic", accuracy: int = 2) -> np.ndarray:
    """Apply a (possibly mixed) central difference to a density field.

    mode="periodic" wraps every axis; mode="interior" marks the rim of
    half-width points that would wrap as NaN instead.
    """
    rho = np.asarray(rho, dtype=float)
    if len(spec.orders) != rho.ndim:
        raise ValueError("spec arity does not match field rank")
    if mode not in ("periodic", "interior"):
        raise ValueError(f"unknown mode {mode!r}")
    out = rho
    for axis, order in enumerate(spec.orders):
        if order:
            out = _apply_axis(out, order, dx, axis, accuracy, mode)
    return out


def time_derivative_forward(snapshots: Sequence[np.ndarray], dt: float,
                            order: int = 1) -> np.ndarray:
    """Forward one-sided estimate of the order-th time derivative.

    Evaluated at the first snapshot, using all supplied snapshots; two
    snapshots and order 1 give (s1 - s0)/dt, three give the second order
    formula, and so on.
    """
    snaps = [np.asarray(s, dtype=float) for s in snapshots]
    if len(snaps) < order + 1:
        raise ValueError("need at least order+1 snapshots")
    w = fd_weights(order, tuple(range(len(snaps)))) / dt ** order
    out = np.zeros_like(snaps[0])
    for wk, s in zip(w, snaps):
        out += wk * s
    return out
