"""Lifting operators: density -> distribution functions.

A lifting operator reconstructs the full distribution field from the
macroscopic density alone.  The operators here share one representation:
an equilibrium part plus spatial-derivative corrections,

    f_i = f_eq_i + sum_T  a_{T,i} * (D_T rho),

where T runs over derivative multi-orders and a_T is one coefficient
vector per velocity direction.  Coefficient vectors may come from the
closed-form Chapman-Enskog expansion (D1Q3 pure diffusion, orders 0-3)
or from numerical training (any supported model); application is the
same either way.

The optional time term gamma multiplies d rho / dt and only exists on
coefficient sets that went through the time-derivative augmentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

from .lattice import D1Q3, VELOCITY_SETS, LbmParams, equilibrium
from .stencil import DerivSpec, spatial_derivative

# Accuracy order of the central stencils used to evaluate the derivative
# corrections.  Trained coefficients absorb the truncation terms of the
# stencils they were trained with, so training and application must use
# the same accuracy; 2 matches the closed-form benchmark values.
LIFT_STENCIL_ACCURACY = 2


@dataclass
class LiftCoefficients:
    """Derivative-correction coefficients for one BGK model instance.

    fingerprint ties the vectors to the (velocity set, dx, dt, omega,
    advection) they were derived for; applying them to a different model
    is refused.  terms maps DerivSpec -> vector of length q.
    """

    fingerprint: tuple
    terms: Dict[DerivSpec, np.ndarray] = field(default_factory=dict)
    time_term: Optional[np.ndarray] = None

    @property
    def max_order(self) -> int:
        return max((s.total for s in self.terms), default=0)

    def sorted_specs(self) -> List[DerivSpec]:
        return sorted(self.terms, key=lambda s: (s.total, s.orders))

    def flatten(self) -> np.ndarray:
        """Spatial coefficient vectors as one flat array (canonical order)."""
        if not self.terms:
            return np.zeros(0)
        return np.concatenate([self.terms[s] for s in self.sorted_specs()])

    def with_flat(self, values: np.ndarray) -> "LiftCoefficients":
        specs = self.sorted_specs()
        q = len(values) // len(specs)
        parts = values.reshape(len(specs), q)
        return LiftCoefficients(
            fingerprint=self.fingerprint,
            terms={s: parts[k].copy() for k, s in enumerate(specs)},
            time_term=None if self.time_term is None else self.time_term.copy(),
        )


def expansion_terms(dimension: int, max_order: int) -> List[DerivSpec]:
    """All spatial derivative specs with 1 <= total order <= max_order."""
    if max_order < 1:
        return []
    specs = []
    for orders in product(range(max_order + 1), repeat=dimension):
        if 1 <= sum(orders) <= max_order:
            specs.append(DerivSpec(orders))
    specs.sort(key=lambda s: (s.total, s.orders))
    return specs


def zero_coefficients(params: LbmParams, max_order: int) -> LiftCoefficients:
    q = params.vset.q
    terms = {s: np.zeros(q) for s in expansion_terms(params.vset.dimension, max_order)}
    return LiftCoefficients(fingerprint=params.fingerprint(), terms=terms)


def apply_lift(rho: np.ndarray, coeffs: LiftCoefficients, params: LbmParams,
               accuracy: int = LIFT_STENCIL_ACCURACY,
               derivatives: Optional[Dict[DerivSpec, np.ndarray]] = None,
               ) -> np.ndarray:
    """Lift a density field to distributions on a periodic grid.

    derivatives may supply exact derivative fields keyed by spec (used by
    the trainer, where the test density is a polynomial); otherwise the
    derivatives come from central stencils of the given accuracy.
    """
    if coeffs.fingerprint != params.fingerprint():
        raise ValueError(
            "coefficient fingerprint does not match the model parameters: "
            f"{coeffs.fingerprint} vs {params.fingerprint()}"
        )
    rho = np.asarray(rho, dtype=float)
    f = equilibrium(rho, params)
    for spec, vec in coeffs.terms.items():
        if derivatives is not None:
            d = derivatives[spec]
        else:
            d = spatial_derivative(rho, spec, params.dx, accuracy=accuracy)
        f += vec.reshape((-1,) + (1,) * rho.ndim) * d[None]
    return f


# ---------------------------------------------------------------------------
# Closed-form Chapman-Enskog coefficients, D1Q3 pure diffusion.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _symbolic_spatial_orders(max_order: int):
    """Spatial coefficient expressions per order from the symbolic expansion.

    Picard-iterates f = sum_k L^k f_eq for the D1Q3 diffusion model, where
    L collects the Taylor shift of the update rule, then eliminates time
    derivatives through rho_t = D rho_xx.  Grading counts a time derivative
    as two spatial orders, so the truncation is consistent at max_order.
    Returns {spatial order k: expression in (omega, dx, dt, i)}.
    """
    import sympy as sp

    w, dx, dt, ii = sp.symbols("omega dx dt i")
    diff_coeff = (2 - w) / (3 * w) * dx ** 2 / dt

    def apply_functional(terms):
        out: dict = {}
        for (a, b), c in terms.items():
            for n in range(1, max_order + 1):
                for p in range(n + 1):
                    q = n - p
                    key = (a + p, b + q)
                    if key[0] + 2 * key[1] > max_order:
                        continue
                    add = -c * ii ** p * dx ** p * dt ** q / (
                        w * sp.factorial(p) * sp.factorial(q))
                    out[key] = out.get(key, 0) + add
        return out

    seed = {(0, 0): sp.Rational(1, 3)}
    total = dict(seed)
    term = dict(seed)
    for _ in range(max_order):
        term = apply_functional(term)
        if not term:
            break
        for k, v in term.items():
            total[k] = total.get(k, 0) + v

    spatial: dict = {}
    for (a, b), c in total.items():
        k = a + 2 * b
        if 0 < k <= max_order:
            spatial[k] = spatial.get(k, 0) + c * diff_coeff ** b
    return {k: sp.simplify(sp.expand(v)) for k, v in spatial.items()}, (w, dx, dt, ii)


@lru_cache(maxsize=None)
def _numeric_spatial_vectors(omega: float, dx: float, dt: float,
                             max_order: int) -> Tuple[Tuple[float, ...], ...]:
    exprs, (w, sdx, sdt, ii) = _symbolic_spatial_orders(max_order)
    vectors = []
    for k in range(1, max_order + 1):
        e = exprs.get(k, 0)
        vec = tuple(
            float(e.subs({w: omega, sdx: dx, sdt: dt, ii: i}))
            for i in (1, 0, -1)
        )
        vectors.append(vec)
    return tuple(vectors)


def analytic_coefficients(params: LbmParams, order: int) -> LiftCoefficients:
    """Chapman-Enskog coefficients for the D1Q3 pure diffusion model.

    order 0 is the bare equilibrium lift; orders 1 and 2 use the closed
    forms  alpha_i = -i dx / (3 omega)  and
    beta_i = -dx^2 (omega - 2)(3 i^2 - 2) / (18 omega^2);  order 3 comes
    from one further step of the symbolic expansion.
    """
    if params.vset is not D1Q3 and params.vset.name != "D1Q3":
        raise ValueError("closed-form coefficients exist only for D1Q3")
    if any(a != 0.0 for a in params.advection):
        raise ValueError("closed-form coefficients cover pure diffusion only; "
                         "train the advective model numerically")
    if not 0 <= order <= 3:
        raise ValueError("analytic expansion orders run from 0 to 3")

    coeffs = LiftCoefficients(fingerprint=params.fingerprint())
    if order == 0:
        return coeffs

    w, dx = params.omega, params.dx
    alpha = np.array([-dx / (3 * w), 0.0, dx / (3 * w)])
    coeffs.terms[DerivSpec((1,))] = alpha
    if order >= 2:
        beta = np.array([
            -dx ** 2 * (w - 2) * (3 * i * i - 2) / (18 * w ** 2)
            for i in (1, 0, -1)
        ])
        coeffs.terms[DerivSpec((2,))] = beta
    if order >= 3:
        vecs = _numeric_spatial_vectors(params.omega, params.dx, params.dt, 3)
        coeffs.terms[DerivSpec((3,))] = np.array(vecs[2])
    return coeffs


# ---------------------------------------------------------------------------
# Plain-text serialization.
# ---------------------------------------------------------------------------

def coefficients_to_text(coeffs: LiftCoefficients) -> str:
    """Serialize to a line-oriented key = value format.

    Floats are written with repr, which round-trips exactly.
    """
    name, dx, dt, omega, advection = coeffs.fingerprint
    lines = [
        "# lblift coefficient file",
        f"set = {name}",
        f"dx = {dx!r}",
        f"dt = {dt!r}",
        f"omega = {omega!r}",
        "advection = " + " ".join(repr(a) for a in advection),
    ]
    for spec in coeffs.sorted_specs():
        vals = " ".join(repr(float(v)) for v in coeffs.terms[spec])
        lines.append(f"term {spec.label()} = {vals}")
    if coeffs.time_term is not None:
        vals = " ".join(repr(float(v)) for v in coeffs.time_term)
        lines.append(f"time dt1 = {vals}")
    return "\n".join(lines) + "\n"


def coefficients_from_text(text: str) -> LiftCoefficients:
    header: Dict[str, str] = {}
    terms: Dict[DerivSpec, np.ndarray] = {}
    time_term = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("term "):
            label = key[5:].strip()
            orders = tuple(int(tok) for tok in label[1:].split("d"))
            terms[DerivSpec(orders)] = np.array(
                [float(tok) for tok in value.split()])
        elif key.startswith("time"):
            time_term = np.array([float(tok) for tok in value.split()])
        else:
            header[key] = value
    for needed in ("set", "dx", "dt", "omega", "advection"):
        if needed not in header:
            raise ValueError(f"missing header field {needed!r}")
    if header["set"] not in VELOCITY_SETS:
        raise ValueError(f"unknown velocity set {header['set']!r}")
    fingerprint = (
        header["set"],
        float(header["dx"]),
        float(header["dt"]),
        float(header["omega"]),
        tuple(float(tok) for tok in header["advection"].split()),
    )
    q = VELOCITY_SETS[header["set"]].q
    for spec, vec in terms.items():
        if len(vec) != q:
            raise ValueError(f"term {spec.label()} has {len(vec)} entries, "
                             f"expected {q}")
    return LiftCoefficients(fingerprint=fingerprint, terms=terms,
                            time_term=time_term)
