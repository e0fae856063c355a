"""Pointwise quantum metric and the flattening coordinate transformation.

The diagonal metric a^{mumu} = 1 - hbar^2 (d_mu S0)^{-2} (d^2_mu R)/R turns
the quantum Hamilton-Jacobi equation into classical form. A 3x3 Jacobian
J[mu][nu] = dx^mu/dxhat^nu realizes the transformation pointwise when it
satisfies twelve constraint equations; those equations fix J only up to a
right rotation, and the canonical gauge picked here is the positive
diagonal square root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassicalTurningPoint,
    NodeSingularity,
    NonRiemannianPoint,
    ZeroConjugateMomentum,
)
from .hj_core import ReducedActionField, s0_derivatives_1d, sample, _flat_axis_reference, _require_1d
from .potentials import evaluate as evaluate_potential

NODE_EPS = 1e-12

TWELVE_EQUATION_LABELS = (
    "row_norm_x", "row_norm_y", "row_norm_z",
    "row_orth_xy", "row_orth_xz", "row_orth_yz",
    "col_norm_x", "col_norm_y", "col_norm_z",
    "col_orth_xy", "col_orth_xz", "col_orth_yz",
)


@dataclass(frozen=True)
class QuantumMetric:
    """Diagonal metric components at one point; off-diagonals vanish
    identically and are not stored."""

    point: np.ndarray
    a_upper: np.ndarray
    a_lower: np.ndarray
    signature: tuple[str, str, str]


@dataclass(frozen=True)
class JacobianMatrix:
    """entries[mu][nu] = dx^mu / dxhat^nu."""

    entries: np.ndarray


def a_upper_from_sample(action: ReducedActionField, s, node_eps: float = NODE_EPS) -> np.ndarray:
    """Diagonal a^{mumu} from an ActionSample.

    Axes along which the field is flat (d_mu S0 and d^2_mu R both vanish)
    carry no quantum correction: a^{mumu} = 1 there. A vanishing momentum
    component with a surviving correction is a genuine NodeSingularity.
    """
    hbar2 = action.hbar**2
    p_scale = max(1.0, 2.0 * action.m0 * abs(action.e))
    a_upper = np.empty(3)
    for mu in range(3):
        ds = s.grad_s0[mu]
        corr = hbar2 * s.hessian_r_diag[mu] / s.amplitude
        if abs(ds) >= node_eps:
            a_upper[mu] = 1.0 - corr / (ds * ds)
        elif abs(corr) <= node_eps * p_scale:
            a_upper[mu] = 1.0
        else:
            raise NodeSingularity(mu, f"d_{'xyz'[mu]} S0 = {ds:.3e} with nonzero quantum correction")
    return a_upper


def metric_at(action: ReducedActionField, r, node_eps: float = NODE_EPS) -> QuantumMetric:
    """Diagonal quantum metric at r."""
    s = sample(action, r)
    a_upper = a_upper_from_sample(action, s, node_eps)
    with np.errstate(divide="ignore"):
        a_lower = 1.0 / a_upper
    signature = tuple("+" if a > 0 else ("-" if a < 0 else "0") for a in a_upper)
    return QuantumMetric(
        point=np.asarray(r, dtype=float).copy(),
        a_upper=a_upper,
        a_lower=a_lower,
        signature=signature,
    )


def canonical_jacobian(metric: QuantumMetric) -> JacobianMatrix:
    """diag(sqrt(a^{xx}), sqrt(a^{yy}), sqrt(a^{zz})) -- the rotation-gauge
    representative. Needs a Riemannian point (all a^{mumu} > 0)."""
    if np.any(metric.a_upper <= 0.0):
        raise NonRiemannianPoint(metric.signature)
    return JacobianMatrix(entries=np.diag(np.sqrt(metric.a_upper)))


def verify_transformation(jacobian: JacobianMatrix, metric: QuantumMetric) -> np.ndarray:
    """Absolute residuals of the twelve constraint equations.

    Rows: sum_nu J[mu][nu]^2 = a^{mumu} and row orthogonality. Columns:
    sum_mu J[mu][nu]^2 a_{mumu} = 1 and weighted column orthogonality.
    Always returns the 12 residuals, even for invalid pairs.
    """
    j = jacobian.entries
    au, al = metric.a_upper, metric.a_lower
    res = np.empty(12)
    res[0:3] = [abs(float(j[mu] @ j[mu]) - au[mu]) for mu in range(3)]
    pairs = ((0, 1), (0, 2), (1, 2))
    res[3:6] = [abs(float(j[mu] @ j[nu])) for mu, nu in pairs]
    res[6:9] = [abs(float(np.sum(j[:, nu] ** 2 * al)) - 1.0) for nu in range(3)]
    res[9:12] = [abs(float(np.sum(j[:, nu] * j[:, nup] * al))) for nu, nup in pairs]
    return res


def schwarzian_1d(s0_derivs, momentum_eps: float = 1e-12) -> float:
    """{S0, x} = S0'''/S0' - (3/2)(S0''/S0')^2, standard convention."""
    s1, s2, s3 = s0_derivs
    if abs(s1) < momentum_eps:
        raise ZeroConjugateMomentum(f"S0' = {s1:.3e}")
    return s3 / s1 - 1.5 * (s2 / s1) ** 2


def fm_factor_1d(action: ReducedActionField, x: float) -> float:
    """(dx/dxhat)^2 for a field varying along x only.

    Computed as 2 m0 (E - V) / (S0')^2, the form the 1D classical-form
    equation forces. Equals 1 + (hbar^2/2)(S0')^{-2}{S0,x} and the 1D
    a^{xx} wherever all three are defined.
    """
    _require_1d(action.field)
    s1, _, _ = s0_derivatives_1d(action, x)
    yref, zref = _flat_axis_reference(action.field)
    v_total, _ = evaluate_potential(action.field.potential, (x, yref, zref))
    gap = action.e - v_total
    if abs(gap) < 1e-14:
        raise ClassicalTurningPoint(f"E - V = {gap:.3e} at x = {x}")
    return 2.0 * action.m0 * gap / (s1 * s1)
