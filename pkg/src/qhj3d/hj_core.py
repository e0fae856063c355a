"""Reduced action S0 and amplitude R built from a solution field.

With theta' = a*theta + b*phi the construction is

    S0 = hbar * arctan(theta' / phi),      R = sqrt(theta'^2 + phi^2),

and the gradient of S0 is always taken from the closed form

    grad S0 = hbar (phi grad theta' - theta' grad phi) / R^2,

which is smooth across arctan branch jumps; only the reported principal
value lives on (-pi hbar/2, pi hbar/2]. R carries unit prefactor because
the free constant in the continuity solution is pinned to k = hbar*a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NodalPoint, ZeroConjugateMomentum
from .potentials import evaluate as evaluate_potential
from .schrodinger import SolutionField3D, evaluate_field

NODAL_EPS = 1e-12


@dataclass(frozen=True)
class ReducedActionField:
    """A solution field together with the mixing constants (a, b).

    a = 0 is rejected: it makes S0 constant and the whole construction
    degenerate.
    """

    field: SolutionField3D
    a: float
    b: float

    def __post_init__(self):
        if self.a == 0.0 or not math.isfinite(self.a) or not math.isfinite(self.b):
            raise ValueError("need finite (a, b) with a != 0")

    @property
    def hbar(self) -> float:
        return self.field.hbar

    @property
    def m0(self) -> float:
        return self.field.m0

    @property
    def e(self) -> float:
        return self.field.e

    @property
    def k(self) -> float:
        return self.hbar * self.a


@dataclass(frozen=True)
class ActionSample:
    """S0 (principal branch), its closed-form gradient, R, the diagonal
    Hessian of R, and the local potential energy."""

    s0_principal: float
    grad_s0: np.ndarray
    amplitude: float
    hessian_r_diag: np.ndarray
    v: float


def _theta_prime_parts(action, fs):
    a, b = action.a, action.b
    tp = a * fs.theta + b * fs.phi
    grad_tp = a * fs.grad_theta + b * fs.grad_phi
    sec_tp = a * fs.second_theta + b * fs.second_phi
    return tp, grad_tp, sec_tp


def sample(action: ReducedActionField, r) -> ActionSample:
    """Evaluate S0, grad S0, R and the diagonal Hessian of R at r."""
    fs = evaluate_field(action.field, r)
    tp, grad_tp, sec_tp = _theta_prime_parts(action, fs)
    ph, grad_ph, sec_ph = fs.phi, fs.grad_phi, fs.second_phi

    g = tp * tp + ph * ph
    amplitude = math.sqrt(g)
    if amplitude < NODAL_EPS * max(1.0, abs(tp), abs(ph)):
        raise NodalPoint(f"R = {amplitude:.3e} at r = {tuple(float(c) for c in r)}")

    hbar = action.hbar

    # Principal arctan(theta'/phi) on (-pi/2, pi/2]; phi = 0 maps to +pi/2.
    angle = math.atan2(tp, ph)
    if angle > 0.5 * math.pi:
        angle -= math.pi
    elif angle <= -0.5 * math.pi:
        angle += math.pi

    grad_s0 = hbar * (ph * grad_tp - tp * grad_ph) / g

    grad_r = (tp * grad_tp + ph * grad_ph) / amplitude
    hess_r = (grad_tp**2 + tp * sec_tp + grad_ph**2 + ph * sec_ph) / amplitude \
        - grad_r**2 / amplitude

    v_total, _ = evaluate_potential(action.field.potential, r)
    return ActionSample(
        s0_principal=hbar * angle,
        grad_s0=grad_s0,
        amplitude=amplitude,
        hessian_r_diag=hess_r,
        v=v_total,
    )


def qshje_residual(action: ReducedActionField, r) -> float:
    """(grad S0)^2/2m0 - (hbar^2/2m0) (Lap R)/R + V - E.

    Zero in exact arithmetic whenever theta and phi solve the Schrodinger
    equation at E, so the returned value measures numerical error only.
    """
    s = sample(action, r)
    m0 = action.m0
    kinetic = float(s.grad_s0 @ s.grad_s0) / (2.0 * m0)
    quantum = action.hbar**2 / (2.0 * m0) * float(np.sum(s.hessian_r_diag)) / s.amplitude
    return kinetic - quantum + s.v - action.e


def continuity_identity_residual(action: ReducedActionField, r, mode="identity",
                                 fd_step=1e-5) -> float:
    """Residual of the continuity law R^2 grad S0 = hbar a (phi grad theta - theta grad phi).

    identity mode compares the two closed forms componentwise (guards
    against implementation drift; zero up to rounding). divergence mode
    checks div(R^2 grad S0) = 0 by central differences with the given step.
    """
    if mode == "identity":
        fs = evaluate_field(action.field, r)
        s = sample(action, r)
        lhs = s.amplitude**2 * s.grad_s0
        rhs = action.hbar * action.a * (fs.phi * fs.grad_theta - fs.theta * fs.grad_phi)
        return float(np.max(np.abs(lhs - rhs)))
    if mode == "divergence":
        div = 0.0
        r = np.asarray(r, dtype=float)
        for mu in range(3):
            shift = np.zeros(3)
            shift[mu] = fd_step
            sp = sample(action, r + shift)
            sm = sample(action, r - shift)
            flux_p = sp.amplitude**2 * sp.grad_s0[mu]
            flux_m = sm.amplitude**2 * sm.grad_s0[mu]
            div += (flux_p - flux_m) / (2.0 * fd_step)
        return abs(div)
    raise ValueError(f"unknown mode {mode!r}")


def _require_1d(field: SolutionField3D) -> None:
    if field.active_axes != (True, False, False):
        raise ValueError("operation needs a field varying along x only")


def _flat_axis_reference(field: SolutionField3D) -> tuple[float, float]:
    refs = []
    for pair in field.pairs[1:]:
        lo, hi = pair.probe_interval()
        refs.append(0.5 * (lo + hi))
    return refs[0], refs[1]


def s0_derivatives_1d(action: ReducedActionField, x: float,
                      momentum_eps: float = 1e-12):
    """(S0', S0'', S0''') along x for a field varying along x only.

    Uses S0' = hbar W / g with W = phi theta'_x - theta' phi_x and
    g = theta'^2 + phi^2. W is the (sign-flipped) Wronskian of two
    solutions of the same 1D equation, hence constant, so the higher
    derivatives need only g' and g'' -- all available exactly from the
    per-axis ODE identity.
    """
    _require_1d(action.field)
    yref, zref = _flat_axis_reference(action.field)
    fs = evaluate_field(action.field, (x, yref, zref))
    tp, grad_tp, sec_tp = _theta_prime_parts(action, fs)
    ph, phx, phxx = fs.phi, fs.grad_phi[0], fs.second_phi[0]
    tpx, tpxx = grad_tp[0], sec_tp[0]

    g = tp * tp + ph * ph
    if g == 0.0:
        raise NodalPoint(f"R = 0 at x = {x}")
    w = ph * tpx - tp * phx
    hbar = action.hbar
    s1 = hbar * w / g
    scale = math.sqrt(2.0 * action.m0 * abs(action.e)) if action.e != 0.0 else 1.0
    if abs(s1) < momentum_eps * max(1.0, scale):
        raise ZeroConjugateMomentum(f"S0' = {s1:.3e} at x = {x}")
    gp = 2.0 * (tp * tpx + ph * phx)
    gpp = 2.0 * (tpx * tpx + tp * tpxx + phx * phx + ph * phxx)
    s2 = -hbar * w * gp / g**2
    s3 = hbar * w * (2.0 * gp * gp - gpp * g) / g**3
    return s1, s2, s3


def floyd_residual_1d(action: ReducedActionField, x: float) -> float:
    """Residual of the 1D equation with the Schwarzian-bracket quantum term:

    (S0')^2/2m0 - (hbar^2/4m0) [ (3/2)(S0''/S0')^2 - S0'''/S0' ] + V - E.
    """
    s1, s2, s3 = s0_derivatives_1d(action, x)
    yref, zref = _flat_axis_reference(action.field)
    v_total, _ = evaluate_potential(action.field.potential, (x, yref, zref))
    m0 = action.m0
    bracket = 1.5 * (s2 / s1) ** 2 - s3 / s1
    return s1 * s1 / (2.0 * m0) - action.hbar**2 / (4.0 * m0) * bracket + v_total - action.e
