"""Per-axis Schrodinger solution pairs and separable 3D solution fields.

Every axis contributes two independent real solutions of

    u'' = (2 m0 / hbar^2) (V_axis(x) - E_axis) u,

either from a small analytic catalog or from the Numerov recurrence. A 3D
field is a pair of linear combinations of per-axis product terms, all at
the same per-axis energies, so every term solves the 3D equation at
E = sum(E_axis) and second derivatives are exact via the ODE identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateICs,
    InconsistentEnergy,
    OutOfDomain,
    Overflow,
    ProportionalSolutions,
    UnknownCatalogEntry,
)
from .potentials import AXES, AxisPotential, Free, SeparablePotential

SELECTORS = ("u1", "u2")

# Independence / activity probe threshold, in scenario units.
PROBE_EPS = 1e-12


@dataclass(frozen=True)
class AxisSolution:
    """One real solution with value and first-derivative access.

    The second derivative always comes from the ODE identity
    u'' = coeff(x) * u with coeff = (2 m0/hbar^2)(V - E), so it is exactly
    consistent with the equation the solution satisfies -- never a double
    finite difference.
    """

    _value: Callable[[float], float]
    _derivative: Callable[[float], float]
    _coeff: Callable[[float], float]

    def value(self, x: float) -> float:
        return float(self._value(x))

    def derivative(self, x: float) -> float:
        return float(self._derivative(x))

    def second_derivative(self, x: float) -> float:
        return float(self._coeff(x)) * self.value(x)


@dataclass(frozen=True)
class AxisSolutionPair:
    """Two independent solutions at a common axis energy.

    wronskian_ref is u1*u2' - u2*u1' at the reference point (left domain
    edge, or 0 for unbounded domains); constancy of the Wronskian over the
    domain is the independence certificate.
    """

    axis: str
    e_axis: float
    u1: AxisSolution
    u2: AxisSolution
    potential: AxisPotential
    m0: float
    hbar: float
    domain: tuple[float, float]
    source: str
    wronskian_ref: float

    def schrod_coeff(self, x: float) -> float:
        """(2 m0/hbar^2) (V(x) - E_axis), the u''/u factor."""
        return 2.0 * self.m0 / self.hbar**2 * (self.potential(x) - self.e_axis)

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        eps = 4.0 * np.finfo(float).eps * max(1.0, abs(x))
        return (lo - eps) <= x <= (hi + eps)

    def probe_interval(self) -> tuple[float, float]:
        """Bounded interval used for independence/activity probing."""
        lo, hi = self.domain
        if math.isfinite(lo) and math.isfinite(hi):
            inset = 0.05 * (hi - lo)
            return (lo + inset, hi - inset)
        return (-2.0, 2.0)


def wronskian(pair: AxisSolutionPair, x: float) -> float:
    """u1(x) u2'(x) - u2(x) u1'(x); constant over the domain in exact math."""
    if not pair.contains(x):
        raise OutOfDomain(f"x={x} outside axis {pair.axis} domain {pair.domain}")
    return pair.u1.value(x) * pair.u2.derivative(x) - pair.u2.value(x) * pair.u1.derivative(x)


# ---------------------------------------------------------------------------
# Analytic catalog
# ---------------------------------------------------------------------------

def _energy_check(e_axis, expected, kind):
    if e_axis is None:
        return expected
    if abs(e_axis - expected) > 1e-12 * max(1.0, abs(expected)):
        raise InconsistentEnergy(
            f"{kind}: E_axis={e_axis} conflicts with parameter value {expected}"
        )
    return expected


def solve_axis_analytic(kind, params=None, e_axis=None, *, m0=1.0, hbar=1.0, axis="x"):
    """Closed-form solution pair from the catalog.

    Entries: free(k) with (u1, u2) = (sin kx, cos kx); zero_energy_free
    with (1, x); box(L, n) = free(n*pi/L) restricted to (0, L).
    """
    params = dict(params or {})
    if kind == "free":
        k = float(params["k"])
        if k == 0.0:
            raise InconsistentEnergy("free: k must be nonzero (use zero_energy_free)")
        energy = _energy_check(e_axis, (hbar * k) ** 2 / (2.0 * m0), "free")
        return _trig_pair(k, energy, (-math.inf, math.inf), f"catalog:{kind}",
                          m0=m0, hbar=hbar, axis=axis)
    if kind == "zero_energy_free":
        energy = _energy_check(e_axis, 0.0, "zero_energy_free")
        coeff = lambda x: 0.0
        u1 = AxisSolution(lambda x: 1.0, lambda x: 0.0, coeff)
        u2 = AxisSolution(lambda x: x, lambda x: 1.0, coeff)
        return AxisSolutionPair(
            axis=axis, e_axis=energy, u1=u1, u2=u2, potential=Free(),
            m0=m0, hbar=hbar, domain=(-math.inf, math.inf),
            source="catalog:zero_energy_free", wronskian_ref=1.0,
        )
    if kind == "box":
        length = float(params["L"])
        n = int(params["n"])
        if length <= 0 or n < 1:
            raise InconsistentEnergy("box: need L > 0 and integer n >= 1")
        k = n * math.pi / length
        energy = _energy_check(e_axis, (hbar * k) ** 2 / (2.0 * m0), "box")
        return _trig_pair(k, energy, (0.0, length), "catalog:box",
                          m0=m0, hbar=hbar, axis=axis)
    raise UnknownCatalogEntry(f"no catalog entry named {kind!r}")


def _trig_pair(k, energy, domain, source, *, m0, hbar, axis):
    coeff = lambda x: -k * k  # (2m0/hbar^2)(0 - E) for E = (hbar k)^2/2m0
    u1 = AxisSolution(lambda x: math.sin(k * x), lambda x: k * math.cos(k * x), coeff)
    u2 = AxisSolution(lambda x: math.cos(k * x), lambda x: -k * math.sin(k * x), coeff)
    return AxisSolutionPair(
        axis=axis, e_axis=energy, u1=u1, u2=u2, potential=Free(),
        m0=m0, hbar=hbar, domain=domain, source=source, wronskian_ref=-k,
    )


# ---------------------------------------------------------------------------
# Numerov backend
# ---------------------------------------------------------------------------

class _TableEval:
    """Cubic-spline evaluation over a Numerov table, with domain guard."""

    def __init__(self, spline, lo, hi):
        self.spline = spline
        self.lo = lo
        self.hi = hi
        self.eps = 4.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi))

    def __call__(self, x):
        if not (self.lo - self.eps <= x <= self.hi + self.eps):
            raise OutOfDomain(f"x={x} outside Numerov table [{self.lo}, {self.hi}]")
        return float(self.spline(x))


def _rk4_segment(coeff, x0, u, up, x1, nsub=32):
    """March (u, u') across one grid cell with RK4 substeps.

    Only used to seed the neighbour of the anchor point; 32 substeps make
    the seed error negligible against the Numerov truncation error.
    """
    h = (x1 - x0) / nsub
    x = x0
    for _ in range(nsub):
        k1u, k1p = up, coeff(x) * u
        k2u = up + 0.5 * h * k1p
        k2p = coeff(x + 0.5 * h) * (u + 0.5 * h * k1u)
        k3u = up + 0.5 * h * k2p
        k3p = coeff(x + 0.5 * h) * (u + 0.5 * h * k2u)
        k4u = up + h * k3p
        k4p = coeff(x + h) * (u + h * k3u)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        up = up + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        x += h
    return u, up


def _numerov_fill(u, fvals, h, i0, overflow_limit, axis):
    """Run the three-point recurrence outward from i0 in both directions.

    u[i0] and the immediate neighbours present in the table must already
    be seeded. w = 1 - (h^2/12) f is the Numerov weight.
    """
    n = len(u)
    w = 1.0 - (h * h / 12.0) * fvals
    p = 2.0 + (5.0 * h * h / 6.0) * fvals
    for i in range(i0 + 1, n - 1):
        u[i + 1] = (p[i] * u[i] - w[i - 1] * u[i - 1]) / w[i + 1]
        if abs(u[i + 1]) > overflow_limit:
            raise Overflow(f"axis {axis}: |u| exceeded {overflow_limit:g} during Numerov sweep")
    for i in range(i0 - 1, 0, -1):
        u[i - 1] = (p[i] * u[i] - w[i + 1] * u[i + 1]) / w[i - 1]
        if abs(u[i - 1]) > overflow_limit:
            raise Overflow(f"axis {axis}: |u| exceeded {overflow_limit:g} during Numerov sweep")


def _five_point_derivative(u, h):
    """O(h^4) first derivative of the table, one-sided at the edges."""
    n = len(u)
    up = np.empty(n)
    up[2:-2] = (-u[4:] + 8.0 * u[3:-1] - 8.0 * u[1:-3] + u[:-4]) / (12.0 * h)
    up[0] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h)
    up[1] = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / (12.0 * h)
    up[-2] = (3.0 * u[-1] + 10.0 * u[-2] - 18.0 * u[-3] + 6.0 * u[-4] - u[-5]) / (12.0 * h)
    up[-1] = (25.0 * u[-1] - 48.0 * u[-2] + 36.0 * u[-3] - 16.0 * u[-4] + 3.0 * u[-5]) / (12.0 * h)
    return up


def solve_axis_numerov(axis_potential, e_axis, domain, step, ic1, ic2, *,
                       m0=1.0, hbar=1.0, axis="x", ic_at=None,
                       overflow_limit=1e300):
    """Numerov solution pair for u'' = (2 m0/hbar^2)(V - E_axis) u.

    ic1 and ic2 are (value, slope) pairs anchored at ic_at (default: the
    left edge). Anchoring at an interior point integrates outward in both
    directions, which is the stable way to follow a solution that decays
    into classically forbidden regions on either side.

    The table stores (x, u, u') with u' from O(h^4) five-point stencils;
    off-grid values interpolate u and u' independently by cubic splines.
    """
    x_lo, x_hi = float(domain[0]), float(domain[1])
    if not (step > 0.0):
        raise ValueError("step must be positive")
    if (x_hi - x_lo) / step < 16:
        raise ValueError("domain must span at least 16 steps")
    (v1, s1), (v2, s2) = (float(ic1[0]), float(ic1[1])), (float(ic2[0]), float(ic2[1]))
    det = v1 * s2 - v2 * s1
    scale = max(abs(v1), abs(s1), 1.0) * max(abs(v2), abs(s2), 1.0)
    if abs(det) <= 1e-12 * scale:
        raise DegenerateICs("ic1 and ic2 are parallel as (value, slope) vectors")

    n_int = int(round((x_hi - x_lo) / step))
    h = (x_hi - x_lo) / n_int
    xs = np.linspace(x_lo, x_hi, n_int + 1)

    if ic_at is None:
        i0 = 0
    else:
        if not (x_lo <= ic_at <= x_hi):
            raise ValueError("ic_at must lie inside the domain")
        i0 = int(round((float(ic_at) - x_lo) / h))

    def coeff(x):
        return 2.0 * m0 / hbar**2 * (axis_potential(x) - e_axis)

    fvals = np.array([coeff(x) for x in xs])

    tables = []
    for value, slope in ((v1, s1), (v2, s2)):
        u = np.zeros(n_int + 1)
        u[i0] = value
        if i0 + 1 <= n_int:
            u[i0 + 1], _ = _rk4_segment(coeff, xs[i0], value, slope, xs[i0 + 1])
        if i0 - 1 >= 0:
            u[i0 - 1], _ = _rk4_segment(coeff, xs[i0], value, slope, xs[i0 - 1])
        _numerov_fill(u, fvals, h, i0, overflow_limit, axis)
        tables.append(u)

    sols = []
    for u in tables:
        up = _five_point_derivative(u, h)
        val = _TableEval(CubicSpline(xs, u), x_lo, x_hi)
        der = _TableEval(CubicSpline(xs, up), x_lo, x_hi)
        sols.append(AxisSolution(val, der, coeff))

    u1, u2 = sols
    w_ref = u1.value(x_lo) * u2.derivative(x_lo) - u2.value(x_lo) * u1.derivative(x_lo)
    return AxisSolutionPair(
        axis=axis, e_axis=float(e_axis), u1=u1, u2=u2, potential=axis_potential,
        m0=m0, hbar=hbar, domain=(x_lo, x_hi), source="numerov",
        wronskian_ref=w_ref,
    )


# ---------------------------------------------------------------------------
# 3D field assembly and evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionField3D:
    """theta(r), phi(r) as coefficient-weighted sums of product terms.

    Terms are (coefficient, (sel_x, sel_y, sel_z)) with sel in {u1, u2}.
    active_axes flags the axes along which the field actually varies; the
    flat axes carry no quantum correction and no motion.
    """

    pairs: tuple[AxisSolutionPair, AxisSolutionPair, AxisSolutionPair]
    theta_terms: tuple[tuple[float, tuple[str, str, str]], ...]
    phi_terms: tuple[tuple[float, tuple[str, str, str]], ...]
    e: float
    hbar: float
    m0: float
    active_axes: tuple[bool, bool, bool]
    length_scale: float

    @property
    def potential(self) -> SeparablePotential:
        return SeparablePotential(*(p.potential for p in self.pairs))


@dataclass(frozen=True)
class FieldSample:
    """Values, gradients and diagonal second partials of theta and phi."""

    theta: float
    phi: float
    grad_theta: np.ndarray
    grad_phi: np.ndarray
    second_theta: np.ndarray
    second_phi: np.ndarray


def _normalize_terms(terms, which):
    out = []
    for entry in terms:
        coef = float(entry[0])
        sels = tuple(entry[1])
        if not math.isfinite(coef):
            raise ValueError(f"{which}: non-finite coefficient {coef}")
        if len(sels) != 3 or any(s not in SELECTORS for s in sels):
            raise ValueError(f"{which}: selectors must be three of {SELECTORS}, got {sels}")
        out.append((coef, sels))
    if not out:
        raise ValueError(f"{which}: at least one product term required")
    return tuple(out)


def _axis_eval(pairs, r):
    """Per-axis (u, u', u'') for u1 and u2 at the coordinates of r."""
    cache = []
    for i, pair in enumerate(pairs):
        xi = float(r[i])
        if not pair.contains(xi):
            raise OutOfDomain(f"axis {pair.axis}: {xi} outside domain {pair.domain}")
        c = pair.schrod_coeff(xi)
        v1 = pair.u1.value(xi)
        v2 = pair.u2.value(xi)
        cache.append({
            "u1": (v1, pair.u1.derivative(xi), c * v1),
            "u2": (v2, pair.u2.derivative(xi), c * v2),
        })
    return cache


def _combine(terms, cache):
    value = 0.0
    grad = np.zeros(3)
    second = np.zeros(3)
    for coef, sels in terms:
        f = [cache[i][sels[i]] for i in range(3)]
        v = coef * f[0][0] * f[1][0] * f[2][0]
        value += v
        for mu in range(3):
            others = coef
            for nu in range(3):
                if nu != mu:
                    others *= f[nu][0]
            grad[mu] += f[mu][1] * others
            second[mu] += f[mu][2] * others
    return value, grad, second


def evaluate_field(field: SolutionField3D, r) -> FieldSample:
    """Point evaluation of theta and phi with exact second partials."""
    cache = _axis_eval(field.pairs, r)
    theta, grad_t, sec_t = _combine(field.theta_terms, cache)
    phi, grad_p, sec_p = _combine(field.phi_terms, cache)
    return FieldSample(theta, phi, grad_t, grad_p, sec_t, sec_p)


def assemble_field(pairs: Sequence[AxisSolutionPair], theta_terms, phi_terms,
                   probe_points: int = 5) -> SolutionField3D:
    """Build a 3D field and certify theta/phi independence on a probe grid.

    Raises ProportionalSolutions if max |phi grad(theta) - theta grad(phi)|
    over the probe grid stays below the independence threshold.
    """
    pairs = tuple(pairs)
    if len(pairs) != 3:
        raise ValueError("exactly three axis pairs required")
    for pair, label in zip(pairs, AXES):
        if pair.axis != label:
            raise ValueError(f"pairs must be in (x, y, z) order; got axis {pair.axis!r} in slot {label!r}")
    hbar, m0 = pairs[0].hbar, pairs[0].m0
    for pair in pairs[1:]:
        if abs(pair.hbar - hbar) > 1e-15 or abs(pair.m0 - m0) > 1e-15:
            raise ValueError("all pairs must share hbar and m0")

    theta_terms = _normalize_terms(theta_terms, "theta")
    phi_terms = _normalize_terms(phi_terms, "phi")

    probe_axes = [np.linspace(*p.probe_interval(), probe_points) for p in pairs]
    max_cross = 0.0
    max_grad = np.zeros(3)
    for xi in probe_axes[0]:
        for yi in probe_axes[1]:
            for zi in probe_axes[2]:
                cache = _axis_eval(pairs, (xi, yi, zi))
                th, gt, _ = _combine(theta_terms, cache)
                ph, gp, _ = _combine(phi_terms, cache)
                cross = ph * gt - th * gp
                max_cross = max(max_cross, float(np.max(np.abs(cross))))
                max_grad = np.maximum(max_grad, np.abs(gt))
                max_grad = np.maximum(max_grad, np.abs(gp))
    if max_cross <= PROBE_EPS:
        raise ProportionalSolutions(
            f"theta and phi look proportional: max |phi grad(theta) - theta grad(phi)| = {max_cross:.3e}"
        )

    active = tuple(bool(g > PROBE_EPS) for g in max_grad)
    finite_spans = [p.domain[1] - p.domain[0]
                    for p, act in zip(pairs, active)
                    if act and math.isfinite(p.domain[0]) and math.isfinite(p.domain[1])]
    length_scale = min(finite_spans) if finite_spans else 1.0

    return SolutionField3D(
        pairs=pairs,
        theta_terms=theta_terms,
        phi_terms=phi_terms,
        e=sum(p.e_axis for p in pairs),
        hbar=hbar,
        m0=m0,
        active_axes=active,
        length_scale=length_scale,
    )
