"""Rotationally symmetric gradient solitons from the first-order warp ODE

    f' + A f^2 = B,        f(0) = 0, f'(0) = B,

normalized to B = 1 so the metric caps off smoothly at the pole.  Closed
forms by sign of A (with a = sqrt(|A|)):

    A > 0:  f = tanh(a rho)/a,   potential  phi = 2 log cosh(a rho)
    A < 0:  f = tan(a rho)/a,    potential  phi = 2 log cos(a rho)
    A = 0:  f = rho,             flat; the potential is constant

The pair (f, phi) satisfies the pointwise identities

    -f''/f = phi''          (res1)
    phi''  = (f'/f) phi'    (res2)

which the residual helpers report, and the A < 0 geometry satisfies
Delta log(-R) + R = 0 for the scalar curvature R = 2K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BlowUpError, DomainError, PoleProximityError, TrivialSolitonError
from .warped_metric import (
    DELTA_CAP,
    LinearWarp,
    TabulatedWarp,
    TanhWarp,
    TanWarp,
    WarpCurve,
)

BLOWUP_STEP_MARGIN = 10  # keep 10 steps clear of the tan blow-up


@dataclass(frozen=True)
class SolitonParams:
    """Quadratic coefficient A of the warp ODE; B is kept at 1 so that the
    solution caps off with f'(0) = 1."""
    A: float
    B: float = 1.0

    def __post_init__(self):
        if self.B <= 0:
            raise DomainError("need B > 0")

    @property
    def a(self) -> float:
        """sqrt(|A|); only meaningful for A != 0."""
        return math.sqrt(abs(self.A))


class Potential:
    """Radial function with two analytic derivatives."""

    def phi(self, rho):
        raise NotImplementedError

    def dphi(self, rho):
        raise NotImplementedError

    def d2phi(self, rho):
        raise NotImplementedError


@dataclass(frozen=True)
class CigarPotential(Potential):
    """phi = 2 log cosh(a rho); evaluated in overflow-safe form."""
    a: float

    def phi(self, rho):
        x = np.abs(self.a * np.asarray(rho, dtype=float))
        # log cosh x = x + log1p(exp(-2x)) - log 2, stable for large x
        return (2.0 * (x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)))[()]

    def dphi(self, rho):
        return (2.0 * self.a * np.tanh(self.a * np.asarray(rho, dtype=float)))[()]

    def d2phi(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return (2.0 * self.a ** 2 / np.cosh(x) ** 2)[()]


@dataclass(frozen=True)
class ExplodingPotential(Potential):
    """phi = 2 log cos(a rho) on [0, pi/(2a))."""
    a: float

    def phi(self, rho):
        return (2.0 * np.log(np.cos(self.a * np.asarray(rho, dtype=float))))[()]

    def dphi(self, rho):
        return (-2.0 * self.a * np.tan(self.a * np.asarray(rho, dtype=float)))[()]

    def d2phi(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return (-2.0 * self.a ** 2 / np.cos(x) ** 2)[()]


@dataclass(frozen=True)
class CallablePotential(Potential):
    """Wrap plain callables (value, first, second derivative)."""
    value: Callable
    deriv: Callable
    second: Callable

    def phi(self, rho):
        return self.value(rho)

    def dphi(self, rho):
        return self.deriv(rho)

    def d2phi(self, rho):
        return self.second(rho)


def solve_warp_ode(params: SolitonParams, rho_max: float,
                   step: float) -> TabulatedWarp:
    """Integrate f' = B - A f^2 from f(0) = 0 with classical fixed-step RK4.

    The step is adjusted to divide [0, rho_max] evenly, so halving the
    requested step exactly doubles the node count; against the closed forms
    the node values converge at fourth order.  For A < 0 the integration
    refuses to run closer than BLOWUP_STEP_MARGIN steps to the blow-up at
    pi/(2a).

    Returns a TabulatedWarp through the RK4 nodes (cubic-spline evaluators;
    second derivatives of the spline are only second-order accurate).
    """
    if rho_max <= 0:
        raise DomainError("need rho_max > 0")
    if step <= 0 or step > rho_max:
        raise DomainError("need 0 < step <= rho_max")
    if params.A < 0:
        # the solution sqrt(B/|A|) tan(sqrt(|A| B) rho) blows up here
        blow_up = math.pi / (2.0 * math.sqrt(abs(params.A) * params.B))
        if rho_max > blow_up - BLOWUP_STEP_MARGIN * step:
            raise BlowUpError(
                f"rho_max = {rho_max} within {BLOWUP_STEP_MARGIN} steps of "
                f"the blow-up at {blow_up:.6g}")

    n = max(4, int(round(rho_max / step)))
    h = rho_max / n
    A, B = params.A, params.B

    def rhs(f):
        return B - A * f * f

    fs = np.empty(n + 1)
    fs[0] = 0.0
    f = 0.0
    for i in range(n):
        k1 = rhs(f)
        k2 = rhs(f + 0.5 * h * k1)
        k3 = rhs(f + 0.5 * h * k2)
        k4 = rhs(f + h * k3)
        f = f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        fs[i + 1] = f

    rhos = np.arange(n + 1) * h
    return TabulatedWarp(rhos, fs)


def closed_form_warp(params: SolitonParams) -> WarpCurve:
    """Exact solution of the warp ODE as a named family (B = 1 only)."""
    if params.B != 1.0:
        raise DomainError("closed forms are tabulated for B = 1")
    if params.A > 0:
        return TanhWarp(params.a)
    if params.A < 0:
        return TanWarp(params.a)
    return LinearWarp()


def soliton_potential(params: SolitonParams) -> Potential:
    """Potential paired with the closed-form warp; A = 0 has no
    nonconstant potential and raises TrivialSolitonError."""
    if params.B != 1.0:
        raise DomainError("potentials are tabulated for B = 1")
    if params.A > 0:
        return CigarPotential(params.a)
    if params.A < 0:
        return ExplodingPotential(params.a)
    raise TrivialSolitonError("A = 0 is the flat plane; potential constant")


def soliton_residual(warp: WarpCurve, potential: Potential, rho):
    """Pointwise residuals of the two soliton identities.

    Returns (res1, res2) with

        res1 = | -f''/f - phi'' |
        res2 = | phi'' - (f'/f) phi' |

    Both vanish to rounding for matched (warp, potential) pairs and stay
    O(1) for mismatched ones.  Requires f > DELTA_CAP at rho.
    """
    rho = np.asarray(rho, dtype=float)
    fv = np.asarray(warp.f(rho), dtype=float)
    if np.any(fv <= DELTA_CAP):
        raise PoleProximityError("residuals need f > delta_cap")
    dfv = np.asarray(warp.df(rho), dtype=float)
    d2fv = np.asarray(warp.d2f(rho), dtype=float)
    d1p = np.asarray(potential.dphi(rho), dtype=float)
    d2p = np.asarray(potential.d2phi(rho), dtype=float)
    res1 = np.abs(-d2fv / fv - d2p)[()]
    res2 = np.abs(d2p - (dfv / fv) * d1p)[()]
    return res1, res2


def radial_laplacian(warp: WarpCurve, u: Potential, rho):
    """Laplace-Beltrami operator on radial functions:
    Delta u = u'' + (f'/f) u'.  Requires f > DELTA_CAP at rho."""
    rho = np.asarray(rho, dtype=float)
    fv = np.asarray(warp.f(rho), dtype=float)
    if np.any(fv <= DELTA_CAP):
        raise PoleProximityError("radial Laplacian needs f > delta_cap")
    dfv = np.asarray(warp.df(rho), dtype=float)
    return (np.asarray(u.d2phi(rho), dtype=float)
            + (dfv / fv) * np.asarray(u.dphi(rho), dtype=float))[()]


def exploding_identity_residual(rho):
    """| Delta log(-R) + R | for the A = -1 geometry (f = tan rho).

    R = 2K = -4 sec^2(rho) is negative on the whole domain, so log(-R) is a
    radial function; its derivatives are 2 tan(rho) and 2 sec^2(rho).  The
    identity holds exactly, so the returned value is rounding noise.
    Valid for DELTA_CAP <= rho <= pi/2 - DELTA_CAP.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < DELTA_CAP) or np.any(rho > math.pi / 2.0 - DELTA_CAP):
        raise DomainError("rho must stay delta_cap away from 0 and pi/2")
    warp = TanWarp(1.0)
    r_scalar = 2.0 * np.asarray(warp.curvature(rho), dtype=float)
    u = CallablePotential(
        value=lambda t: np.log(4.0) - 2.0 * np.log(np.cos(np.asarray(t, dtype=float))),
        deriv=lambda t: 2.0 * np.tan(np.asarray(t, dtype=float)),
        second=lambda t: 2.0 / np.cos(np.asarray(t, dtype=float)) ** 2,
    )
    return np.abs(radial_laplacian(warp, u, rho) + r_scalar)[()]
