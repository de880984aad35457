"""Rotationally symmetric metrics g = d rho^2 + f(rho)^2 d theta^2 and the
circle-quotient transformation that sends the warp f to

    f_new = r * f / sqrt(kappa^2 * f^2 + r^2).

The transformed metric is the one induced on the quotient of (surface) x S^1(r)
by the diagonal circle action of slope kappa = m1/m2.  The map is the identity
for kappa = 0, contracts every warp below the asymptote r/kappa for kappa > 0,
and has an explicit inverse on warps staying strictly below that asymptote.

Named warp families are normalized so that f(0) = 0 and f'(0) = 1 whenever the
family can cap off smoothly:

    sinh:   f = sinh(a rho)/a        (curvature -a^2)
    tanh:   f = tanh(a rho)/a        (curvature 2 a^2 sech^2(a rho))
    tan:    f = tan(a rho)/a         (curvature -2 a^2 sec^2(a rho))
    sin:    f = sin(a rho)/a         (curvature a^2)
    const:  f = c                    (flat cylinder)
    linear: f = rho                  (flat disk)

Closed-form families know their own Gauss curvature, so curvature stays exact
at the pole where -f''/f is 0/0 numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InvalidMetricError,
    NoAsymptoteError,
    NotInRangeError,
    PoleProximityError,
)

# Shared pole tolerance: below this value of f, curvature by -f''/f is not
# trusted and only closed forms are served.  The soliton module imports this
# so both modules agree on what "too close to the pole" means.
DELTA_CAP = 1e-4

_CAP_TOL = 1e-10  # agreement required of f(0), f'(0) for a capped metric


# ---------------------------------------------------------------------------
# warp curves
# ---------------------------------------------------------------------------

class WarpCurve:
    """Profile f > 0 with two derivatives on an interval.

    Subclasses provide vectorized f, df, d2f.  Families with a closed-form
    Gauss curvature override ``curvature`` and set ``has_closed_curvature``.
    """

    kind = "abstract"
    has_closed_curvature = False

    #: natural (maximal) domain of the family; metrics must live inside it
    rho_min = 0.0
    rho_max = math.inf
    #: True when the right end of the natural domain is a blow-up, so a
    #: metric interval must stop strictly before it
    open_right = False

    def f(self, rho):
        raise NotImplementedError

    def df(self, rho):
        raise NotImplementedError

    def d2f(self, rho):
        raise NotImplementedError

    def curvature(self, rho):
        """Gauss curvature -f''/f; only closed-form families implement it."""
        raise PoleProximityError(
            f"{self.kind} warp has no closed-form curvature; "
            "evaluate -d2f/f away from the pole instead")

    def caps_at_origin(self) -> bool:
        """True if f(0) = 0, f'(0) = 1 within tolerance (smooth pole)."""
        if self.rho_min > 0:
            return False
        return (abs(float(self.f(0.0))) <= _CAP_TOL
                and abs(float(self.df(0.0)) - 1.0) <= _CAP_TOL)


@dataclass(frozen=True)
class SinhWarp(WarpCurve):
    """f = sinh(a rho)/a, the constant-curvature -a^2 plane."""
    a: float = 1.0
    kind = "sinh"
    has_closed_curvature = True

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("sinh warp needs a > 0")

    def f(self, rho):
        return np.sinh(self.a * np.asarray(rho, dtype=float)) / self.a

    def df(self, rho):
        return np.cosh(self.a * np.asarray(rho, dtype=float))

    def d2f(self, rho):
        return self.a * np.sinh(self.a * np.asarray(rho, dtype=float))

    def curvature(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), -self.a ** 2)[()]


@dataclass(frozen=True)
class TanhWarp(WarpCurve):
    """f = tanh(a rho)/a, the cigar profile with asymptote 1/a."""
    a: float = 1.0
    kind = "tanh"
    has_closed_curvature = True

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("tanh warp needs a > 0")

    def f(self, rho):
        return np.tanh(self.a * np.asarray(rho, dtype=float)) / self.a

    def df(self, rho):
        return 1.0 / np.cosh(self.a * np.asarray(rho, dtype=float)) ** 2

    def d2f(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return -2.0 * self.a * np.tanh(x) / np.cosh(x) ** 2

    def curvature(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return (2.0 * self.a ** 2 / np.cosh(x) ** 2)[()]


@dataclass(frozen=True)
class TanWarp(WarpCurve):
    """f = tan(a rho)/a on [0, pi/(2a)); blows up at the right endpoint."""
    a: float = 1.0
    kind = "tan"
    has_closed_curvature = True
    open_right = True

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("tan warp needs a > 0")

    @property
    def rho_max(self):
        return math.pi / (2.0 * self.a)

    def f(self, rho):
        return np.tan(self.a * np.asarray(rho, dtype=float)) / self.a

    def df(self, rho):
        return 1.0 / np.cos(self.a * np.asarray(rho, dtype=float)) ** 2

    def d2f(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return 2.0 * self.a * np.tan(x) / np.cos(x) ** 2

    def curvature(self, rho):
        x = self.a * np.asarray(rho, dtype=float)
        return (-2.0 * self.a ** 2 / np.cos(x) ** 2)[()]


@dataclass(frozen=True)
class SinWarp(WarpCurve):
    """f = sin(a rho)/a on [0, pi/a], the round sphere of curvature a^2."""
    a: float = 1.0
    kind = "sin"
    has_closed_curvature = True

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("sin warp needs a > 0")

    @property
    def rho_max(self):
        return math.pi / self.a

    def f(self, rho):
        return np.sin(self.a * np.asarray(rho, dtype=float)) / self.a

    def df(self, rho):
        return np.cos(self.a * np.asarray(rho, dtype=float))

    def d2f(self, rho):
        return -self.a * np.sin(self.a * np.asarray(rho, dtype=float))

    def curvature(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), self.a ** 2)[()]


@dataclass(frozen=True)
class ConstWarp(WarpCurve):
    """f = c, a flat cylinder of circumference 2 pi c."""
    c: float = 1.0
    kind = "const"
    has_closed_curvature = True
    rho_min = -math.inf

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("const warp needs c > 0")

    def f(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), self.c)[()]

    def df(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))[()]

    def d2f(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))[()]

    def curvature(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))[()]


@dataclass(frozen=True)
class LinearWarp(WarpCurve):
    """f = rho, the flat plane in polar coordinates."""
    kind = "linear"
    has_closed_curvature = True

    def f(self, rho):
        return np.asarray(rho, dtype=float)[()]

    def df(self, rho):
        return np.ones_like(np.asarray(rho, dtype=float))[()]

    def d2f(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))[()]

    def curvature(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))[()]


class TabulatedWarp(WarpCurve):
    """Warp interpolated from samples with a cubic spline.

    Derivatives come from the spline, so d2f is only second-order accurate
    in the sample spacing; accuracy is the caller's responsibility.  Interior
    sample values must be positive.
    """

    kind = "tabulated"
    has_closed_curvature = False

    def __init__(self, rho_nodes, f_nodes):
        from scipy.interpolate import CubicSpline

        rho_nodes = np.asarray(rho_nodes, dtype=float)
        f_nodes = np.asarray(f_nodes, dtype=float)
        if rho_nodes.ndim != 1 or rho_nodes.size < 4:
            raise DomainError("tabulated warp needs at least 4 nodes")
        if np.any(np.diff(rho_nodes) <= 0):
            raise DomainError("tabulated warp nodes must increase")
        if np.any(f_nodes[1:-1] <= 0):
            raise DomainError("tabulated warp must be positive on the interior")
        self.rho_nodes = rho_nodes
        self.f_nodes = f_nodes
        self.rho_min = float(rho_nodes[0])
        self.rho_max = float(rho_nodes[-1])
        self._spline = CubicSpline(rho_nodes, f_nodes)
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def f(self, rho):
        return self._spline(rho)[()]

    def df(self, rho):
        return self._d1(rho)[()]

    def d2f(self, rho):
        return self._d2(rho)[()]


def _chain_d(base, rho):
    rho = np.asarray(rho, dtype=float)
    return base.f(rho), base.df(rho), base.d2f(rho)


@dataclass(frozen=True)
class TransformedWarp(WarpCurve):
    """r f / sqrt(kappa^2 f^2 + r^2) with exact chain-rule derivatives.

    Used when the transform of a named family has no closed form.  Carries a
    closed-form curvature whenever the base warp does:

        K_new = r^2 (K_base * D + 3 kappa^2 f'^2) / D^2,   D = kappa^2 f^2 + r^2

    which stays finite at a capped pole.
    """
    base: WarpCurve
    r: float
    kappa: float
    kind = "transformed"

    @property
    def has_closed_curvature(self):
        return self.base.has_closed_curvature

    @property
    def rho_min(self):
        return self.base.rho_min

    @property
    def rho_max(self):
        return self.base.rho_max

    @property
    def open_right(self):
        return self.base.open_right

    def f(self, rho):
        fb = self.base.f(np.asarray(rho, dtype=float))
        d = self.kappa ** 2 * fb ** 2 + self.r ** 2
        return (self.r * fb / np.sqrt(d))[()]

    def df(self, rho):
        fb, dfb, _ = _chain_d(self.base, rho)
        d = self.kappa ** 2 * fb ** 2 + self.r ** 2
        return (self.r ** 3 * dfb * d ** -1.5)[()]

    def d2f(self, rho):
        fb, dfb, d2fb = _chain_d(self.base, rho)
        d = self.kappa ** 2 * fb ** 2 + self.r ** 2
        return (self.r ** 3 * d ** -2.5
                * (d2fb * d - 3.0 * self.kappa ** 2 * fb * dfb ** 2))[()]

    def curvature(self, rho):
        if not self.base.has_closed_curvature:
            return super().curvature(rho)
        fb, dfb, _ = _chain_d(self.base, rho)
        kb = self.base.curvature(rho)
        d = self.kappa ** 2 * fb ** 2 + self.r ** 2
        return (self.r ** 2 * (kb * d + 3.0 * self.kappa ** 2 * dfb ** 2)
                / d ** 2)[()]


@dataclass(frozen=True)
class InverseTransformedWarp(WarpCurve):
    """r f / sqrt(r^2 - kappa^2 f^2), inverting TransformedWarp.

    Only defined while the base warp stays strictly below r/kappa.
    """
    base: WarpCurve
    r: float
    kappa: float
    kind = "inverse-transformed"

    @property
    def has_closed_curvature(self):
        return self.base.has_closed_curvature

    @property
    def rho_min(self):
        return self.base.rho_min

    @property
    def rho_max(self):
        return self.base.rho_max

    @property
    def open_right(self):
        return self.base.open_right

    def _margin(self, fb):
        e = self.r ** 2 - self.kappa ** 2 * fb ** 2
        if np.any(e <= 0):
            raise NotInRangeError(
                "warp reaches the asymptote r/kappa; inverse undefined")
        return e

    def f(self, rho):
        fb = self.base.f(np.asarray(rho, dtype=float))
        e = self._margin(fb)
        return (self.r * fb / np.sqrt(e))[()]

    def df(self, rho):
        fb, dfb, _ = _chain_d(self.base, rho)
        e = self._margin(fb)
        return (self.r ** 3 * dfb * e ** -1.5)[()]

    def d2f(self, rho):
        fb, dfb, d2fb = _chain_d(self.base, rho)
        e = self._margin(fb)
        return (self.r ** 3 * e ** -2.5
                * (d2fb * e + 3.0 * self.kappa ** 2 * fb * dfb ** 2))[()]

    def curvature(self, rho):
        if not self.base.has_closed_curvature:
            return super().curvature(rho)
        fb, dfb, _ = _chain_d(self.base, rho)
        kb = self.base.curvature(rho)
        e = self._margin(fb)
        return (self.r ** 2 * (kb * e - 3.0 * self.kappa ** 2 * dfb ** 2)
                / e ** 2)[()]


_FAMILIES = {
    "sinh": lambda a: SinhWarp(a),
    "tanh": lambda a: TanhWarp(a),
    "tan": lambda a: TanWarp(a),
    "sin": lambda a: SinWarp(a),
    "const": lambda a: ConstWarp(a),
    "linear": lambda a: LinearWarp(),
}


def make_warp(family: str, a: float = 1.0) -> WarpCurve:
    """Build a named warp; `a` is the family parameter (the constant for
    const, ignored for linear)."""
    try:
        ctor = _FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown warp family {family!r}") from None
    return ctor(float(a))


def warp_from_json(obj) -> WarpCurve:
    """Decode {"family": ..., "a": ...} into a warp curve."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise DomainError("warp spec must be an object with a 'family' key")
    return make_warp(obj["family"], obj.get("a", 1.0))


# ---------------------------------------------------------------------------
# metrics and transform parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotSymMetric:
    """Metric d rho^2 + f^2 d theta^2 on a finite rho interval.

    capped_at_origin means rho_min = 0 and the pole closes up smoothly,
    which requires f(0) = 0 and f'(0) = 1 within 1e-10.
    """
    warp: WarpCurve
    rho_min: float
    rho_max: float
    capped_at_origin: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.rho_min) and math.isfinite(self.rho_max)):
            raise DomainError("metric interval must be finite; truncate "
                              "noncompact warps explicitly")
        if not self.rho_min < self.rho_max:
            raise DomainError("need rho_min < rho_max")
        if self.rho_min < self.warp.rho_min - 1e-12:
            raise DomainError("rho_min below the warp's natural domain")
        if self.warp.open_right:
            if self.rho_max >= self.warp.rho_max:
                raise DomainError("rho_max must stay strictly below the "
                                  "warp's blow-up point")
        elif self.rho_max > self.warp.rho_max + 1e-12:
            raise DomainError("rho_max beyond the warp's natural domain")
        if self.capped_at_origin:
            if self.rho_min != 0.0:
                raise DomainError("capped metric must start at rho = 0")
            if not self.warp.caps_at_origin():
                raise InvalidMetricError(
                    "cap requires f(0) = 0 and f'(0) = 1 within 1e-10")

    def contains(self, rho) -> bool:
        rho = np.asarray(rho, dtype=float)
        return bool(np.all((rho >= self.rho_min - 1e-12)
                           & (rho <= self.rho_max + 1e-12)))


def metric_from_warp(warp: WarpCurve, rho_max: float,
                     rho_min: float = 0.0) -> RotSymMetric:
    """Convenience constructor; detects a smooth cap at rho_min = 0."""
    capped = rho_min == 0.0 and warp.caps_at_origin()
    return RotSymMetric(warp, rho_min, rho_max, capped)


@dataclass(frozen=True)
class TransformParams:
    """Circle radius r > 0 and slope kappa >= 0, optionally as a rational
    pair kappa = m1/m2 used by quotient experiments."""
    r: float
    kappa: float
    m1: int | None = None
    m2: int | None = None

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("need r > 0")
        if self.kappa < 0:
            raise DomainError("need kappa >= 0")
        if (self.m1 is None) != (self.m2 is None):
            raise DomainError("give both of m1, m2 or neither")
        if self.m1 is not None:
            if self.m1 < 0 or self.m2 <= 0:
                raise DomainError("need m1 >= 0 and m2 >= 1")
            if self.kappa != self.m1 / self.m2:
                raise DomainError("kappa must equal m1/m2 exactly")

    @classmethod
    def from_slope_pair(cls, m1: int, m2: int, r: float) -> "TransformParams":
        return cls(r=r, kappa=m1 / m2, m1=m1, m2=m2)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def eval_warp(metric: RotSymMetric, rho):
    """Return (f, f', f'') at rho, raising DomainError outside the interval."""
    if not metric.contains(rho):
        raise DomainError(f"rho = {rho} outside "
                          f"[{metric.rho_min}, {metric.rho_max}]")
    w = metric.warp
    rho = np.asarray(rho, dtype=float)
    return w.f(rho), w.df(rho), w.d2f(rho)


def gauss_curvature(metric: RotSymMetric, rho):
    """Gauss curvature K = -f''/f.

    Closed-form families (and transforms of them) answer anywhere in the
    domain, including a capped pole.  Otherwise f must exceed DELTA_CAP.
    """
    if not metric.contains(rho):
        raise DomainError(f"rho = {rho} outside "
                          f"[{metric.rho_min}, {metric.rho_max}]")
    w = metric.warp
    if w.has_closed_curvature:
        return w.curvature(np.asarray(rho, dtype=float))
    fv = np.asarray(w.f(rho), dtype=float)
    if np.any(fv <= DELTA_CAP):
        raise PoleProximityError(
            f"f <= {DELTA_CAP} at rho = {rho}; too close to the pole for "
            "-f''/f without a closed form")
    return (-np.asarray(w.d2f(rho), dtype=float) / fv)[()]


def scalar_curvature(metric: RotSymMetric, rho):
    """Scalar curvature of the surface, R = 2K."""
    return 2.0 * gauss_curvature(metric, rho)


def transformed_warp(warp: WarpCurve, r: float, kappa: float) -> WarpCurve:
    """Warp-level transform r f / sqrt(kappa^2 f^2 + r^2).

    kappa = 0 returns the warp unchanged (identity, exactly).  Known closed
    forms are promoted to named families:

        sinh(a)  ->  tanh(a)   when kappa = a r
        tan(a)   ->  sin(a)    when kappa = a r
        const c  ->  const r c / sqrt(kappa^2 c^2 + r^2)

    everything else becomes a TransformedWarp with chain-rule derivatives.
    """
    if r <= 0:
        raise DomainError("need r > 0")
    if kappa < 0:
        raise DomainError("need kappa >= 0")
    if kappa == 0.0:
        return warp
    if isinstance(warp, ConstWarp):
        c = warp.c
        return ConstWarp(r * c / math.sqrt(kappa ** 2 * c ** 2 + r ** 2))
    if isinstance(warp, SinhWarp) and kappa == warp.a * r:
        return TanhWarp(warp.a)
    if isinstance(warp, TanWarp) and kappa == warp.a * r:
        return SinWarp(warp.a)
    return TransformedWarp(warp, r, kappa)


def inverse_transformed_warp(warp: WarpCurve, r: float,
                             kappa: float) -> WarpCurve:
    """Inverse of transformed_warp; requires f < r/kappa wherever evaluated."""
    if r <= 0:
        raise DomainError("need r > 0")
    if kappa < 0:
        raise DomainError("need kappa >= 0")
    if kappa == 0.0:
        return warp
    if isinstance(warp, ConstWarp):
        c = warp.c
        margin = r ** 2 - kappa ** 2 * c ** 2
        if margin <= 0:
            raise NotInRangeError("constant warp at or above r/kappa")
        return ConstWarp(r * c / math.sqrt(margin))
    if isinstance(warp, TanhWarp) and kappa == warp.a * r:
        return SinhWarp(warp.a)
    if isinstance(warp, SinWarp) and kappa == warp.a * r:
        return TanWarp(warp.a)
    return InverseTransformedWarp(warp, r, kappa)


_RANGE_SCAN = 257  # grid used to certify f < r/kappa on the interval


def quotient_transform(metric: RotSymMetric,
                       params: TransformParams) -> RotSymMetric:
    """Transform the metric by the slope-kappa circle quotient.

    The rho interval and the cap flag are preserved: the pole stays a smooth
    pole (f'(0) = r^3/r^3 = 1) and the transform is the identity for
    kappa = 0.
    """
    new_warp = transformed_warp(metric.warp, params.r, params.kappa)
    return RotSymMetric(new_warp, metric.rho_min, metric.rho_max,
                        metric.capped_at_origin)


def inverse_transform(metric: RotSymMetric,
                      params: TransformParams) -> RotSymMetric:
    """Invert quotient_transform.

    Raises NotInRangeError if the warp meets or exceeds the asymptote
    r/kappa anywhere on the interval (checked on a scan grid and again at
    every later evaluation).
    """
    if params.kappa > 0:
        grid = np.linspace(metric.rho_min, metric.rho_max, _RANGE_SCAN)
        fv = np.asarray(metric.warp.f(grid), dtype=float)
        if np.any(fv >= params.r / params.kappa):
            raise NotInRangeError(
                "warp reaches r/kappa on the interval; no preimage")
    new_warp = inverse_transformed_warp(metric.warp, params.r, params.kappa)
    return RotSymMetric(new_warp, metric.rho_min, metric.rho_max,
                        metric.capped_at_origin)


def quotient_circle_radius(r1: float, r2: float, kappa: float) -> float:
    """Radius of the circle obtained by the slope-kappa quotient of the flat
    torus S^1(r1) x S^1(r2):  sqrt(r1^2 r2^2 / (kappa^2 r1^2 + r2^2))."""
    if r1 <= 0 or r2 <= 0:
        raise DomainError("need r1, r2 > 0")
    if kappa < 0:
        raise DomainError("need kappa >= 0")
    return math.sqrt(r1 ** 2 * r2 ** 2 / (kappa ** 2 * r1 ** 2 + r2 ** 2))


def asymptote_radius(params: TransformParams) -> float:
    """Upper bound r/kappa of any transformed warp; kappa = 0 has none."""
    if params.kappa == 0:
        raise NoAsymptoteError("identity transform has no asymptote")
    return params.r / params.kappa
