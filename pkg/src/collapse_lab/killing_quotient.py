"""Pointwise linear algebra of circle quotients.

Quotienting (M, g) x S^1(r) by the diagonal action generated by a Killing
field K (slope kappa) changes the metric at each point by a rank-one
correction:

    h = g - kappa^2 / (kappa^2 |K|_g^2 + r^2) * (gK) (gK)^T.

The same tensor arises as the induced metric on the g-orthogonal complement
of the orbit directions inside a product, which quotient_metric_form computes
for an explicit orbit basis; transform_killing and quotient_metric_form agree
wherever both apply, and both stay positive definite with

    lambda_min(h) >= r^2 / (kappa^2 |K|^2 + r^2) * lambda_min(g).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateBasisError,
    DomainError,
    GramConditionWarning,
    InvalidMetricError,
    TransversalityError,
)

_SYM_TOL = 1e-12
_COND_WARN = 1e12


@dataclass(frozen=True)
class PointMetric:
    """Symmetric positive definite matrix: a metric at one point.

    Construction validates symmetry (to 1e-12, relative) and positive
    definiteness (Cholesky).
    """
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidMetricError("metric must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > _SYM_TOL * scale:
            raise InvalidMetricError("metric must be symmetric to 1e-12")
        m = 0.5 * (m + m.T)
        try:
            scipy.linalg.cholesky(m, lower=True)
        except scipy.linalg.LinAlgError:
            raise InvalidMetricError("metric must be positive definite") from None
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inner(self, x, y) -> float:
        return float(np.asarray(x, dtype=float)
                     @ self.matrix @ np.asarray(y, dtype=float))


@dataclass(frozen=True)
class KillingVector:
    """Components of a Killing field evaluated at one point."""
    components: np.ndarray

    def __post_init__(self):
        v = np.array(self.components, dtype=float)
        if v.ndim != 1:
            raise DomainError("Killing vector must be one-dimensional")
        v.setflags(write=False)
        object.__setattr__(self, "components", v)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.components, dtype=dtype)


@dataclass(frozen=True)
class OrbitBasis:
    """Rows span the orbit directions of the collapsing action at a point.

    Linear independence under the ambient metric (positive definite Gram)
    is enforced where the basis is used, not at construction.
    """
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2:
            raise DomainError("orbit basis must be a 2d array of row vectors")
        if v.shape[0] == 0 or v.shape[0] > v.shape[1]:
            raise DomainError("need 1 <= #vectors <= ambient dimension")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _as_metric(g) -> PointMetric:
    return g if isinstance(g, PointMetric) else PointMetric(np.asarray(g))


def _as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def transform_killing(g, killing, r: float, kappa: float) -> PointMetric:
    """Pointwise quotient metric h = g - c (gK)(gK)^T with
    c = kappa^2 / (kappa^2 g(K,K) + r^2).

    Identity for kappa = 0 as well as for K = 0.  The result is symmetric
    positive definite whenever g is.
    """
    gm = _as_metric(g)
    k = _as_vector(killing)
    if k.shape != (gm.dim,):
        raise DomainError("Killing vector dimension mismatch")
    if r <= 0:
        raise DomainError("need r > 0")
    if kappa < 0:
        raise DomainError("need kappa >= 0")
    gk = gm.matrix @ k
    norm2 = float(k @ gk)
    c = kappa ** 2 / (kappa ** 2 * norm2 + r ** 2)
    h = gm.matrix - c * np.outer(gk, gk)
    return PointMetric(h)


def _gram_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the SPD Gram system, failing loudly on degeneracy."""
    cond = np.linalg.cond(gram)
    if cond > _COND_WARN:
        warnings.warn(f"orbit-basis Gram condition {cond:.3g} exceeds 1e12",
                      GramConditionWarning, stacklevel=3)
    try:
        cf = scipy.linalg.cho_factor(gram)
    except scipy.linalg.LinAlgError:
        raise DegenerateBasisError(
            "orbit basis is metric-degenerate (Gram not SPD)") from None
    return scipy.linalg.cho_solve(cf, rhs)


def project_onto_complement(g_prod, basis: OrbitBasis, x) -> np.ndarray:
    """Component of x orthogonal (w.r.t. g_prod) to the orbit basis.

    Solves the Gram system (V G V^T) alpha = V G x and returns
    x - V^T alpha.  Idempotent; returns the zero vector on basis members.
    """
    gm = _as_metric(g_prod)
    x = _as_vector(x)
    v = basis.vectors
    if v.shape[1] != gm.dim or x.shape != (gm.dim,):
        raise DomainError("dimension mismatch between metric, basis, vector")
    gv = v @ gm.matrix             # (m, n)
    gram = gv @ v.T                # (m, m)
    alpha = _gram_solve(gram, gv @ x)
    return x - v.T @ alpha


def quotient_metric_form(g_prod, basis: OrbitBasis, frame) -> PointMetric:
    """Quotient metric entries h_ij = g(Xi_perp, Xj_perp) for a frame of
    directions transverse to the orbit basis.

    The basis rows together with the frame rows must span the ambient space
    (otherwise TransversalityError); then h is positive definite and is
    returned as a PointMetric.
    """
    gm = _as_metric(g_prod)
    frame = np.asarray(frame, dtype=float)
    if frame.ndim != 2 or frame.shape[1] != gm.dim:
        raise DomainError("frame must be rows of ambient vectors")
    if basis.count + frame.shape[0] != gm.dim:
        raise TransversalityError(
            "orbit basis plus frame must have exactly ambient dimension")
    span = np.vstack([basis.vectors, frame])
    if np.linalg.matrix_rank(span) < gm.dim:
        raise TransversalityError("orbit basis plus frame fails to span")
    proj = np.array([project_onto_complement(gm, basis, x) for x in frame])
    h = proj @ gm.matrix @ proj.T
    h = 0.5 * (h + h.T)
    return PointMetric(h)


def circle_quotient_pushforward(f_val: float, r: float):
    """Pushforward of the coordinate frame under the circle quotient of
    d rho^2 + f^2 d theta^2 + r^2 ds^2 along the unit field
    W = (d_theta + d_s)/sqrt(f^2 + r^2).

    Returns (p_rho, p_theta, p_s, h) where the p_* are the images of the
    coordinate vectors (components in the (rho, theta, s) frame, computed
    as V - g(V, W) W) and h is the quotient metric form

        diag(1, r^2 f^2 / (f^2 + r^2))

    assembled from the pushforwards, not from the closed form.
    """
    if f_val <= 0 or r <= 0:
        raise DomainError("need f > 0 and r > 0")
    g = np.diag([1.0, f_val ** 2, r ** 2])
    denom = f_val ** 2 + r ** 2
    w = np.array([0.0, 1.0, 1.0]) / np.sqrt(denom)

    def push(v):
        return v - (v @ g @ w) * w

    p_rho = push(np.array([1.0, 0.0, 0.0]))
    p_theta = push(np.array([0.0, 1.0, 0.0]))
    p_s = push(np.array([0.0, 0.0, 1.0]))
    h = np.array([[p_rho @ g @ p_rho, p_rho @ g @ p_theta],
                  [p_theta @ g @ p_rho, p_theta @ g @ p_theta]])
    h = 0.5 * (h + h.T)
    return p_rho, p_theta, p_s, PointMetric(h)
