"""Quaternion 3-sphere: left-invariant frame, bracket relations, Berger
norms, the fibration to the 2-sphere, and slope quotients."""

import math

import numpy as np
import pytest

from collapse_lab import (
    BergerMetric,
    DomainError,
    QuotientCollapseError,
    SlopeAngle,
    TangencyError,
    UnitQuaternion,
    berger_norm,
    bracket_check,
    find_submersion_radius,
    frame_at,
    hopf_map,
    hopf_pushforward,
    quat_mul,
    slope_quotient_metric,
    submersion_distortion,
    submersion_radius_scan,
    transform_killing,
)

E0 = np.array([1.0, 0.0, 0.0, 0.0])
E1 = np.array([0.0, 1.0, 0.0, 0.0])
E2 = np.array([0.0, 0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# quaternion algebra
# ---------------------------------------------------------------------------

def test_quat_multiplication_table():
    np.testing.assert_array_equal(quat_mul(E1, E2), E3)
    np.testing.assert_array_equal(quat_mul(E2, E3), E1)
    np.testing.assert_array_equal(quat_mul(E3, E1), E2)
    np.testing.assert_array_equal(quat_mul(E2, E1), -E3)
    for e in (E1, E2, E3):
        np.testing.assert_array_equal(quat_mul(e, e), -E0)
        np.testing.assert_array_equal(quat_mul(E0, e), e)
        np.testing.assert_array_equal(quat_mul(e, E0), e)


def test_quat_mul_norm_and_associativity():
    rng = np.random.default_rng(2)
    for _ in range(30):
        p, q, s = rng.normal(size=(3, 4))
        np.testing.assert_allclose(
            np.linalg.norm(quat_mul(p, q)),
            np.linalg.norm(p) * np.linalg.norm(q), rtol=1e-13)
        np.testing.assert_allclose(quat_mul(quat_mul(p, q), s),
                                   quat_mul(p, quat_mul(q, s)), atol=1e-12)


def test_unit_quaternion_validation():
    q = UnitQuaternion.identity()
    np.testing.assert_array_equal(np.asarray(q), E0)
    with pytest.raises(DomainError):
        UnitQuaternion(np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        UnitQuaternion(np.array([1.0, 0.0, 0.0]))
    rng = np.random.default_rng(4)
    for _ in range(10):
        q = UnitQuaternion.random(rng)
        assert abs(np.asarray(q) @ np.asarray(q) - 1.0) <= 1e-12


# ---------------------------------------------------------------------------
# the left-invariant frame
# ---------------------------------------------------------------------------

def test_frame_at_identity():
    fr = frame_at(E0)
    np.testing.assert_array_equal(fr, np.vstack([E1, E2, E3]))


def test_frame_orthonormal_and_tangent():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        fr = frame_at(q)
        gram = fr @ fr.T
        assert np.max(np.abs(gram - np.eye(3))) <= 1e-12
        assert np.max(np.abs(fr @ q)) <= 1e-12


def test_bracket_relations_small_deviation():
    rng = np.random.default_rng(12)
    assert bracket_check(E0, 1, 2, step=1e-4) <= 1e-7
    for _ in range(5):
        q = UnitQuaternion.random(rng)
        assert bracket_check(q, 2, 3, step=1e-4) <= 1e-7
        assert bracket_check(q, 3, 1, step=1e-4) <= 1e-7
        assert bracket_check(q, 2, 1, step=1e-4) <= 1e-7   # reversed pair


def test_bracket_deviation_is_second_order():
    """Halving the step divides the deviation by ~4."""
    q = UnitQuaternion.random(np.random.default_rng(16))
    devs = [bracket_check(q, 1, 2, step=s) for s in (1e-2, 5e-3, 2.5e-3)]
    for coarse, fine in zip(devs, devs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_bracket_same_index_vanishes():
    q = UnitQuaternion.random(np.random.default_rng(20))
    for i in (1, 2, 3):
        assert bracket_check(q, i, i, step=1e-2) <= 1e-9


def test_bracket_argument_validation():
    with pytest.raises(DomainError):
        bracket_check(E0, 0, 1)
    with pytest.raises(DomainError):
        bracket_check(E0, 1, 4)
    with pytest.raises(DomainError):
        bracket_check(E0, 1, 2, step=0.0)


# ---------------------------------------------------------------------------
# Berger norms
# ---------------------------------------------------------------------------

def test_berger_norm_round_metric():
    rng = np.random.default_rng(24)
    metric = BergerMetric(1.0, 1.0, 1.0)
    for _ in range(20):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        c = rng.normal(size=3)
        v = c @ frame_at(q)
        v /= np.linalg.norm(v)
        assert berger_norm(metric, q, v) == pytest.approx(1.0, abs=1e-12)


def test_berger_norm_weighted_directions():
    kappa = 1.3
    metric = BergerMetric(1.0 / (kappa ** 2 + 1.0), 1.0, 1.0)
    q = UnitQuaternion.random(np.random.default_rng(28))
    f1, f2, _ = frame_at(q)
    assert berger_norm(metric, q, f1) == pytest.approx(
        1.0 / math.sqrt(kappa ** 2 + 1.0), rel=1e-13)
    assert berger_norm(BergerMetric(1.0, 4.0, 1.0), q, 2.0 * f2) \
        == pytest.approx(4.0, rel=1e-13)


def test_berger_norm_rejects_non_tangent():
    metric = BergerMetric(1.0, 1.0, 1.0)
    with pytest.raises(TangencyError):
        berger_norm(metric, E0, E0)
    with pytest.raises(DomainError):
        BergerMetric(0.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# the fibration to S^2
# ---------------------------------------------------------------------------

def test_hopf_map_reference_points():
    np.testing.assert_allclose(hopf_map(E0), [0.0, 0.0, 1.0], atol=1e-15)
    # z = w = 1/sqrt(2)
    q = np.array([1.0, 0.0, 1.0, 0.0]) / math.sqrt(2.0)
    np.testing.assert_allclose(hopf_map(q), [1.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(hopf_map(E3), [0.0, 0.0, -1.0], atol=1e-15)


def test_hopf_map_lands_on_unit_sphere():
    rng = np.random.default_rng(32)
    for _ in range(1000):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        img = hopf_map(q)
        assert abs(img @ img - 1.0) <= 1e-12


def test_hopf_map_constant_on_fibers():
    """Right flow by cos t + e_1 sin t preserves the image."""
    rng = np.random.default_rng(36)
    ts = np.linspace(0.0, 2.0 * math.pi, 17, endpoint=False)
    for _ in range(25):
        q = np.asarray(UnitQuaternion.random(rng))
        img = hopf_map(q)
        for t in ts:
            moved = quat_mul(q, np.array([math.cos(t), math.sin(t), 0.0, 0.0]))
            assert np.max(np.abs(hopf_map(moved) - img)) <= 1e-10


def test_hopf_pushforward_directions():
    rng = np.random.default_rng(40)
    for _ in range(15):
        q = np.asarray(UnitQuaternion.random(rng))
        f1, f2, f3 = frame_at(q)
        # fiber direction dies, horizontal frame doubles in length
        assert np.linalg.norm(hopf_pushforward(q, f1)) <= 1e-8
        assert np.linalg.norm(hopf_pushforward(q, f2)) \
            == pytest.approx(2.0, abs=1e-8)
        assert np.linalg.norm(hopf_pushforward(q, f3)) \
            == pytest.approx(2.0, abs=1e-8)
        np.testing.assert_array_equal(hopf_pushforward(q, np.zeros(4)),
                                      np.zeros(3))
        # image is tangent to the target sphere
        assert abs(hopf_pushforward(q, f2) @ hopf_map(q)) <= 1e-8


# ---------------------------------------------------------------------------
# submersion distortion scans
# ---------------------------------------------------------------------------

def test_submersion_radius_found_for_equal_bc():
    """B = C admits a submersion; the best radius is 1/2 and independent
    of the collapsing weight A."""
    for metric in (BergerMetric(0.2, 1.0, 1.0), BergerMetric(1.0, 1.0, 1.0)):
        radius, dist = find_submersion_radius(metric, samples=200, seed=0)
        assert radius == pytest.approx(0.5, abs=1e-6)
        assert dist <= 1e-5


def test_submersion_negative_control():
    """B != C is never a submersion onto a round sphere."""
    metric = BergerMetric(1.0, 1.0, 2.0)
    _, best = find_submersion_radius(metric, samples=200, seed=0)
    assert best >= 0.05
    for radius in (0.25, 0.5, 1.0, 2.0):
        assert submersion_distortion(metric, radius, samples=200, seed=0) \
            >= 0.1


def test_submersion_scan_shape_and_determinism():
    metric = BergerMetric(0.2, 1.0, 1.0)
    radii = np.linspace(0.1, 1.5, 29)
    scan1 = submersion_radius_scan(metric, radii, samples=50, seed=3)
    scan2 = submersion_radius_scan(metric, radii, samples=50, seed=3)
    np.testing.assert_array_equal(scan1, scan2)
    k = int(np.argmin(scan1))
    assert 0 < k < len(radii) - 1          # interior minimum
    assert np.all(np.diff(scan1[:k + 1]) <= 0)
    assert np.all(np.diff(scan1[k:]) >= 0)
    with pytest.raises(DomainError):
        submersion_radius_scan(metric, [0.5, -1.0])
    with pytest.raises(DomainError):
        submersion_distortion(metric, 0.0)


# ---------------------------------------------------------------------------
# slope quotients
# ---------------------------------------------------------------------------

def test_slope_quotient_reference_values():
    m = slope_quotient_metric(math.pi / 2)
    assert (m.A, m.B, m.C) == (1.0, 1.0, 1.0)
    m = slope_quotient_metric(3.0 * math.pi / 2)
    assert m.A == pytest.approx(1.0, abs=1e-15)
    m = slope_quotient_metric(math.pi / 4)
    assert m.A == pytest.approx(0.5, abs=1e-12)
    assert m.B == 1.0 and m.C == 1.0


def test_slope_quotient_collapse_regime():
    # slope -> 0: the first weight shrinks to sin^2(xi)
    for xi in (0.3, 0.05, 1e-3):
        m = slope_quotient_metric(xi)
        assert m.A == pytest.approx(math.sin(xi) ** 2, rel=1e-9)
    with pytest.raises(QuotientCollapseError):
        slope_quotient_metric(0.0)
    with pytest.raises(QuotientCollapseError):
        slope_quotient_metric(math.pi)


def test_slope_quotient_agrees_with_rank_one_transform():
    for xi in np.linspace(0.05, math.pi / 2, 20):
        m = slope_quotient_metric(float(xi))
        kappa = abs(math.cos(xi) / math.sin(xi))
        h = transform_killing(np.eye(3), [1.0, 0.0, 0.0], 1.0, kappa)
        assert abs(m.A - h.matrix[0, 0]) <= 1e-12


def test_slope_angle_type():
    m = slope_quotient_metric(SlopeAngle(math.pi / 2))
    assert m.A == 1.0
    with pytest.raises(DomainError):
        SlopeAngle(-0.1)
    with pytest.raises(DomainError):
        SlopeAngle(2.0 * math.pi)
