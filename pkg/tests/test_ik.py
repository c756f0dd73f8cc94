import numpy as np
import pytest

from cobotpath.ik import (
    DegeneratePoseError,
    classify_n3,
    inverse_kinematics,
    solve_joint_angles,
    solve_wrist_center,
)
from cobotpath.kinematics import (
    Pose,
    WristCenter,
    forward_kinematics,
    pose_error,
    residuals_F,
    rpy_to_orientation,
    wrist_residuals,
)
from conftest import random_q

VERTICAL = np.eye(3)
# l = y, m = z, n = x
HORIZONTAL_X = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def test_classify_n3():
    assert classify_n3(1.0) == "vertical"
    assert classify_n3(-1.0) == "vertical"
    assert classify_n3(0.0) == "horizontal"
    assert classify_n3(0.5) == "general"


def test_wrist_center_degenerate_on_axis(geom):
    with pytest.raises(DegeneratePoseError):
        solve_wrist_center(Pose([0, 0, 300], VERTICAL), geom)
    ik = inverse_kinematics(Pose([0, 0, 300], VERTICAL), geom)
    assert len(ik) == 0
    assert any("Degenerate" in d for d in ik.diagnostics)


def test_wrist_center_vertical_equations(geom):
    p1, p2 = 100.0, 200.0
    centers = solve_wrist_center(Pose([p1, p2, 300], VERTICAL), geom)
    assert centers
    for P in centers:
        x, y = P.x, P.y
        assert abs(((y * p1 - x * p2) ** 2 - geom.d4**2 * geom.d5**2) / geom.d5**4) < 1e-8
        assert abs(((p1 - x) ** 2 + (p2 - y) ** 2 - geom.d5**2) / geom.d5**2) < 1e-8


def test_wrist_center_horizontal_closed_form(geom):
    centers = solve_wrist_center(Pose([100, 0, 100], HORIZONTAL_X), geom)
    assert len(centers) == 2
    for P in centers:
        assert P.x == pytest.approx(100 - geom.d6, abs=1e-12)
        assert P.y == pytest.approx(0.0, abs=1e-12)
    assert sorted(P.z for P in centers) == pytest.approx([100 - geom.d5, 100 + geom.d5], abs=1e-12)


def test_wrist_centers_satisfy_equations_general(geom, rng):
    for q in random_q(rng, 30):
        pose, P_true = forward_kinematics(geom, q)
        centers = solve_wrist_center(pose, geom)
        assert any(np.max(np.abs(P.P - P_true.P)) < 1e-6 for P in centers)
        for P in centers:
            assert np.max(np.abs(wrist_residuals(geom, pose, P))) < 1e-8


def test_closed_form_agrees_with_circle_solver_at_vertical(geom):
    for p in ([100, 200, 300], [-150, -200, 100], [80, -40, 50]):
        pose = Pose(p, VERTICAL)
        a = solve_wrist_center(pose, geom)
        b = solve_wrist_center(pose, geom, method="general")
        assert len(a) == len(b)
        for Pa, Pb in zip(a, b):
            assert np.max(np.abs(Pa.P - Pb.P)) < 1e-5


def test_closed_form_near_vertical_continuity(geom):
    # a tilt of 1e-9 in n3 is ~4.5e-5 rad; P moves by about d6 * tilt
    tilt = np.arccos(1 - 1e-9)
    R = rpy_to_orientation(tilt, 0, 0)
    exact = solve_wrist_center(Pose([100, 200, 300], VERTICAL), geom)
    near = solve_wrist_center(Pose([100, 200, 300], R), geom, method="general")
    assert len(exact) == len(near)
    for Pa, Pb in zip(exact, near):
        assert np.max(np.abs(Pa.P - Pb.P)) < 1e-2


def test_solve_joint_angles_round_trip(geom, rng):
    for q in random_q(rng, 30):
        pose, P = forward_kinematics(geom, q)
        sols = solve_joint_angles(pose, P, geom)
        assert any(np.max(np.abs(np.angle(np.exp(1j * (s.theta - q))))) < 1e-6 for s in sols)
        for s in sols:
            s6 = pose.l @ (P.P - pose.p) / geom.d5
            assert np.sin(s.theta[5]) == pytest.approx(s6, abs=1e-9)


def test_solve_joint_angles_out_of_reach(geom):
    pose = Pose([100, 200, 300], VERTICAL)
    diag = []
    far = WristCenter([1000.0, 1000.0, 1000.0])
    assert solve_joint_angles(pose, far, geom, diagnostics=diag) == []
    assert any("out of reach" in d or "s6^2" in d for d in diag)


def test_ik_waypoint_a(geom):
    pose = Pose([100, 200, 300], VERTICAL)
    ik = inverse_kinematics(pose, geom)
    assert len(ik) > 0
    for q in ik:
        pe, oe = pose_error(geom, q, pose)
        assert pe < 1e-6 and oe < 1e-9


def test_ik_inside_cylinder_is_empty(geom):
    assert len(inverse_kinematics(Pose([30, 30, 100], VERTICAL), geom)) == 0


def test_ik_deterministic(geom):
    pose = Pose([100, 200, 300], VERTICAL)
    a = inverse_kinematics(pose, geom)
    b = inverse_kinematics(pose, geom)
    assert a.solutions == b.solutions


def test_ik_canonical_order_and_dedup(geom, rng):
    for q in random_q(rng, 30):
        pose, _ = forward_kinematics(geom, q)
        sols = inverse_kinematics(pose, geom).solutions
        keys = [tuple(np.round(s.theta, 9)) for s in sols]
        assert keys == sorted(keys)
        for i in range(len(sols)):
            for j in range(i + 1, len(sols)):
                assert sols[i].distance(sols[j]) > 1e-6


def test_ik_round_trip_residuals(geom, rng):
    for q in random_q(rng, 100):
        pose, _ = forward_kinematics(geom, q)
        ik = inverse_kinematics(pose, geom)
        assert ik.contains(q, 1e-6)
        assert len(ik) % 2 == 0
        for s in ik:
            _, P = forward_kinematics(geom, s)
            assert np.max(np.abs(residuals_F(geom, s, pose, P))) < 1e-6
            assert np.max(np.abs(wrist_residuals(geom, pose, P))) < 1e-8


def test_wrist_singularity_flagged(geom):
    # n3 = 0 with the tool axis along a link direction leaves theta5 free
    q = np.array([0.3, -0.4, 0.5, -0.1, 0.0, 0.2])
    pose, _ = forward_kinematics(geom, q)
    ik = inverse_kinematics(pose, geom)
    assert ik.wrist_singular
    assert any("WristSingularity" in d for d in ik.diagnostics)
    assert len(ik) > 0
    for s in ik:
        pe, oe = pose_error(geom, s, pose)
        assert pe < 1e-6 and oe < 1e-9
