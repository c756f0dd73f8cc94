"""Feasible end-effector positions for a fixed tool orientation.

The analytic check covers the two orientations where the wrist-center
equations reduce by hand (tool axis vertical or horizontal). It is a
necessary condition for a real wrist center, not a guarantee that the full
inverse problem is solvable. For any other orientation only the numeric
probe `empirical_feasibility` is available, and it is a sample, not a proof.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from cobotpath.ik import N3_TOL, inverse_kinematics
from cobotpath.kinematics import Pose, RobotGeometry


class InvalidDirectionError(ValueError):
    pass


class RegionStatus(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RegionVerdict:
    status: RegionStatus
    margin: float | None = None  # p1^2 + p2^2 - d4^2 [mm^2], vertical tool only

    @property
    def feasible(self) -> bool:
        return self.status is RegionStatus.FEASIBLE


def region_check(p, n, geom: RobotGeometry) -> RegionVerdict:
    p = np.asarray(p, dtype=float)
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise InvalidDirectionError(f"tool axis must be a unit vector, |n| = {np.linalg.norm(n)}")
    if abs(abs(n[2]) - 1.0) < N3_TOL:
        margin = float(p[0] ** 2 + p[1] ** 2 - geom.d4**2)
        status = RegionStatus.FEASIBLE if margin >= 0 else RegionStatus.INFEASIBLE
        return RegionVerdict(status, margin)
    if abs(n[2]) < N3_TOL:
        return RegionVerdict(RegionStatus.FEASIBLE)
    return RegionVerdict(RegionStatus.UNKNOWN)


def empirical_feasibility(p, orientation, geom: RobotGeometry) -> bool:
    """True when the IK solver finds at least one verified solution."""
    return len(inverse_kinematics(Pose(p, orientation), geom)) > 0


def boundary_circle(geom: RobotGeometry, n_points: int = 360) -> np.ndarray:
    """(angle, x, y) samples of the cylinder p1^2 + p2^2 = d4^2, for plotting."""
    a = np.linspace(0.0, 2 * np.pi, n_points, endpoint=False)
    return np.column_stack([a, geom.d4 * np.cos(a), geom.d4 * np.sin(a)])
