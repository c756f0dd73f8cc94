"""Inverse kinematics, straight-line trajectory planning and layered-graph
path optimisation for the myCobot 280 six-axis arm."""

from cobotpath.ik import IkSolutionSet, inverse_kinematics, solve_joint_angles, solve_wrist_center
from cobotpath.kinematics import (
    DHRow,
    JointConfig,
    Pose,
    RobotGeometry,
    WristCenter,
    dh_transform,
    forward_kinematics,
    manipulability,
    position_jacobian,
    residuals_F,
    rpy_to_orientation,
    wrap_angle,
)
from cobotpath.pathopt import (
    CostFunctionSpec,
    CostKind,
    DisconnectedLayerError,
    SolutionGraph,
    brute_force_path,
    build_graph,
    edge_cost,
    random_path,
    shortest_path,
)
from cobotpath.region import RegionStatus, empirical_feasibility, region_check
from cobotpath.trajectory import Profile, Scenario, plan_trajectory

__version__ = "0.1.0"

__all__ = [
    "CostFunctionSpec",
    "CostKind",
    "DHRow",
    "DisconnectedLayerError",
    "IkSolutionSet",
    "JointConfig",
    "Pose",
    "Profile",
    "RegionStatus",
    "RobotGeometry",
    "Scenario",
    "SolutionGraph",
    "WristCenter",
    "brute_force_path",
    "build_graph",
    "dh_transform",
    "edge_cost",
    "empirical_feasibility",
    "forward_kinematics",
    "inverse_kinematics",
    "manipulability",
    "plan_trajectory",
    "position_jacobian",
    "random_path",
    "region_check",
    "residuals_F",
    "rpy_to_orientation",
    "shortest_path",
    "solve_joint_angles",
    "solve_wrist_center",
    "wrap_angle",
]
