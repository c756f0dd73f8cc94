"""Straight-line trajectories with uniform or quintic time scaling.

Each segment between consecutive waypoints is split into T steps; the IK
problem is solved at every one of the T + 1 via-points with the segment's
fixed tool orientation. Segment endpoints shared by two segments appear in
both, so a scenario with N waypoints yields (N - 1)(T + 1) layers.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from cobotpath.ik import IkSolutionSet, inverse_kinematics
from cobotpath.kinematics import Pose, RobotGeometry, load_schema, check_rotation, rpy_to_orientation

# s(t/T) = 10 u^3 - 15 u^4 + 6 u^5
QUINTIC_COEFFS = (10.0, -15.0, 6.0)

BUNDLED_SCENARIOS = tuple(f"test{i}" for i in range(1, 8))


class Profile(str, enum.Enum):
    UNIFORM = "uniform"
    QUINTIC = "quintic"


def quintic_coefficients() -> np.ndarray:
    """Solve for (a3, a4, a5) from s(1) = 1 and zero end velocity/acceleration.

    With a0 = a1 = a2 = 0 already forced by the start conditions, the end
    conditions on s, s' and s'' in u = t/T give a 3x3 linear system.
    """
    A = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
    return np.linalg.solve(A, np.array([1.0, 0.0, 0.0]))


def profile_s(profile: Profile | str, t: int, T: int) -> float:
    profile = Profile(profile)
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 0 <= t <= T:
        raise ValueError(f"step t={t} outside [0, {T}]")
    u = t / T
    if profile is Profile.UNIFORM:
        return u
    a3, a4, a5 = QUINTIC_COEFFS
    return a3 * u**3 + a4 * u**4 + a5 * u**5


def quintic_derivatives(t: float, T: float) -> tuple[float, float, float]:
    """(s, ds/dt, d2s/dt2) of the quintic profile at time t."""
    a3, a4, a5 = QUINTIC_COEFFS
    s = a5 * t**5 / T**5 + a4 * t**4 / T**4 + a3 * t**3 / T**3
    ds = 5 * a5 * t**4 / T**5 + 4 * a4 * t**3 / T**4 + 3 * a3 * t**2 / T**3
    dds = 20 * a5 * t**3 / T**5 + 12 * a4 * t**2 / T**4 + 6 * a3 * t / T**3
    return s, ds, dds


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray
    orientation: np.ndarray
    T: int
    profile: Profile = Profile.UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float))
        object.__setattr__(self, "orientation", np.asarray(self.orientation, dtype=float))
        object.__setattr__(self, "profile", Profile(self.profile))
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")
        check_rotation(self.orientation)


def interpolate(seg: Segment, s: float) -> np.ndarray:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"path parameter s={s} outside [0, 1]")
    return seg.start * (1 - s) + seg.end * s


def orientation_from_spec(spec: dict) -> np.ndarray:
    if "matrix" in spec:
        R = np.asarray(spec["matrix"], dtype=float)
        check_rotation(R)
        return R
    return rpy_to_orientation(*spec["rpy"], home=spec.get("home"))


@dataclass(frozen=True)
class Scenario:
    waypoints: tuple
    orientations: tuple
    T: int = 25
    profile: Profile = Profile.UNIFORM
    name: str = ""

    def __post_init__(self):
        wps = tuple(np.asarray(w, dtype=float) for w in self.waypoints)
        if len(wps) < 2 or any(w.shape != (3,) for w in wps):
            raise ValueError("need at least two 3-D waypoints")
        if len(self.orientations) != len(wps) - 1:
            raise ValueError(f"{len(wps) - 1} segments but {len(self.orientations)} orientations")
        object.__setattr__(self, "waypoints", wps)
        object.__setattr__(self, "orientations", tuple(self.orientations))
        object.__setattr__(self, "profile", Profile(self.profile))
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        jsonschema.validate(data, load_schema("scenario.schema.json"))
        return cls(
            waypoints=tuple(data["waypoints"]),
            orientations=tuple(data["orientations"]),
            T=data["T"],
            profile=data["profile"],
            name=data.get("name", ""),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        """Load a scenario file, or one of the bundled ``test1``..``test7``."""
        if str(path) in BUNDLED_SCENARIOS:
            text = resources.files("cobotpath.data").joinpath("scenarios", f"{path}.json").read_text()
            return cls.from_dict(json.loads(text))
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_overrides(self, T: int | None = None, profile: Profile | str | None = None) -> "Scenario":
        return replace(self, T=self.T if T is None else T, profile=self.profile if profile is None else profile)

    def segments(self) -> list[Segment]:
        return [
            Segment(a, b, orientation_from_spec(o), self.T, self.profile)
            for a, b, o in zip(self.waypoints[:-1], self.waypoints[1:], self.orientations)
        ]


@dataclass(frozen=True)
class ViaPoint:
    segment: int
    t: int
    s: float
    position: np.ndarray
    orientation: np.ndarray


@dataclass(frozen=True)
class SolutionLayer:
    via: ViaPoint
    solutions: IkSolutionSet

    def __len__(self):
        return len(self.solutions)


def via_points(scenario: Scenario) -> list[ViaPoint]:
    out = []
    for i, seg in enumerate(scenario.segments()):
        for t in range(seg.T + 1):
            s = profile_s(seg.profile, t, seg.T)
            out.append(ViaPoint(i, t, s, interpolate(seg, s), seg.orientation))
    return out


def plan_trajectory(scenario: Scenario, geom: RobotGeometry) -> list[SolutionLayer]:
    """Solve IK at every via-point; infeasible via-points give empty layers."""
    return [
        SolutionLayer(v, inverse_kinematics(Pose(v.position, v.orientation), geom))
        for v in via_points(scenario)
    ]
