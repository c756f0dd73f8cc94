"""Forward kinematics, orientation helpers, position Jacobian and the
trigonometric residual system used to validate joint solutions.

Lengths are in millimetres and angles in radians throughout.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

ORTHO_TOL = 1e-9
LINK_NAMES = ("d1", "a2", "a3", "d4", "d5", "d6")


def wrap_angle(x):
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


def check_rotation(R: np.ndarray, tol: float = ORTHO_TOL) -> None:
    """Raise ValueError unless R is a proper rotation matrix."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {R.shape}")
    err = np.max(np.abs(R.T @ R - np.eye(3)))
    if err >= tol:
        raise ValueError(f"rotation columns are not orthonormal (max error {err:.3g})")
    if np.max(np.abs(np.cross(R[:, 0], R[:, 1]) - R[:, 2])) >= tol:
        raise ValueError("rotation is not right-handed (l x m != n)")


@dataclass(frozen=True)
class DHRow:
    a: float
    alpha: float
    d: float
    delta: float = 0.0


@dataclass(frozen=True)
class RobotGeometry:
    """D-H table plus the link constants that appear in the IK equations.

    The table drives forward kinematics; the constants drive the inverse
    problem. Both must describe the same arm, which `residuals_F` checks.
    """

    dh: tuple[DHRow, ...]
    d1: float
    a2: float
    a3: float
    d4: float
    d5: float
    d6: float
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dh", tuple(r if isinstance(r, DHRow) else DHRow(**r) for r in self.dh))
        if len(self.dh) != 6:
            raise ValueError(f"need exactly 6 D-H rows, got {len(self.dh)}")
        for k in LINK_NAMES:
            if not getattr(self, k) > 0:
                raise ValueError(f"link constant {k} must be positive, got {getattr(self, k)}")

    @property
    def links(self) -> dict:
        return {k: getattr(self, k) for k in LINK_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "RobotGeometry":
        jsonschema.validate(data, load_schema("geometry.schema.json"))
        return cls(dh=tuple(DHRow(**row) for row in data["dh"]), name=data.get("name", ""), **data["links"])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dh": [{"a": r.a, "alpha": r.alpha, "d": r.d, "delta": r.delta} for r in self.dh],
            "links": self.links,
        }

    @classmethod
    def load(cls, path: str | Path) -> "RobotGeometry":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def default(cls) -> "RobotGeometry":
        """Bundled myCobot 280 geometry (d6 is the vendor's flange offset)."""
        text = resources.files("cobotpath.data").joinpath("mycobot280.json").read_text()
        return cls.from_dict(json.loads(text))


def load_schema(name: str) -> dict:
    return json.loads(resources.files("cobotpath.data").joinpath(name).read_text())


@dataclass(frozen=True)
class Pose:
    """End-effector position `p` and orientation whose columns are l, m, n."""

    p: np.ndarray
    R: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p, (3,)))
        object.__setattr__(self, "R", _frozen(self.R, (3, 3)))
        check_rotation(self.R)

    @property
    def l(self) -> np.ndarray:
        return self.R[:, 0]

    @property
    def m(self) -> np.ndarray:
        return self.R[:, 1]

    @property
    def n(self) -> np.ndarray:
        return self.R[:, 2]

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.p
        return T


@dataclass(frozen=True)
class JointConfig:
    """Six joint angles, normalised to (-pi, pi] on construction."""

    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(wrap_angle(self.theta), (6,)))

    def __iter__(self):
        return iter(self.theta)

    def __len__(self):
        return 6

    def __getitem__(self, i):
        return self.theta[i]

    def __eq__(self, other):
        if not isinstance(other, JointConfig):
            return NotImplemented
        return bool(np.array_equal(self.theta, other.theta))

    def __hash__(self):
        return hash(self.theta.tobytes())

    def __repr__(self):
        return "JointConfig(" + ", ".join(f"{t:.6f}" for t in self.theta) + ")"

    def distance(self, other: "JointConfig") -> float:
        """Largest wrapped per-joint difference."""
        return float(np.max(np.abs(wrap_angle(self.theta - other.theta))))


@dataclass(frozen=True)
class WristCenter:
    """Intersection of the joint-4 and joint-5 axes (origin of frame 5)."""

    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen(self.P, (3,)))

    @property
    def x(self) -> float:
        return float(self.P[0])

    @property
    def y(self) -> float:
        return float(self.P[1])

    @property
    def z(self) -> float:
        return float(self.P[2])


def dh_transform(row: DHRow, theta: float) -> np.ndarray:
    """Rot_z(theta) Trans_z(d) Trans_x(a) Rot_x(alpha) Rot_z(delta)."""
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    cd, sd = np.cos(row.delta), np.sin(row.delta)
    # columns of Rot_z(theta) Rot_x(alpha), then post-rotated by delta about the new z
    x = np.array([ct, st, 0.0])
    y = np.array([-st * ca, ct * ca, sa])
    z = np.array([st * sa, -ct * sa, ca])
    T = np.eye(4)
    T[:3, 0] = cd * x + sd * y
    T[:3, 1] = -sd * x + cd * y
    T[:3, 2] = z
    T[:3, 3] = np.array([row.a * ct, row.a * st, row.d])
    return T


def joint_frames(geom: RobotGeometry, q) -> list[np.ndarray]:
    """Cumulative transforms A1, A1A2, ..., A1...A6 (frames 2..7 in frame 1)."""
    theta = q.theta if isinstance(q, JointConfig) else np.asarray(q, dtype=float)
    frames = []
    T = np.eye(4)
    for row, th in zip(geom.dh, theta):
        T = T @ dh_transform(row, th)
        frames.append(T)
    return frames


def forward_kinematics(geom: RobotGeometry, q) -> tuple[Pose, WristCenter]:
    frames = joint_frames(geom, q)
    T = frames[-1]
    return Pose(T[:3, 3], T[:3, :3]), WristCenter(frames[3][:3, 3])


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rpy_to_orientation(alpha: float, beta: float, gamma: float, home=None) -> np.ndarray:
    """Roll alpha (x), pitch beta (y), yaw gamma (z): home @ Rz @ Ry @ Rx."""
    home = np.eye(3) if home is None else np.asarray(home, dtype=float)
    check_rotation(home)
    return home @ _rz(gamma) @ _ry(beta) @ _rx(alpha)


def position_jacobian(geom: RobotGeometry, q) -> np.ndarray:
    """Geometric 3x6 Jacobian of the end-effector position."""
    frames = joint_frames(geom, q)
    p = frames[-1][:3, 3]
    J = np.empty((3, 6))
    prev = np.eye(4)
    for j in range(6):
        z, o = prev[:3, 2], prev[:3, 3]
        J[:, j] = np.cross(z, p - o)
        prev = frames[j]
    return J


def manipulability(J: np.ndarray) -> float:
    """sqrt(det(J J^T)); round-off negatives clamp to zero."""
    J = np.asarray(J, dtype=float)
    det = np.linalg.det(J @ J.T)
    # the Gram matrix is PSD, so a negative determinant is pure round-off
    return float(np.sqrt(det)) if det > 0 else 0.0


def residuals_F(geom: RobotGeometry, q, pose: Pose, P: WristCenter) -> np.ndarray:
    """Values of the twelve trigonometric equations F1..F12.

    The scaling matches the integer-coefficient form (lengths x100), so for the
    bundled geometry e.g. F1 = 7318 s6 - 100 l.(P - p).
    """
    theta = q.theta if isinstance(q, JointConfig) else np.asarray(q, dtype=float)
    s1, s2, s3, s4, s5, s6 = np.sin(theta)
    c1, c2, c3, c4, c5, c6 = np.cos(theta)
    l1, l2, l3 = pose.l
    m1, m2, m3 = pose.m
    n1, n2, n3 = pose.n
    x, y, z = P.P
    g = geom
    dP = P.P - pose.p
    c23 = c2 * c3 - s2 * s3
    s23 = s2 * c3 + c2 * s3
    return np.array([
        100 * g.d5 * s6 - 100 * (pose.l @ dP),
        100 * g.d5 * c6 - 100 * (pose.m @ dP),
        -n3 * s5 + c5 * (l3 * c6 - m3 * s6),
        s5**2 + c5**2 - 1,
        s1 + n1 * s5 - c5 * (l1 * c6 - m1 * s6),
        c1 - n2 * s5 + c5 * (l2 * c6 - m2 * s6),
        s3**2 + c3**2 - 1,
        1e4 * x**2 + 1e4 * y**2 + (100 * z - 100 * g.d1) ** 2
        - 1e4 * (g.a2**2 + g.a3**2 + g.d4**2) - 2e4 * g.a2 * g.a3 * c3,
        100 * g.d1 + 100 * g.a2 * c2 + 100 * g.a3 * c23 - 100 * z,
        s2**2 + c2**2 - 1,
        s4**2 + c4**2 - 1,
        c23 * c4 - s23 * s4 + m3 * c6 + l3 * s6,
    ])


def wrist_residuals(geom: RobotGeometry, pose: Pose, P) -> np.ndarray:
    """Residuals of the three wrist-center equations, made dimensionless.

    The linear equation is divided by d5, the sphere by d5**2 and the quartic
    lateral-offset equation by d5**4.
    """
    P = P.P if isinstance(P, WristCenter) else np.asarray(P, dtype=float)
    n1, n2, n3 = pose.n
    p1, p2, p3 = pose.p
    x, y, z = P
    d4, d5, d6 = geom.d4, geom.d5, geom.d6
    u = pose.p - P
    e1 = (pose.n @ u - d6) / d5
    e2 = (u @ u - d5**2 - d6**2) / d5**2
    inner = ((n1 * n2 * x + (1 - n1**2) * y) * (p1 - x)
             - (n1 * n2 * y + (1 - n2**2) * x) * (p2 - y)
             - n3 * (n1 * y - n2 * x) * (p3 - z))
    rhs = d4**2 * (d5**2 * n3**2 + (n2 * (p1 - x) - n1 * (p2 - y)) ** 2)
    return np.array([e1, e2, (inner**2 - rhs) / d5**4])


def pose_error(geom: RobotGeometry, q, pose: Pose) -> tuple[float, float]:
    """(position error in mm, Frobenius orientation error) of FK(q) vs pose."""
    T = joint_frames(geom, q)[-1]
    return float(np.linalg.norm(T[:3, 3] - pose.p)), float(np.linalg.norm(T[:3, :3] - pose.R))
