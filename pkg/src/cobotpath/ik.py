"""Enumerate every real inverse-kinematics solution for a given pose.

The wrist center P is found first (three polynomial equations in x, y, z),
then the joint angles follow by a triangular solve of the twelve
trigonometric equations. Every candidate is checked against forward
kinematics before it is accepted; rejected branches are recorded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from cobotpath.kinematics import (
    JointConfig,
    Pose,
    RobotGeometry,
    WristCenter,
    joint_frames,
    pose_error,
    wrap_angle,
    wrist_residuals,
)

UNIT_TOL = 1e-6
POS_TOL = 1e-6
ORI_TOL = 1e-9
DEDUP_TOL = 1e-6
WRIST_TOL = 1e-8
N3_TOL = 1e-9
SINGULAR_TOL = 1e-9
N_SAMPLES = 1440


class DegeneratePoseError(ValueError):
    """The wrist-center system has no isolated real solution for this pose."""


@dataclass(frozen=True)
class IkSolutionSet:
    pose: Pose
    solutions: tuple[JointConfig, ...]
    diagnostics: tuple[str, ...] = ()
    wrist_centers: tuple[WristCenter, ...] = ()
    wrist_singular: bool = False

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    def contains(self, q, tol: float = DEDUP_TOL) -> bool:
        q = q if isinstance(q, JointConfig) else JointConfig(q)
        return any(s.distance(q) <= tol for s in self.solutions)


def classify_n3(n3: float) -> str:
    if abs(abs(n3) - 1.0) < N3_TOL:
        return "vertical"
    if abs(n3) < N3_TOL:
        return "horizontal"
    return "general"


# ---------------------------------------------------------------------------
# wrist center


def _vertical_xy(p1: float, p2: float, d4: float, d5: float) -> list[tuple[float, float]]:
    """Roots of (p1-x)^2 + (p2-y)^2 = d5^2, y p1 - x p2 = +-d4 d5.

    Eliminates y (or x, whichever pivot is larger) and solves the quadratic.
    """
    swap = abs(p2) > abs(p1)
    if swap:
        # x p2 - y p1 = -(+-k): same family with the roles of the axes exchanged
        p1, p2 = p2, p1
    k = d4 * d5
    out = []
    for sigma in (1.0, -1.0):
        A = 1 + p2**2 / p1**2
        B = -2 * (p2**2 / p1 - sigma * k * p2 / p1**2 + p1)
        C = -(d5**2) + k**2 / p1**2 + p1**2 - 2 * sigma * k * p2 / p1 + p2**2
        disc = B * B - 4 * A * C
        if disc < 0:
            if disc < -1e-12 * B * B:
                continue
            disc = 0.0
        r = np.sqrt(disc)
        for x in {(-B + r) / (2 * A), (-B - r) / (2 * A)}:
            y = (sigma * k + x * p2) / p1
            out.append((y, x) if swap else (x, y))
    return out


def _g_on_circle(pose: Pose, geom: RobotGeometry):
    """Lateral-offset residual restricted to the circle cut by the first two equations.

    P(phi) = p - d6 n + d5 (cos(phi) l + sin(phi) m) satisfies the plane and
    sphere equations identically.
    """
    c = pose.p - geom.d6 * pose.n
    l, m = pose.l, pose.m
    n1, n2, n3 = pose.n
    p1, p2, p3 = pose.p
    d4, d5 = geom.d4, geom.d5

    def point(phi):
        return c + d5 * (np.cos(phi) * l + np.sin(phi) * m)

    def g(phi):
        phi = np.asarray(phi, dtype=float)
        cp, sp = np.cos(phi)[..., None], np.sin(phi)[..., None]
        P = c + d5 * (cp * l + sp * m)
        x, y, z = P[..., 0], P[..., 1], P[..., 2]
        inner = ((n1 * n2 * x + (1 - n1**2) * y) * (p1 - x)
                 - (n1 * n2 * y + (1 - n2**2) * x) * (p2 - y)
                 - n3 * (n1 * y - n2 * x) * (p3 - z))
        rhs = d4**2 * (d5**2 * n3**2 + (n2 * (p1 - x) - n1 * (p2 - y)) ** 2)
        return (inner**2 - rhs) / d5**4

    return point, g


def _circle_roots(g, n_samples: int = N_SAMPLES) -> list[float]:
    phis = np.linspace(0.0, 2 * np.pi, n_samples + 1)
    vals = g(phis)
    roots = []
    for k in range(n_samples):
        a, b = phis[k], phis[k + 1]
        ga, gb = vals[k], vals[k + 1]
        if ga == 0.0:
            roots.append(a)
        elif ga * gb < 0:
            roots.append(brentq(g, a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps))
    # A pair of close roots (or a tangency) hides between samples without a
    # sign change. At every local minimum of |g| find the extremum of g and
    # split the bracket there.
    v = vals[:-1]
    step = 2 * np.pi / n_samples
    for k in range(n_samples):
        prev, nxt = v[k - 1], v[(k + 1) % n_samples]
        if not (abs(v[k]) <= abs(prev) and abs(v[k]) <= abs(nxt)):
            continue
        if v[k] == 0.0 or prev * v[k] <= 0 or nxt * v[k] <= 0:
            continue
        sgn = np.sign(v[k])
        a, b = phis[k] - step, phis[k] + step
        res = minimize_scalar(lambda t: sgn * float(g(t)), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13})
        ge = float(g(res.x))
        if sgn * ge < 0:
            roots.append(brentq(g, a, res.x, xtol=1e-12, rtol=4 * np.finfo(float).eps))
            roots.append(brentq(g, res.x, b, xtol=1e-12, rtol=4 * np.finfo(float).eps))
        elif abs(ge) < 1e-12:
            roots.append(float(res.x))
    return [float(np.mod(r, 2 * np.pi)) for r in roots]


def _polish(P: np.ndarray, pose: Pose, geom: RobotGeometry, iters: int = 20) -> np.ndarray:
    """Damped Newton on the three wrist equations (finite-difference Jacobian)."""
    r = wrist_residuals(geom, pose, P)
    h = 1e-6
    for _ in range(iters):
        nr = np.max(np.abs(r))
        if nr < 1e-15:
            break
        J = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (wrist_residuals(geom, pose, P + e) - wrist_residuals(geom, pose, P - e)) / (2 * h)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-4:
            P_new = P + t * step
            r_new = wrist_residuals(geom, pose, P_new)
            if np.max(np.abs(r_new)) < nr:
                P, r = P_new, r_new
                break
            t *= 0.5
        else:
            break
    return P


def solve_wrist_center(pose: Pose, geom: RobotGeometry, method: str = "auto",
                       diagnostics: list | None = None) -> list[WristCenter]:
    """All real wrist centers for the pose, sorted lexicographically.

    ``method`` is "auto" (dispatch on n3) or "general" (always use the
    circle parametrisation). Returns an empty list when no real wrist
    center exists; raises DegeneratePoseError for a vertical tool axis
    directly above the base.
    """
    diag = diagnostics if diagnostics is not None else []
    n1, n2, n3 = pose.n
    p1, p2, p3 = pose.p
    kind = classify_n3(n3) if method == "auto" else "general"
    cands: list[np.ndarray] = []

    if kind == "vertical":
        if np.hypot(p1, p2) < 1e-12:
            raise DegeneratePoseError("vertical tool axis with p1 = p2 = 0: y p1 - x p2 = +-d4 d5 has no solution")
        xy = _vertical_xy(p1, p2, geom.d4, geom.d5)
        if not xy:
            diag.append(f"wrist: p1^2+p2^2 = {p1**2 + p2**2:.6g} < d4^2 = {geom.d4**2:.6g}, no real (x, y)")
        for x, y in xy:
            for z in (p3 - geom.d6, p3 + geom.d6):
                cands.append(np.array([x, y, z]))
    elif kind == "horizontal":
        x, y = p1 - n1 * geom.d6, p2 - n2 * geom.d6
        for z in (p3 - geom.d5, p3 + geom.d5):
            cands.append(np.array([x, y, z]))
    else:
        point, g = _g_on_circle(pose, geom)
        roots = _circle_roots(g)
        if not roots:
            diag.append("wrist: lateral-offset residual has no root on the circle")
        for phi in roots:
            cands.append(_polish(point(phi), pose, geom))

    out: list[np.ndarray] = []
    for P in cands:
        res = np.max(np.abs(wrist_residuals(geom, pose, P)))
        if res >= WRIST_TOL:
            diag.append(f"wrist: candidate {np.round(P, 6).tolist()} rejected, residual {res:.3g}")
            continue
        if any(np.max(np.abs(P - Q)) < 1e-7 for Q in out):
            continue
        out.append(P)
    out.sort(key=lambda P: tuple(np.round(P, 9)))
    return [WristCenter(P) for P in out]


# ---------------------------------------------------------------------------
# joint angles


def _shoulder_angles(P: np.ndarray, geom: RobotGeometry) -> list[float]:
    """theta1 values placing P at the lateral offset of the joint-2 axis.

    Only used when the wrist orientation leaves theta5 free.
    """
    f0 = joint_frames(geom, np.zeros(6))
    axis = f0[0][:3, 2]
    offset = f0[3][:3, 3] @ axis
    # P . Rz(t) axis = offset  ->  a cos t + b sin t = offset
    a = P[0] * axis[0] + P[1] * axis[1]
    b = -P[0] * axis[1] + P[1] * axis[0]
    r = np.hypot(a, b)
    if r < abs(offset) - 1e-9 or r == 0:
        return []
    base = np.arctan2(b, a)
    half = np.arccos(np.clip(offset / r, -1.0, 1.0))
    return sorted({base + half, base - half})


def _refine(theta: np.ndarray, pose: Pose, geom: RobotGeometry, iters: int = 4) -> np.ndarray:
    """A few Gauss-Newton steps on the 6-D pose error (finite-difference Jacobian)."""
    def err(th):
        T = joint_frames(geom, th)[-1]
        dR = T[:3, :3] @ pose.R.T
        w = 0.5 * np.array([dR[2, 1] - dR[1, 2], dR[0, 2] - dR[2, 0], dR[1, 0] - dR[0, 1]])
        return np.concatenate([T[:3, 3] - pose.p, 100.0 * w])

    e = err(theta)
    h = 1e-7
    for _ in range(iters):
        if np.max(np.abs(e)) < 1e-13:
            break
        J = np.empty((6, 6))
        for j in range(6):
            d = np.zeros(6)
            d[j] = h
            J[:, j] = (err(theta + d) - err(theta - d)) / (2 * h)
        new = theta - np.linalg.lstsq(J, e, rcond=None)[0]
        e_new = err(new)
        if np.max(np.abs(e_new)) >= np.max(np.abs(e)):
            break
        theta, e = new, e_new
    return theta


def solve_joint_angles(pose: Pose, P: WristCenter, geom: RobotGeometry,
                       diagnostics: list | None = None) -> list[JointConfig]:
    """Triangular solve of the twelve trigonometric equations for one wrist center.

    Branches: two for theta5, two for theta3, up to two for theta2 and two
    for theta4; each assembled candidate must reproduce the pose by forward
    kinematics. Returns the verified solutions (possibly none).
    """
    diag = diagnostics if diagnostics is not None else []
    g = geom
    l, m, n = pose.l, pose.m, pose.n
    Pv = P.P
    tag = f"P={np.round(Pv, 6).tolist()}"
    dP = Pv - pose.p

    s6, c6 = (l @ dP) / g.d5, (m @ dP) / g.d5
    if abs(s6**2 + c6**2 - 1) > UNIT_TOL:
        diag.append(f"{tag}: s6^2+c6^2 = {s6**2 + c6**2:.9g}")
        return []
    t6 = np.arctan2(s6, c6)
    s6, c6 = np.sin(t6), np.cos(t6)

    v = l[2] * c6 - m[2] * s6
    w1 = l[0] * c6 - m[0] * s6
    w2 = l[1] * c6 - m[1] * s6
    branches = []  # (theta1, theta5)
    if abs(v) < SINGULAR_TOL and abs(n[2]) < SINGULAR_TOL:
        diag.append(f"{tag}: WristSingularity (theta5 not fixed by orientation); theta1 taken from P")
        M = np.array([[-n[0], w1], [n[1], -w2]])
        for t1 in _shoulder_angles(Pv, g):
            s5, c5 = np.linalg.solve(M, [np.sin(t1), np.cos(t1)])
            branches.append((t1, np.arctan2(s5, c5)))
    else:
        norm = np.hypot(v, n[2])
        for sign in (1.0, -1.0):
            s5, c5 = sign * v / norm, sign * n[2] / norm
            s1 = -n[0] * s5 + c5 * w1
            c1 = n[1] * s5 - c5 * w2
            if abs(s1**2 + c1**2 - 1) > UNIT_TOL:
                diag.append(f"{tag} theta5{'+' if sign > 0 else '-'}: s1^2+c1^2 = {s1**2 + c1**2:.9g}")
                continue
            branches.append((np.arctan2(s1, c1), np.arctan2(s5, c5)))

    c3 = (Pv[0] ** 2 + Pv[1] ** 2 + (Pv[2] - g.d1) ** 2 - g.a2**2 - g.a3**2 - g.d4**2) / (2 * g.a2 * g.a3)
    if abs(c3) > 1 + 1e-9:
        diag.append(f"{tag}: c3 = {c3:.9g} outside [-1, 1] (out of reach)")
        return []
    c3 = float(np.clip(c3, -1.0, 1.0))
    t3_opts = sorted({np.arctan2(np.sqrt(1 - c3 * c3), c3), np.arctan2(-np.sqrt(1 - c3 * c3), c3)})

    c234 = -(m[2] * c6 + l[2] * s6)
    if abs(c234) > 1 + 1e-9:
        diag.append(f"{tag}: cos(theta2+theta3+theta4) = {c234:.9g} outside [-1, 1]")
        return []
    t234 = np.arccos(np.clip(c234, -1.0, 1.0))

    out = []
    for t1, t5 in branches:
        for t3 in t3_opts:
            s3 = np.sin(t3)
            # (a2 + a3 c3) c2 - a3 s3 s2 = z - d1
            A, B = g.a2 + g.a3 * c3, g.a3 * s3
            R = np.hypot(A, B)
            ratio = (Pv[2] - g.d1) / R
            if abs(ratio) > 1 + 1e-9:
                diag.append(f"{tag} theta3={t3:.6f}: no theta2 (|z-d1|/R = {abs(ratio):.9g})")
                continue
            phi0 = np.arctan2(B, A)
            half = np.arccos(np.clip(ratio, -1.0, 1.0))
            for t2 in sorted({half - phi0, -half - phi0}):
                for t4 in sorted({t234 - t2 - t3, -t234 - t2 - t3}):
                    theta = wrap_angle(np.array([t1, t2, t3, t4, t5, t6]))
                    pe, oe = pose_error(g, theta, pose)
                    if pe < 1e-3 and oe < 1e-6 and (pe >= POS_TOL or oe >= ORI_TOL):
                        theta = wrap_angle(_refine(theta, pose, g))
                        pe, oe = pose_error(g, theta, pose)
                    if pe < POS_TOL and oe < ORI_TOL:
                        out.append(JointConfig(theta))
                    else:
                        diag.append(f"{tag} candidate {np.round(theta, 6).tolist()}: "
                                    f"FK mismatch (pos {pe:.3g} mm, ori {oe:.3g})")
    if not out:
        diag.append(f"{tag}: NoSolution, every branch rejected")
    return out


def _canonical(solutions: list[JointConfig]) -> list[JointConfig]:
    ordered = sorted(solutions, key=lambda q: tuple(np.round(q.theta, 9)))
    kept: list[JointConfig] = []
    for q in ordered:
        if all(q.distance(k) > DEDUP_TOL for k in kept):
            kept.append(q)
    return kept


def inverse_kinematics(pose: Pose, geom: RobotGeometry) -> IkSolutionSet:
    """All verified joint solutions for ``pose`` in canonical order.

    Never raises for unreachable poses: the set is simply empty and
    ``diagnostics`` says why.
    """
    diag: list[str] = []
    try:
        centers = solve_wrist_center(pose, geom, diagnostics=diag)
    except DegeneratePoseError as exc:
        diag.append(f"Degenerate: {exc}")
        centers = []
    sols: list[JointConfig] = []
    for P in centers:
        sols.extend(solve_joint_angles(pose, P, geom, diagnostics=diag))
    return IkSolutionSet(
        pose=pose,
        solutions=tuple(_canonical(sols)),
        diagnostics=tuple(diag),
        wrist_centers=tuple(centers),
        wrist_singular=any("WristSingularity" in d for d in diag),
    )
