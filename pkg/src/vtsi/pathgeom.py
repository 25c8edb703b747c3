"""Plan geometry of the track and moving-frame kinematics.

A track plan is a sequence of straight, transition (clothoid), and circular
spans in the horizontal plane. The exact geometry is integrated numerically,
sampled, and fitted with a spline; Frenet frames and the angular
velocity/acceleration of the moving frame follow from the fitted curve.
Positive curvature turns left (binormal up).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import inf, cos, sin, pi

import numpy as np
from numpy.polynomial.legendre import leggauss as _leggauss

leggauss = lru_cache(maxsize=None)(_leggauss)

from .splines import NurbsCurve, eval_nurbs, fit_least_squares

__all__ = [
    "Span",
    "PlanSpec",
    "FrenetFrame",
    "FrameKinematics",
    "ArclengthMap",
    "PlanPath",
    "build_plan_path",
    "frenet_frame",
    "frame_kinematics",
    "CosineProfile",
    "cosine_profile",
]

UP = np.array([0.0, 0.0, 1.0])

# Below this (curvature in 1/m) the binormal of the fitted curve is numerical
# noise; fall back to the global-up convention so frames stay continuous.
STRAIGHT_CURVATURE_TOL = 1e-9


def _curv(radius) -> float:
    if radius is None or radius == 0 or radius == inf:
        return 0.0
    return 1.0 / float(radius)


@dataclass(frozen=True)
class Span:
    """One plan span: ``straight``, ``transition``, or ``arc``."""

    kind: str
    length: float
    radius_start: float | None = None
    radius_end: float | None = None

    def __post_init__(self):
        if self.kind not in ("straight", "transition", "arc"):
            raise ValueError("unknown span kind %r" % self.kind)
        if self.length <= 0.0:
            raise ValueError("span length must be positive")
        if self.kind == "arc" and _curv(self.radius_start) != _curv(self.radius_end):
            raise ValueError("arc span must have equal start/end radii")
        if self.kind == "straight" and (_curv(self.radius_start) or _curv(self.radius_end)):
            raise ValueError("straight span cannot carry a radius")

    def curvature(self, ds: float) -> float:
        """Curvature at local arclength ``ds`` (linear in s for transitions)."""
        k0, k1 = _curv(self.radius_start), _curv(self.radius_end)
        if self.kind == "straight":
            return 0.0
        if self.kind == "arc":
            return k0
        return k0 + (k1 - k0) * ds / self.length


@dataclass(frozen=True)
class PlanSpec:
    """Ordered spans of the plan geometry."""

    spans: tuple

    def __post_init__(self):
        spans = tuple(self.spans)
        object.__setattr__(self, "spans", spans)
        if not spans:
            raise ValueError("plan needs at least one span")
        # Curvature continuity at joints.
        for a, b in zip(spans[:-1], spans[1:]):
            ka = a.curvature(a.length)
            kb = b.curvature(0.0)
            if abs(ka - kb) > 1e-12:
                raise ValueError(
                    "curvature jump %.3g at span joint" % abs(ka - kb))
        joints = np.concatenate([[0.0], np.cumsum([sp.length for sp in spans])])
        object.__setattr__(self, "_joints", joints)

    @property
    def total_length(self) -> float:
        return float(self._joints[-1])

    @property
    def joints(self) -> np.ndarray:
        """Cumulative arclengths of span boundaries, including both ends."""
        return self._joints

    def curvature(self, s: float) -> float:
        s = min(max(s, 0.0), self.total_length)
        joints = self.joints
        i = min(int(np.searchsorted(joints, s, side="right")) - 1, len(self.spans) - 1)
        return self.spans[i].curvature(s - joints[i])

    def heading(self, s: float) -> float:
        """Integral of curvature from 0 to s (closed form per span)."""
        joints = self.joints
        theta = 0.0
        for i, sp in enumerate(self.spans):
            s0, s1 = joints[i], joints[i + 1]
            ds = min(s, s1) - s0
            if ds <= 0.0:
                break
            k0 = sp.curvature(0.0)
            k1 = sp.curvature(ds)
            theta += 0.5 * (k0 + k1) * ds
            if s <= s1:
                break
        return theta

    def point(self, s: float) -> np.ndarray:
        """Exact plan position by Gauss quadrature of the heading."""
        nodes, wts = leggauss(20)
        x = y = 0.0
        joints = self.joints
        for i, sp in enumerate(self.spans):
            s0, s1 = joints[i], joints[i + 1]
            hi = min(s, s1)
            if hi <= s0:
                break
            half = 0.5 * (hi - s0)
            mid = 0.5 * (hi + s0)
            for t, w in zip(nodes, wts):
                th = self.heading(mid + half * t)
                x += half * w * cos(th)
                y += half * w * sin(th)
            if s <= s1:
                break
        return np.array([x, y, 0.0])


@dataclass(frozen=True)
class FrenetFrame:
    origin: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    @property
    def rotation(self) -> np.ndarray:
        """Columns (t, n, b): maps frame components to global."""
        return np.column_stack([self.t, self.n, self.b])


@dataclass(frozen=True)
class FrameKinematics:
    """Snapshot of the moving Frenet frame at one wheel position."""

    rotation: np.ndarray      # R^F, frame -> global
    omega: np.ndarray         # angular velocity, frame components (t, n, b)
    omega_dot: np.ndarray     # its time derivative, frame components
    origin_vel: np.ndarray    # global
    origin_acc: np.ndarray    # global


class ArclengthMap:
    """Bidirectional map between curve parameter and arclength.

    Forward values come from per-span Gauss quadrature of the parametric
    speed accumulated on a fine grid; inversion refines a grid guess with
    Newton steps using the exact jacobian.
    """

    def __init__(self, curve: NurbsCurve, subdiv: int = 24, gauss: int = 10):
        self.curve = curve
        nodes, wts = leggauss(gauss)
        grid = [curve.domain[0]]
        for a, b in zip(curve.knots.breakpoints[:-1], curve.knots.breakpoints[1:]):
            grid.extend(np.linspace(a, b, subdiv + 1)[1:])
        self._xi = np.asarray(grid)
        segs = np.zeros(len(self._xi))
        for i in range(1, len(self._xi)):
            a, b = self._xi[i - 1], self._xi[i]
            half, mid = 0.5 * (b - a), 0.5 * (a + b)
            segs[i] = half * sum(
                w * self.jacobian(mid + half * t) for t, w in zip(nodes, wts))
        self._s = np.cumsum(segs)
        self._nodes, self._wts = nodes, wts
        self._inv_cache = {}

    @property
    def length(self) -> float:
        return float(self._s[-1])

    def jacobian(self, xi: float) -> float:
        """J = ds/dxi."""
        d = eval_nurbs(self.curve, xi, 1)
        return float(np.linalg.norm(d[1]))

    def jacobian_prime(self, xi: float) -> float:
        """dJ/dxi = x' . x'' / J."""
        d = eval_nurbs(self.curve, xi, 2)
        return float(d[1] @ d[2] / np.linalg.norm(d[1]))

    def s_of_xi(self, xi: float) -> float:
        i = int(np.searchsorted(self._xi, xi)) - 1
        i = min(max(i, 0), len(self._xi) - 2)
        a = self._xi[i]
        half, mid = 0.5 * (xi - a), 0.5 * (xi + a)
        ds = half * sum(
            w * self.jacobian(mid + half * t)
            for t, w in zip(self._nodes, self._wts))
        return float(self._s[i] + ds)

    def xi_of_s(self, s: float) -> float:
        if not (-1e-9 * self.length <= s <= self.length * (1 + 1e-9)):
            raise ValueError("arclength %g outside [0, %g]" % (s, self.length))
        s = min(max(s, 0.0), self.length)
        cached = self._inv_cache.get(s)
        if cached is not None:
            return cached
        xi = float(np.interp(s, self._s, self._xi))
        lo, hi = self.curve.domain
        for _ in range(30):
            err = self.s_of_xi(xi) - s
            if abs(err) <= 1e-12 * max(self.length, 1.0):
                break
            xi = min(max(xi - err / self.jacobian(xi), lo), hi)
        if len(self._inv_cache) > 4096:
            self._inv_cache.clear()
        self._inv_cache[s] = xi
        return xi


@dataclass(frozen=True)
class PlanPath:
    """Fitted spline path together with its arclength map and plan spec."""

    spec: PlanSpec
    curve: NurbsCurve
    amap: ArclengthMap

    @property
    def length(self) -> float:
        return self.amap.length


def build_plan_path(spec: PlanSpec, ctrl_per_span: int = 10, p: int = 3,
                    samples_per_elem: int = 20) -> PlanPath:
    """Fit the exact plan geometry with a spline.

    Each span is meshed into ``ctrl_per_span`` knot spans so that span joints
    (where the curvature derivative may jump) land on knots. Sample
    parameters are assigned per span by chord length, scaled to the knot
    interval of the span.
    """
    n_spans = len(spec.spans)
    e = ctrl_per_span
    joints = spec.joints
    xi_all, pts_all = [], []
    for i, sp in enumerate(spec.spans):
        m = e * samples_per_elem + 1
        s_loc = np.linspace(joints[i], joints[i + 1], m)
        pts = np.array([spec.point(s) for s in s_loc])
        chord = np.concatenate([[0.0], np.cumsum(
            np.linalg.norm(np.diff(pts, axis=0), axis=1))])
        xi = i * e + chord / chord[-1] * e
        if i > 0:
            xi, pts = xi[1:], pts[1:]
        xi_all.append(xi)
        pts_all.append(pts)
    xi_all = np.concatenate(xi_all)
    pts_all = np.concatenate(pts_all, axis=0)
    curve = fit_least_squares(xi_all, pts_all, p, n_spans * e + p)
    return PlanPath(spec, curve, ArclengthMap(curve))


def _curvature_terms(curve: NurbsCurve, xi: float):
    """Curve derivatives and (kappa, tau, dkappa/ds, dtau/ds) at xi."""
    k = min(curve.degree, 4)
    d = np.zeros((5, 3))
    d[: k + 1] = eval_nurbs(curve, xi, k)
    x1, x2, x3, x4 = d[1], d[2], d[3], d[4]
    sp = np.linalg.norm(x1)
    c = np.cross(x1, x2)
    cn = np.linalg.norm(c)
    kappa = cn / sp ** 3
    if kappa < STRAIGHT_CURVATURE_TOL:
        return d, 0.0, 0.0, 0.0, 0.0
    cp = np.cross(x1, x3)
    # d/dxi of kappa and tau, then chain rule through J = sp.
    kap_xi = (c @ cp) / (cn * sp ** 3) - 3.0 * kappa * (x1 @ x2) / sp ** 2
    tau = (c @ x3) / cn ** 2
    tau_xi = (cp @ x3 + c @ x4) / cn ** 2 - 2.0 * tau * (c @ cp) / cn ** 2
    return d, kappa, tau, kap_xi / sp, tau_xi / sp


def frenet_frame(curve: NurbsCurve, amap: ArclengthMap, s: float) -> FrenetFrame:
    """Frenet triad at arclength ``s`` with the straight-segment fallback.

    Where the binormal is undefined (curvature below the straightness
    threshold) the frame uses b = global up, n = b x t.
    """
    xi = amap.xi_of_s(s)
    d = eval_nurbs(curve, xi, 2)
    t = d[1] / np.linalg.norm(d[1])
    c = np.cross(d[1], d[2])
    if np.linalg.norm(c) / np.linalg.norm(d[1]) ** 3 < STRAIGHT_CURVATURE_TOL:
        b = UP - (UP @ t) * t
        b /= np.linalg.norm(b)
    else:
        b = c / np.linalg.norm(c)
    n = np.cross(b, t)
    return FrenetFrame(d[0], t, n, b)


def frame_kinematics(curve: NurbsCurve, amap: ArclengthMap, s: float,
                     v: float) -> FrameKinematics:
    """Moving-frame kinematics at arclength ``s`` for constant speed ``v``.

    omega = v (tau t + kappa b) and its time derivative v^2 (tau' t + kappa' b),
    both in frame components; the origin travels at v t with centripetal
    acceleration v^2 kappa n.
    """
    if v < 0.0:
        raise ValueError("speed must be nonnegative")
    xi = amap.xi_of_s(s)
    d, kappa, tau, dkap, dtau = _curvature_terms(curve, xi)
    t = d[1] / np.linalg.norm(d[1])
    c = np.cross(d[1], d[2])
    if kappa == 0.0:
        b = UP - (UP @ t) * t
        b /= np.linalg.norm(b)
    else:
        b = c / np.linalg.norm(c)
    n = np.cross(b, t)
    R = np.column_stack([t, n, b])
    omega = v * np.array([tau, 0.0, kappa])
    omega_dot = v * v * np.array([dtau, 0.0, dkap])
    return FrameKinematics(
        rotation=R,
        omega=omega,
        omega_dot=omega_dot,
        origin_vel=v * t,
        origin_acc=v * v * kappa * n,
    )


@dataclass(frozen=True)
class CosineProfile:
    """Rigid vertical profile z(s) = (A/2)(1 - cos(2 pi s / wavelength))."""

    amplitude: float
    wavelength: float
    length: float

    def __post_init__(self):
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")

    def height(self, s: float) -> float:
        w = 2.0 * pi / self.wavelength
        return 0.5 * self.amplitude * (1.0 - cos(w * s))

    def slope(self, s: float) -> float:
        w = 2.0 * pi / self.wavelength
        return 0.5 * self.amplitude * w * sin(w * s)

    def curvature(self, s: float) -> float:
        w = 2.0 * pi / self.wavelength
        return 0.5 * self.amplitude * w * w * cos(w * s)

    def jerk(self, s: float) -> float:
        w = 2.0 * pi / self.wavelength
        return -0.5 * self.amplitude * w ** 3 * sin(w * s)

    # Time derivatives for a wheel moving at constant speed v (s = v t).
    def z_dot(self, s: float, v: float) -> float:
        return v * self.slope(s)

    def z_ddot(self, s: float, v: float) -> float:
        return v * v * self.curvature(s)


def cosine_profile(amplitude: float, wavelength: float, length: float) -> CosineProfile:
    return CosineProfile(amplitude, wavelength, length)
