"""Planar geometry kernel: SE(2) poses, convex footprints, SAT overlap and
path clearance.

All functions are pure; polygons cache their derived arrays (edge normals,
support values, circumradius) on first use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

EPS_SEP = 1e-9
TWO_PI = 2.0 * math.pi
DEFAULT_STEP = 0.005


class MalformedPath(ValueError):
    pass


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    t = math.remainder(theta, TWO_PI)
    if t <= -math.pi:
        t += TWO_PI
    return t


def angle_diff(a: float, b: float) -> float:
    """Shortest signed arc from ``a`` to ``b``."""
    return wrap_angle(b - a)


@dataclass(frozen=True)
class Pose2:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite pose {self.x}, {self.y}, {self.theta}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def xy_distance(self, other: "Pose2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def compose(self, other: "Pose2") -> "Pose2":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(self.x + c * other.x - s * other.y,
                     self.y + s * other.x + c * other.y,
                     self.theta + other.theta)

    def inverse(self) -> "Pose2":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(-(c * self.x + s * self.y), s * self.x - c * self.y, -self.theta)


@dataclass(frozen=True)
class WorkspaceRect:
    width: float = 0.78
    height: float = 0.52

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("workspace dimensions must be positive")


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ConvexPolygon:
    """Body-frame convex footprint; vertices CCW with their mean at the origin."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for i in range(n):
            if _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n]) <= 1e-15:
                raise ValueError("vertices must be counterclockwise and strictly convex")
        cx = sum(v[0] for v in verts) / n
        cy = sum(v[1] for v in verts) / n
        if abs(cx) > 1e-9 or abs(cy) > 1e-9:
            raise ValueError(f"vertex centroid ({cx:.3g}, {cy:.3g}) is not at the origin")

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]]) -> "ConvexPolygon":
        """Hull the points and recentre so the vertex mean is the origin."""
        hull = convex_hull(points)
        if len(hull) < 3:
            raise ValueError("degenerate point set")
        cx = sum(p[0] for p in hull) / len(hull)
        cy = sum(p[1] for p in hull) / len(hull)
        return cls(tuple((x - cx, y - cy) for x, y in hull))

    @classmethod
    def rectangle(cls, width: float, height: float) -> "ConvexPolygon":
        w, h = width / 2.0, height / 2.0
        return cls(((-w, -h), (w, -h), (w, h), (-w, h)))

    @classmethod
    def regular(cls, n: int, radius: float, phase: float = 0.0) -> "ConvexPolygon":
        return cls(tuple((radius * math.cos(phase + TWO_PI * i / n),
                          radius * math.sin(phase + TWO_PI * i / n)) for i in range(n)))

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @cached_property
    def normals(self) -> np.ndarray:
        """Outward unit edge normals, one per edge (i, i+1)."""
        v = self.array
        e = np.roll(v, -1, axis=0) - v
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    @cached_property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """(min, max) of the body vertices projected on each body normal."""
        proj = self.array @ self.normals.T
        return proj.min(axis=0), proj.max(axis=0)

    @cached_property
    def circumradius(self) -> float:
        return float(np.sqrt((self.array ** 2).sum(axis=1)).max())

    @cached_property
    def area(self) -> float:
        v = self.array
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def transform(polygon: ConvexPolygon, pose: Pose2) -> np.ndarray:
    """World-frame vertices (k, 2): rotate by theta, then translate."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    v = polygon.array
    out = np.empty_like(v)
    out[:, 0] = c * v[:, 0] - s * v[:, 1] + pose.x
    out[:, 1] = s * v[:, 0] + c * v[:, 1] + pose.y
    return out


def _poses_array(poses) -> np.ndarray:
    if isinstance(poses, np.ndarray):
        return np.atleast_2d(poses).astype(float, copy=False)
    return np.array([p.as_tuple() for p in poses], dtype=float).reshape(-1, 3)


def _placed(polygon: ConvexPolygon, P: np.ndarray):
    """World vertices (n, k, 2) and world normals (n, k, 2) for poses (n, 3)."""
    c, s = np.cos(P[:, 2]), np.sin(P[:, 2])
    v = polygon.array
    nb = polygon.normals
    W = np.empty((len(P), len(v), 2))
    W[:, :, 0] = c[:, None] * v[None, :, 0] - s[:, None] * v[None, :, 1] + P[:, 0, None]
    W[:, :, 1] = s[:, None] * v[None, :, 0] + c[:, None] * v[None, :, 1] + P[:, 1, None]
    Nw = np.empty((len(P), len(nb), 2))
    Nw[:, :, 0] = c[:, None] * nb[None, :, 0] - s[:, None] * nb[None, :, 1]
    Nw[:, :, 1] = s[:, None] * nb[None, :, 0] + c[:, None] * nb[None, :, 1]
    return W, Nw


class _Obstacle:
    """An obstacle frozen at one pose, with world vertices/normals/support."""

    __slots__ = ("poly", "pose", "verts", "normals", "smin", "smax", "cx", "cy", "r")

    def __init__(self, poly: ConvexPolygon, pose: Pose2):
        self.poly = poly
        self.pose = pose
        W, N = _placed(poly, np.array([pose.as_tuple()]))
        self.verts = W[0]
        self.normals = N[0]
        proj = self.verts @ self.normals.T
        self.smin = proj.min(axis=0)
        self.smax = proj.max(axis=0)
        self.cx, self.cy, self.r = pose.x, pose.y, poly.circumradius


def _separated(polygon: ConvexPolygon, P: np.ndarray, W: np.ndarray, Nw: np.ndarray,
               ob: _Obstacle, margin: np.ndarray | float) -> np.ndarray:
    """Boolean (n,): True where some SAT axis shows a gap >= margin - EPS_SEP."""
    need = np.asarray(margin, dtype=float) - EPS_SEP
    # Axes from the moving polygon: its own extent is pose invariant up to the offset.
    bmin, bmax = polygon.support
    off = P[:, 0, None] * Nw[:, :, 0] + P[:, 1, None] * Nw[:, :, 1]  # (n, k)
    amin = bmin[None, :] + off
    amax = bmax[None, :] + off
    projB = np.einsum("nkd,md->nkm", Nw, ob.verts)
    gap1 = np.maximum(projB.min(axis=2) - amax, amin - projB.max(axis=2))
    sep = (gap1 >= need[..., None] if np.ndim(need) else gap1 >= need).any(axis=1)
    # Axes from the obstacle.
    projA = np.einsum("nkd,md->nkm", W, ob.normals)
    gap2 = np.maximum(ob.smin[None, :] - projA.max(axis=1), projA.min(axis=1) - ob.smax[None, :])
    sep |= (gap2 >= need[..., None] if np.ndim(need) else gap2 >= need).any(axis=1)
    return sep


class CollisionChecker:
    """Clearance queries for one moving polygon against fixed obstacles.

    ``poses_free`` checks discrete poses; ``segments_free`` checks the swept hull
    between consecutive poses conservatively (see ``sweep_clear``).
    """

    def __init__(self, polygon: ConvexPolygon, obstacles: Sequence[tuple[ConvexPolygon, Pose2]],
                 ws: WorkspaceRect):
        self.polygon = polygon
        self.ws = ws
        self.obstacles = [_Obstacle(p, q) for p, q in obstacles]
        self.radius = polygon.circumradius

    def _inside(self, W: np.ndarray, margin=0.0) -> np.ndarray:
        m = np.asarray(margin, dtype=float)
        if m.ndim:
            m = m[:, None]
        lo = -EPS_SEP + m
        x, y = W[..., 0], W[..., 1]
        return ((x >= lo) & (x <= self.ws.width - lo) & (y >= lo) & (y <= self.ws.height - lo)).all(axis=-1)

    def poses_free(self, poses) -> np.ndarray:
        P = _poses_array(poses)
        W, Nw = _placed(self.polygon, P)
        ok = self._inside(W)
        for ob in self.obstacles:
            idx = np.nonzero(ok)[0]
            if not len(idx):
                break
            d2 = (P[idx, 0] - ob.cx) ** 2 + (P[idx, 1] - ob.cy) ** 2
            near = d2 < (self.radius + ob.r + 1e-6) ** 2
            if not near.any():
                continue
            sub = idx[near]
            ok[sub] = _separated(self.polygon, P[sub], W[sub], Nw[sub], ob, 0.0)
        return ok

    def pose_free(self, pose: Pose2) -> bool:
        return bool(self.poses_free([pose])[0])

    def segments_free(self, P: np.ndarray) -> bool:
        """Conservative continuous check along consecutive poses of ``P`` (n, 3)."""
        if len(P) == 1:
            return bool(self.poses_free(P)[0])
        W, Nw = _placed(self.polygon, P)
        dth = np.abs(np.remainder(P[1:, 2] - P[:-1, 2] + math.pi, TWO_PI) - math.pi)
        sag = self.radius * (1.0 - np.cos(dth / 2.0))
        # Hull of consecutive footprints must stay inside the rectangle by the sagitta.
        if not (self._inside(W[:-1], sag) & self._inside(W[1:], sag)).all():
            return False
        if not self._inside(W[-1:]).all():
            return False
        mid = 0.5 * (P[:-1, :2] + P[1:, :2])
        half = 0.5 * np.hypot(P[1:, 0] - P[:-1, 0], P[1:, 1] - P[:-1, 1])
        for ob in self.obstacles:
            d2 = (mid[:, 0] - ob.cx) ** 2 + (mid[:, 1] - ob.cy) ** 2
            near = np.nonzero(d2 < (self.radius + ob.r + half + sag + 1e-6) ** 2)[0]
            if not len(near):
                continue
            if not _hull_pairs_separated(self.polygon, P, W, Nw, near, sag[near], ob).all():
                return False
        return True


def _hull_pairs_separated(polygon, P, W, Nw, idx, sag, ob: _Obstacle) -> np.ndarray:
    """For pairs (i, i+1), i in idx: is hull(A_i U A_i+1) separated from ob by >= sag?

    Candidate axes: normals of both footprints, of the obstacle, and the
    normal of the translation direction. The set is complete for pure
    translation; with rotation a missed axis only makes the answer conservative.
    """
    need = sag - EPS_SEP
    Wa, Wb = W[idx], W[idx + 1]
    Wab = np.concatenate([Wa, Wb], axis=1)                       # (n, 2k, 2)
    d = P[idx + 1, :2] - P[idx, :2]
    dn = np.stack([-d[:, 1], d[:, 0]], axis=1)
    ln = np.linalg.norm(dn, axis=1, keepdims=True)
    dn = np.where(ln > 1e-15, dn / np.where(ln > 1e-15, ln, 1.0), Nw[idx, 0])
    axes = np.concatenate([Nw[idx], Nw[idx + 1], dn[:, None, :]], axis=1)  # (n, 2k+1, 2)
    pa = np.einsum("nkd,nvd->nkv", axes, Wab)
    pb = np.einsum("nkd,md->nkm", axes, ob.verts)
    gap = np.maximum(pb.min(axis=2) - pa.max(axis=2), pa.min(axis=2) - pb.max(axis=2))
    sep = (gap >= need[:, None]).any(axis=1)
    projA = np.einsum("nvd,md->nvm", Wab, ob.normals)
    gap2 = np.maximum(ob.smin[None, :] - projA.max(axis=1), projA.min(axis=1) - ob.smax[None, :])
    sep |= (gap2 >= need[:, None]).any(axis=1)
    return sep


def overlap(polyA: ConvexPolygon, poseA: Pose2, polyB: ConvexPolygon, poseB: Pose2) -> bool:
    """True iff the placed interiors intersect by more than EPS_SEP on every SAT axis."""
    if math.hypot(poseA.x - poseB.x, poseA.y - poseB.y) > polyA.circumradius + polyB.circumradius + 1e-6:
        return False
    A, B = transform(polyA, poseA), transform(polyB, poseB)
    for verts, norm_src, th in ((A, polyA, poseA.theta), (B, polyB, poseB.theta)):
        c, s = math.cos(th), math.sin(th)
        nb = norm_src.normals
        axes = np.stack([c * nb[:, 0] - s * nb[:, 1], s * nb[:, 0] + c * nb[:, 1]], axis=1)
        pa = A @ axes.T
        pb = B @ axes.T
        gap = np.maximum(pb.min(axis=0) - pa.max(axis=0), pa.min(axis=0) - pb.max(axis=0))
        if (gap >= -EPS_SEP).any():
            return False
    return True


def separation(polyA: ConvexPolygon, poseA: Pose2, polyB: ConvexPolygon, poseB: Pose2) -> float:
    """Largest SAT gap (negative = penetration depth along the best axis)."""
    A, B = transform(polyA, poseA), transform(polyB, poseB)
    best = -math.inf
    for src, th in ((polyA, poseA.theta), (polyB, poseB.theta)):
        c, s = math.cos(th), math.sin(th)
        nb = src.normals
        axes = np.stack([c * nb[:, 0] - s * nb[:, 1], s * nb[:, 0] + c * nb[:, 1]], axis=1)
        pa, pb = A @ axes.T, B @ axes.T
        gap = np.maximum(pb.min(axis=0) - pa.max(axis=0), pa.min(axis=0) - pb.max(axis=0))
        best = max(best, float(gap.max()))
    return best


def inside_workspace(polygon: ConvexPolygon, pose: Pose2, ws: WorkspaceRect) -> bool:
    W = transform(polygon, pose)
    return bool(((W[:, 0] >= -EPS_SEP) & (W[:, 0] <= ws.width + EPS_SEP)
                 & (W[:, 1] >= -EPS_SEP) & (W[:, 1] <= ws.height + EPS_SEP)).all())


def _dyadic_count(n: float) -> int:
    """Smallest power of two >= n (and >= 1)."""
    if n <= 1.0:
        return 1
    return 1 << math.ceil(math.log2(n - 1e-12))


def interpolate(waypoints: Sequence[Pose2], step: float, radius: float) -> np.ndarray:
    """Dense poses (n, 3) along the waypoints.

    Each segment is split into a power-of-two number of pieces so that
    translation per piece is <= step and rotation per piece is <= step/radius.
    Power-of-two splits make the pose set at step s a superset of the set at
    any coarser power-of-two multiple of s.
    """
    if len(waypoints) < 2:
        raise MalformedPath("a path needs at least two waypoints")
    if step <= 0:
        raise ValueError("step must be positive")
    out = [np.array([waypoints[0].as_tuple()])]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        dth = angle_diff(a.theta, b.theta)
        dxy = math.hypot(b.x - a.x, b.y - a.y)
        n = _dyadic_count(max(dxy / step, abs(dth) * radius / step))
        t = np.arange(1, n + 1) / n
        seg = np.empty((n, 3))
        seg[:, 0] = a.x + t * (b.x - a.x)
        seg[:, 1] = a.y + t * (b.y - a.y)
        seg[:, 2] = a.theta + t * dth
        seg[-1] = b.as_tuple()
        out.append(seg)
    P = np.concatenate(out)
    P[:, 2] = np.remainder(P[:, 2] + math.pi, TWO_PI) - math.pi
    return P


def path_clear(obj: ConvexPolygon, waypoints: Sequence[Pose2],
               obstacles: Sequence[tuple[ConvexPolygon, Pose2]], ws: WorkspaceRect,
               step: float = DEFAULT_STEP) -> bool:
    """Every interpolated pose is overlap-free and inside the workspace."""
    P = interpolate(waypoints, step, obj.circumradius)
    return bool(CollisionChecker(obj, obstacles, ws).poses_free(P).all())


def sweep_clear(obj: ConvexPolygon, waypoints: Sequence[Pose2],
                obstacles: Sequence[tuple[ConvexPolygon, Pose2]], ws: WorkspaceRect,
                step: float = DEFAULT_STEP) -> bool:
    """Continuous clearance: the convex hull of each pair of consecutive
    interpolated footprints, grown by the rotational sagitta, is obstacle-free.

    Implies ``path_clear`` at this and every finer step.
    """
    P = interpolate(waypoints, step, obj.circumradius)
    return CollisionChecker(obj, obstacles, ws).segments_free(P)
