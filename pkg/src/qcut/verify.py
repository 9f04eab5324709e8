"""Sampling-based validity checks and a brute-force 2D hull oracle.

The oracle is deliberately independent of the closed-form machinery: it
rasterizes the body minus the forbidden interior, takes the convex hull of
the surviving grid points by monotone chain, and answers membership queries
against that polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.ndimage import binary_erosion

from .errors import DimUnsupported, EmptySample
from .linalg import inverse
from .model import (
    ConvexBody,
    Cut,
    EmptyHull,
    Family,
    LinearCut,
    NoCut,
    NormCut,
    QuadraticCut,
    SplitDisjunction,
)


@dataclass(frozen=True)
class ForbiddenQuadratic:
    """Forbidden set {(x, t) : ||A(x - d)||^2 + q + gamma*t <= 0}."""

    A: np.ndarray
    d: np.ndarray
    q: float
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float))


Forbidden = Union[SplitDisjunction, ForbiddenQuadratic]


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    count: int
    box: Optional[np.ndarray] = None  # shape (n, 2) bounds on x
    t_cap: Optional[float] = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.box is not None:
            box = np.asarray(self.box, dtype=float)
            if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 0] >= box[:, 1]):
                raise ValueError("box must be (n, 2) with lo < hi")
            object.__setattr__(self, "box", box)


@dataclass(frozen=True)
class VerifyReport:
    checked: int
    max_violation: float
    worst_point: Optional[np.ndarray]
    passed: bool


# --- batched evaluation ------------------------------------------------------

def eval_body_batch(body: ConvexBody, P: np.ndarray) -> np.ndarray:
    """Body defects for points stacked as rows of P."""
    P = np.asarray(P, dtype=float)
    fam = body.family
    if body.epigraphical:
        X, T = P[:, :body.n], P[:, body.n]
        if fam is Family.PARABOLOID:
            Z = (X - body.c) @ body.B.T
            return np.sum(Z * Z, axis=1) - T
        if fam is Family.CONE:
            Z = (X - body.c) @ body.B.T
            return np.sqrt(np.sum(Z * Z, axis=1)) - T
        if fam is Family.HYPERBOLOID:
            return np.sqrt(np.sum(X * X, axis=1) + body.l ** 2) - T
        return _pnorm_rows(X, body.p) - T
    if fam is Family.ELLIPSOID:
        Z = (P - body.c) @ body.B.T
        return np.sqrt(np.sum(Z * Z, axis=1)) - body.r
    return _pnorm_rows(P, body.p) - body.r


def _pnorm_rows(X: np.ndarray, p: int) -> np.ndarray:
    if p == 1:
        return np.sum(np.abs(X), axis=1)
    if p == 2:
        return np.sqrt(np.sum(X * X, axis=1))
    return np.sum(np.abs(X) ** p, axis=1) ** (1.0 / p)


def forbidden_defect_batch(region: Forbidden, P: np.ndarray,
                           with_t: bool) -> np.ndarray:
    """Negative strictly inside the forbidden region, positive outside."""
    P = np.asarray(P, dtype=float)
    if isinstance(region, SplitDisjunction):
        n = region.pi.size
        v = P[:, :n] @ region.pi
        if with_t:
            v = v + region.pi_hat * P[:, n]
        return np.maximum(region.pi0 - v, v - region.pi1)
    n = region.d.size
    Z = (P[:, :n] - region.d) @ region.A.T
    out = np.sum(Z * Z, axis=1) + region.q
    if with_t:
        out = out + region.gamma * P[:, n]
    return out


def eval_cut_batch(cut: Cut, P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    if isinstance(cut, NoCut):
        return np.full(m, -np.inf)
    if isinstance(cut, EmptyHull):
        return np.full(m, np.inf)
    nx = cut.nx
    X = P[:, :nx]
    T = P[:, nx] if P.shape[1] == nx + 1 else np.zeros(m)
    if isinstance(cut, NormCut):
        lhs = _pnorm_rows(X @ cut.M.T + cut.m, cut.p)
        return lhs - (X @ cut.q + cut.h * T + cut.k)
    if isinstance(cut, QuadraticCut):
        return (np.einsum("ij,jk,ik->i", X, cut.E, X) + X @ cut.a
                + cut.f - cut.t_coef * T)
    if isinstance(cut, LinearCut):
        v = X @ cut.g + cut.h * T
        return v - cut.k if cut.sense == "le" else cut.k - v
    raise TypeError(f"not a cut: {cut!r}")


# --- sampling ----------------------------------------------------------------

def default_box(body: ConvexBody) -> np.ndarray:
    """Circumscribing box for level sets; a desk-scale box for epigraphs."""
    n = body.n
    if body.family is Family.ELLIPSOID:
        Binv = inverse(body.B)
        half = body.r * np.sqrt(np.sum(Binv * Binv, axis=1))
        return np.stack([body.c - half, body.c + half], axis=1)
    if body.family is Family.PBALL:
        return np.stack([-body.r * np.ones(n), body.r * np.ones(n)], axis=1)
    if body.family in (Family.PARABOLOID, Family.CONE):
        Binv = inverse(body.B)
        half = 3.0 * np.sqrt(np.sum(Binv * Binv, axis=1))
        return np.stack([body.c - half, body.c + half], axis=1)
    return np.stack([-3.0 * np.ones(n), 3.0 * np.ones(n)], axis=1)


def default_t_cap(body: ConvexBody, box: np.ndarray) -> float:
    """4x the largest boundary value of the epigraph function over the box
    corners (the function is convex, so corners attain the max)."""
    n = body.n
    corners = np.array(np.meshgrid(*[box[i] for i in range(n)],
                                   indexing="ij")).reshape(n, -1).T
    P = np.hstack([corners, np.zeros((corners.shape[0], 1))])
    vals = eval_body_batch(body, P)  # defect at t=0 equals the boundary value
    return 4.0 * float(np.max(vals))


def sample_body(body: ConvexBody, cfg: SampleConfig) -> np.ndarray:
    """Rejection-sample points of the body; deterministic in cfg.seed."""
    rng = np.random.default_rng(cfg.seed)
    box = cfg.box if cfg.box is not None else default_box(body)
    if box.shape[0] != body.n:
        raise ValueError("box rows must match the ambient dimension")
    lo, hi = box[:, 0].copy(), box[:, 1].copy()
    if body.epigraphical:
        t_cap = cfg.t_cap if cfg.t_cap is not None else default_t_cap(body, box)
        lo = np.append(lo, 0.0)
        hi = np.append(hi, t_cap)
    hits = []
    total = 0
    budget = max(200 * cfg.count, 20000)
    while total < cfg.count and budget > 0:
        batch = min(budget, max(4 * (cfg.count - total), 1024))
        P = rng.uniform(lo, hi, size=(batch, lo.size))
        ok = eval_body_batch(body, P) <= 0.0
        for row in P[ok]:
            hits.append(row)
            total += 1
            if total >= cfg.count:
                break
        budget -= batch
    if total == 0:
        raise EmptySample("no body point found in the sampling box")
    return np.array(hits)


def check_validity(body: ConvexBody, region: Forbidden, cut: Cut,
                   cfg: SampleConfig, tol: float = 1e-7) -> VerifyReport:
    """Every sampled body point outside the open forbidden region must
    satisfy the cut within tol."""
    P = sample_body(body, cfg)
    keep = forbidden_defect_batch(region, P, body.epigraphical) >= 0.0
    P = P[keep]
    if P.shape[0] == 0:
        return VerifyReport(checked=0, max_violation=0.0,
                            worst_point=None, passed=True)
    defects = eval_cut_batch(cut, P)
    worst = int(np.argmax(defects))
    max_violation = float(defects[worst])
    return VerifyReport(checked=P.shape[0], max_violation=max_violation,
                        worst_point=P[worst],
                        passed=bool(max_violation <= tol))


# --- 2D hull oracle ----------------------------------------------------------

def monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull of 2D points, counterclockwise, no repeated endpoint."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return np.array(pts, dtype=float).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 1e-12:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 1e-12:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=float)


class PolygonOracle:
    """Membership test against a convex polygon (counterclockwise).

    Distances are measured after dividing each axis by `scale`, so the
    tolerance is meaningful even when the two axes have very different
    extents (epigraph windows are tall and narrow).
    """

    def __init__(self, vertices: np.ndarray, tol: float, scale=(1.0, 1.0)):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        self.tol = float(tol)
        self.scale = np.asarray(scale, dtype=float)

    def contains(self, P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float).reshape(-1, 2) / self.scale
        V = self.vertices / self.scale
        k = V.shape[0]
        if k == 0:
            return np.zeros(P.shape[0], dtype=bool)
        if k == 1:
            return np.linalg.norm(P - V[0], axis=1) <= self.tol
        ok = np.ones(P.shape[0], dtype=bool)
        for i in range(k):
            a = V[i]
            b = V[(i + 1) % k]
            e = b - a
            if k == 2 and i == 1:
                break
            ne = max(float(np.linalg.norm(e)), 1e-30)
            cross = e[0] * (P[:, 1] - a[1]) - e[1] * (P[:, 0] - a[0])
            # signed distance to the edge line must exceed -tol
            ok &= cross >= -self.tol * ne
        if k == 2:
            # segment: also clamp to within tol of the line extent
            a, b = V
            e = b - a
            s = (P - a) @ e / float(e @ e)
            ok &= (s >= -self.tol) & (s <= 1.0 + self.tol)
            ok &= np.abs((P[:, 0] - a[0]) * e[1] - (P[:, 1] - a[1]) * e[0]) \
                <= self.tol * max(1e-30, float(np.linalg.norm(e)))
        return ok

    def __call__(self, point) -> bool:
        return bool(self.contains(np.asarray(point, dtype=float))[0])


def _plane_box(body: ConvexBody, box2=None, t_cap=None) -> np.ndarray:
    if body.point_dim != 2:
        raise DimUnsupported("oracle needs a 2D feasible region")
    xbox = default_box(body)
    if body.epigraphical:
        cap = t_cap if t_cap is not None else default_t_cap(body, xbox)
        out = np.array([[xbox[0, 0], xbox[0, 1]], [0.0, cap]])
    else:
        out = xbox
    if box2 is not None:
        out = np.asarray(box2, dtype=float).reshape(2, 2)
    return out


def _grid_points(box: np.ndarray, density: int):
    xs = np.linspace(box[0, 0], box[0, 1], density)
    ys = np.linspace(box[1, 0], box[1, 1], density)
    XX, YY = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([XX.ravel(), YY.ravel()], axis=1)


def hull_oracle_2d(body: ConvexBody, region: Forbidden, grid_density: int,
                   box=None, t_cap=None) -> PolygonOracle:
    """Brute-force hull of (body minus forbidden interior) on a grid."""
    bb = _plane_box(body, box, t_cap)
    P = _grid_points(bb, grid_density)
    keep = (eval_body_batch(body, P) <= 0.0) & \
        (forbidden_defect_batch(region, P, body.epigraphical) >= 0.0)
    hull = monotone_chain(P[keep]) if np.any(keep) else np.empty((0, 2))
    # one cell of slack in the box-scaled metric covers rasterization error
    return PolygonOracle(hull, tol=1.0 / (grid_density - 1),
                         scale=bb[:, 1] - bb[:, 0])


def compare_to_oracle(body: ConvexBody, region: Forbidden, cut: Cut,
                      grid_density: int = 300, band: int = 2) -> int:
    """Mismatches between the closed-form hull description (body and cut)
    and the rasterized oracle, ignoring a band of cells around either
    boundary.

    For epigraphs the oracle is rasterized on a 3x enlarged window so the
    polygon is not an artifact of the comparison window; the count itself is
    taken on the nominal window only.
    """
    bb = _plane_box(body)
    if body.epigraphical:
        center = 0.5 * (bb[0, 0] + bb[0, 1])
        half = 1.5 * (bb[0, 1] - bb[0, 0])
        big = np.array([[center - half, center + half], [0.0, 3.0 * bb[1, 1]]])
        oracle = hull_oracle_2d(body, region, 3 * grid_density, box=big)
    else:
        oracle = hull_oracle_2d(body, region, grid_density)

    P = _grid_points(bb, grid_density)
    ours = ((eval_body_batch(body, P) <= 0.0)
            & (eval_cut_batch(cut, P) <= 0.0)).reshape(grid_density,
                                                       grid_density)
    theirs = oracle.contains(P).reshape(grid_density, grid_density)

    def confident(mask):
        return binary_erosion(mask, iterations=band) | \
            binary_erosion(~mask, iterations=band)

    sure = confident(ours) & confident(theirs)
    return int(np.sum((ours != theirs) & sure))
