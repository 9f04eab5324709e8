"""Domain vocabulary: convex bodies, split disjunctions, cuts, and pointwise
evaluation.

Conventions
-----------
Epigraphical families (paraboloid, cone, hyperboloid, p-cone) live in
R^n x R with an extra epigraph variable t appended as the last coordinate of
a point.  Level-set families (ellipsoid, p-ball) live in R^n.

A cut's defect is <= 0 exactly when the inequality holds at the point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimMismatch, InputError
from .linalg import as_mat, as_vec, inverse


class Family(str, enum.Enum):
    PARABOLOID = "paraboloid"   # ||B(x-c)||^2 <= t
    CONE = "cone"               # ||B(x-c)|| <= t
    ELLIPSOID = "ellipsoid"     # ||B(x-c)|| <= r
    HYPERBOLOID = "hyperboloid" # sqrt(||x||^2 + l^2) <= t
    PCONE = "pcone"             # ||x||_p <= t
    PBALL = "pball"             # ||x||_p <= r


EPIGRAPHICAL = {Family.PARABOLOID, Family.CONE, Family.HYPERBOLOID, Family.PCONE}


class Position(str, enum.Enum):
    BELOW = "below"
    INSIDE = "inside"
    ABOVE = "above"


class CaseLabel(str, enum.Enum):
    ELLIPSOID_PROPER = "EllipsoidProper"
    ELLIPSOID_CG_ABOVE = "EllipsoidCGAbove"
    ELLIPSOID_CG_BELOW = "EllipsoidCGBelow"
    ELLIPSOID_NO_CUT = "EllipsoidNoCut"
    ELLIPSOID_EMPTY = "EllipsoidEmpty"
    PARABOLOID_SIMPLE = "ParaboloidSimple"
    PARABOLOID_NO_CUT = "ParaboloidNoCut"
    PARABOLOID_LINEAR_HI = "ParaboloidLinearHi"
    PARABOLOID_LINEAR_LO = "ParaboloidLinearLo"
    PARABOLOID_CONIC = "ParaboloidConic"
    CONE_SIMPLE = "ConeSimple"
    CONE_LINEAR_LO = "ConeLinearLo"
    CONE_LINEAR_HI = "ConeLinearHi"
    CONE_CONIC = "ConeConic"
    CONE_NO_CUT = "ConeNoCut"
    PCONE_CONIC = "PConeConic"
    PCONE_NO_CUT = "PConeNoCut"
    PBALL_SECANT = "PBallSecant"
    HYPER_SYMMETRIC = "HyperSymmetric"
    HYPER_ASYMMETRIC = "HyperAsymmetric"


@dataclass(frozen=True)
class ConvexBody:
    """Tagged description of a base set."""

    family: Family
    n: int
    B: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    r: Optional[float] = None
    l: Optional[float] = None
    p: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError("ambient dimension must be >= 1")
        fam = self.family
        if fam in (Family.PARABOLOID, Family.CONE, Family.ELLIPSOID):
            B = np.eye(self.n) if self.B is None else as_mat(self.B)
            c = np.zeros(self.n) if self.c is None else as_vec(self.c)
            if B.shape != (self.n, self.n) or c.size != self.n:
                raise DimMismatch("B/c shape does not match n")
            inverse(B)  # invertibility check; raises Singular
            object.__setattr__(self, "B", B)
            object.__setattr__(self, "c", c)
        else:
            if self.B is not None or self.c is not None:
                raise InputError(f"{fam.value} does not take B/c parameters")
        if fam in (Family.ELLIPSOID, Family.PBALL):
            if self.r is None or self.r <= 0:
                raise InputError("radius r must be > 0")
        if fam is Family.HYPERBOLOID:
            if self.l is None or self.l == 0:
                raise InputError("hyperboloid offset l must be nonzero")
        if fam in (Family.PCONE, Family.PBALL):
            if self.p is None or self.p < 1 or int(self.p) != self.p:
                raise InputError("norm order p must be an integer >= 1")
            object.__setattr__(self, "p", int(self.p))

    @property
    def epigraphical(self) -> bool:
        return self.family in EPIGRAPHICAL

    @property
    def point_dim(self) -> int:
        return self.n + 1 if self.epigraphical else self.n


@dataclass(frozen=True)
class SplitDisjunction:
    """Forbidden strip pi^T x + pi_hat * t in [pi0, pi1]."""

    pi: np.ndarray
    pi0: float
    pi1: float
    pi_hat: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pi", as_vec(self.pi))
        if not self.pi0 < self.pi1:
            raise InputError("split requires pi0 < pi1")
        if np.all(self.pi == 0) and self.pi_hat == 0:
            raise InputError("split direction (pi, pi_hat) must be nonzero")

    def value(self, point: np.ndarray, with_t: bool) -> float:
        point = as_vec(point)
        n = self.pi.size
        if with_t:
            if point.size != n + 1:
                raise DimMismatch("point must carry a t coordinate")
            return float(self.pi @ point[:n] + self.pi_hat * point[n])
        if point.size != n:
            raise DimMismatch("point/split dimension mismatch")
        return float(self.pi @ point)


# --- cuts -------------------------------------------------------------------

@dataclass(frozen=True)
class NormCut:
    """||M x + m||_p <= q^T x + h*t + k."""

    M: np.ndarray
    m: np.ndarray
    p: int
    q: np.ndarray
    h: float
    k: float

    def __post_init__(self):
        object.__setattr__(self, "M", as_mat(self.M))
        object.__setattr__(self, "m", as_vec(self.m))
        object.__setattr__(self, "q", as_vec(self.q))
        if self.p < 1:
            raise InputError("norm order p must be >= 1")

    @property
    def nx(self) -> int:
        return self.M.shape[1]


@dataclass(frozen=True)
class QuadraticCut:
    """x^T E x + a^T x + f <= t_coef * t."""

    E: np.ndarray
    a: np.ndarray
    f: float
    t_coef: float

    def __post_init__(self):
        object.__setattr__(self, "E", as_mat(self.E))
        object.__setattr__(self, "a", as_vec(self.a))

    @property
    def nx(self) -> int:
        return self.E.shape[1]


@dataclass(frozen=True)
class LinearCut:
    """g^T x + h*t {<=,>=} k."""

    g: np.ndarray
    h: float
    k: float
    sense: str  # "le" or "ge"

    def __post_init__(self):
        object.__setattr__(self, "g", as_vec(self.g))
        if self.sense not in ("le", "ge"):
            raise InputError("sense must be 'le' or 'ge'")

    @property
    def nx(self) -> int:
        return self.g.size


@dataclass(frozen=True)
class NoCut:
    """The hull equals the body; the cut is vacuous."""


@dataclass(frozen=True)
class EmptyHull:
    """The hull is empty; every point is cut off."""


Cut = NormCut | QuadraticCut | LinearCut | NoCut | EmptyHull


def _split_xt(point: np.ndarray, nx: int) -> tuple[np.ndarray, float]:
    point = as_vec(point)
    if point.size == nx + 1:
        return point[:nx], float(point[nx])
    if point.size == nx:
        return point, 0.0
    raise DimMismatch(f"point dim {point.size} incompatible with cut dim {nx}")


def eval_body(body: ConvexBody, point) -> float:
    """Defining-inequality defect; <= 0 iff the point is in the body."""
    point = as_vec(point)
    if point.size != body.point_dim:
        raise DimMismatch(
            f"{body.family.value} expects points of dim {body.point_dim}")
    fam = body.family
    if body.epigraphical:
        x, t = point[:body.n], float(point[body.n])
        if fam is Family.PARABOLOID:
            return float(np.sum(np.square(body.B @ (x - body.c)))) - t
        if fam is Family.CONE:
            return float(np.linalg.norm(body.B @ (x - body.c))) - t
        if fam is Family.HYPERBOLOID:
            return math.sqrt(float(x @ x) + body.l ** 2) - t
        # p-cone
        return _pnorm(x, body.p) - t
    x = point
    if fam is Family.ELLIPSOID:
        return float(np.linalg.norm(body.B @ (x - body.c))) - body.r
    # p-ball
    return _pnorm(x, body.p) - body.r


def _pnorm(v: np.ndarray, p: int) -> float:
    if p == 1:
        return float(np.sum(np.abs(v)))
    if p == 2:
        return float(np.linalg.norm(v))
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def eval_cut(cut: Cut, point) -> float:
    """Cut-inequality defect; <= 0 iff the cut holds at the point."""
    if isinstance(cut, NoCut):
        return -math.inf
    if isinstance(cut, EmptyHull):
        return math.inf
    if isinstance(cut, NormCut):
        x, t = _split_xt(point, cut.nx)
        lhs = _pnorm(cut.M @ x + cut.m, cut.p)
        return lhs - (float(cut.q @ x) + cut.h * t + cut.k)
    if isinstance(cut, QuadraticCut):
        x, t = _split_xt(point, cut.nx)
        return float(x @ cut.E @ x + cut.a @ x) + cut.f - cut.t_coef * t
    if isinstance(cut, LinearCut):
        x, t = _split_xt(point, cut.nx)
        v = float(cut.g @ x) + cut.h * t
        return v - cut.k if cut.sense == "le" else cut.k - v
    raise TypeError(f"not a cut: {cut!r}")


def split_position(split: SplitDisjunction, point, tol: float = 1e-9) -> Position:
    """Classify a point against the strip, with boundary tolerance.

    tol is relative to max(1, |pi0|, |pi1|).
    """
    scale = max(1.0, abs(split.pi0), abs(split.pi1))
    eps = tol * scale
    point = as_vec(point)
    with_t = point.size == split.pi.size + 1
    v = split.value(point, with_t)
    if v <= split.pi0 + eps and v < split.pi1 - eps:
        return Position.BELOW
    if v >= split.pi1 - eps:
        return Position.ABOVE
    return Position.INSIDE
