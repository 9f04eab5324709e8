"""Closed-form split cuts for quadratic, conic, and p-norm bodies.

Each family-specific constructor returns a (cut, case label) pair.  The
`split_cut` dispatcher standardizes general (B, c) data where needed and
lifts the resulting cut back to the original coordinates.

Tolerance policy: case boundaries are compared with an absolute-relative
tolerance 1e-9 * max(1, |pi0|, |pi1|); ties resolve toward the branch that
produces the weaker (larger) hull, so emitted cuts stay valid under
roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInterval,
    SliceOutsideBall,
    UnsupportedCombination,
    ZeroNotInterior,
)
from .linalg import inverse, project_par, project_perp
from .model import (
    CaseLabel,
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


def _tol(pi0: float, pi1: float) -> float:
    return 1e-9 * max(1.0, abs(pi0), abs(pi1))


@dataclass(frozen=True)
class SecantCoeffs:
    """Affine a*u + b through (pi0, f0) and (pi1, f1)."""

    a: float
    b: float


@dataclass(frozen=True)
class HomogCoeffs:
    """Coefficients with |a*s + b| matching |s| at both endpoints."""

    a: float
    b: float


def secant_coeffs(f0: float, f1: float, pi0: float, pi1: float) -> SecantCoeffs:
    if pi1 - pi0 < 1e-12 * max(1.0, abs(pi0), abs(pi1)):
        raise DegenerateInterval(f"[{pi0}, {pi1}] is degenerate")
    if not (math.isfinite(f0) and math.isfinite(f1)):
        raise DegenerateInterval("endpoint values must be finite")
    d = pi1 - pi0
    return SecantCoeffs(a=(f1 - f0) / d, b=(pi1 * f0 - pi0 * f1) / d)


def homogeneous_coeffs(pi0: float, pi1: float) -> HomogCoeffs:
    if not pi0 < 0 < pi1:
        raise ZeroNotInterior(f"0 must be interior to ({pi0}, {pi1})")
    d = pi1 - pi0
    return HomogCoeffs(a=(pi0 + pi1) / d, b=-2.0 * pi1 * pi0 / d)


# --- elementary families ----------------------------------------------------

def split_cut_p_cone(n: int, k: int, p: int, pi0: float, pi1: float):
    """Elementary split cut for {||x||_p <= t} on coordinate k (1-based)."""
    if not 1 <= k <= n:
        raise UnsupportedCombination(f"axis {k} out of range for n={n}")
    eps = _tol(pi0, pi1)
    if pi0 >= -eps or pi1 <= eps:
        return NoCut(), CaseLabel.PCONE_NO_CUT
    co = homogeneous_coeffs(pi0, pi1)
    ek = np.zeros(n)
    ek[k - 1] = 1.0
    M = np.eye(n) + (co.a - 1.0) * np.outer(ek, ek)
    cut = NormCut(M=M, m=co.b * ek, p=p, q=np.zeros(n), h=1.0, k=0.0)
    return cut, CaseLabel.PCONE_CONIC


def split_cut_p_ball(n: int, k: int, p: int, r: float, pi0: float, pi1: float):
    """Elementary split cut for {||x||_p <= r} on coordinate k (1-based)."""
    if not 1 <= k <= n:
        raise UnsupportedCombination(f"axis {k} out of range for n={n}")
    eps = _tol(pi0, pi1)
    if abs(pi0) > r + eps or abs(pi1) > r + eps:
        raise SliceOutsideBall("disjunction bounds must lie within [-r, r]")
    u0, u1 = min(abs(pi0), r), min(abs(pi1), r)

    def f(u):
        return -((r ** p - u ** p) ** (1.0 / p))

    co = secant_coeffs(f(u0), f(u1), pi0, pi1)
    ek = np.zeros(n)
    ek[k - 1] = 1.0
    M = np.eye(n) - np.outer(ek, ek)
    cut = NormCut(M=M, m=np.zeros(n), p=p, q=-co.a * ek, h=0.0, k=-co.b)
    return cut, CaseLabel.PBALL_SECANT


# --- simple quadratic families (native B, c formulas) -----------------------

def split_cut_paraboloid_simple(B, c, pi, pi0: float, pi1: float):
    """Split cut for {||B(x-c)||^2 <= t} with a disjunction not involving t."""
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    pi = np.asarray(pi, dtype=float)
    w = inverse(B).T @ pi
    nw2 = float(w @ w)
    pc = float(pi @ c)
    a = (pi0 + pi1 - 2.0 * pc) / nw2
    b = -(pi1 - pc) * (pi0 - pc) / nw2
    Pperp = np.eye(B.shape[0]) - np.outer(w, w) / nw2
    Bh = Pperp @ B
    E = Bh.T @ Bh
    lin = a * pi - 2.0 * E @ c
    const = float(c @ E @ c) - a * pc + b
    return QuadraticCut(E=E, a=lin, f=const, t_coef=1.0), CaseLabel.PARABOLOID_SIMPLE


def split_cut_cone_simple(B, c, pi, pi0: float, pi1: float):
    """Split cut for {||B(x-c)|| <= t} with a disjunction not involving t."""
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    pi = np.asarray(pi, dtype=float)
    pc = float(pi @ c)
    eps = _tol(pi0, pi1)
    if pc <= pi0 + eps or pc >= pi1 - eps:
        return NoCut(), CaseLabel.CONE_NO_CUT
    d = pi1 - pi0
    a = (pi1 + pi0 - 2.0 * pc) / d
    b = -2.0 * (pi1 - pc) * (pi0 - pc) / d
    w = inverse(B).T @ pi
    nw2 = float(w @ w)
    P = np.outer(w, w) / nw2
    Bh = (np.eye(B.shape[0]) - P + a * P) @ B
    ch = (b / nw2) * w
    cut = NormCut(M=Bh, m=ch - Bh @ c, p=2, q=np.zeros(c.size), h=1.0, k=0.0)
    return cut, CaseLabel.CONE_SIMPLE


def split_cut_ellipsoid(B, c, r: float, pi, pi0: float, pi1: float):
    """Split cut for the ellipsoid {||B(x-c)|| <= r}; five-way case split."""
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    pi = np.asarray(pi, dtype=float)
    w = inverse(B).T @ pi
    nw = float(np.linalg.norm(w))
    pc = float(pi @ c)
    lo, hi = pc - r * nw, pc + r * nw
    eps = _tol(pi0, pi1)
    n = c.size

    if pi1 <= lo + eps or pi0 >= hi - eps:
        # strip misses the ellipsoid (boundary touching included)
        return NoCut(), CaseLabel.ELLIPSOID_NO_CUT
    in0 = lo - eps <= pi0 <= hi + eps
    in1 = lo - eps <= pi1 <= hi + eps
    if in0 and in1:
        u0, u1 = pi0 - pc, pi1 - pc

        def f(u):
            arg = r * r - (u * u) / (nw * nw)
            return -math.sqrt(max(arg, 0.0))

        a = (f(u0) - f(u1)) / (pi1 - pi0)
        b = (u1 * f(u0) - u0 * f(u1)) / (pi1 - pi0)
        Pperp = np.eye(n) - np.outer(w, w) / (nw * nw)
        M = Pperp @ B
        cut = NormCut(M=M, m=-M @ c, p=2, q=a * pi, h=0.0, k=-a * pc - b)
        return cut, CaseLabel.ELLIPSOID_PROPER
    if (not in0) and in1:
        cut = LinearCut(g=pi, h=0.0, k=pi1, sense="ge")
        return cut, CaseLabel.ELLIPSOID_CG_ABOVE
    if in0 and not in1:
        cut = LinearCut(g=pi, h=0.0, k=pi0, sense="le")
        return cut, CaseLabel.ELLIPSOID_CG_BELOW
    # strip strictly contains the ellipsoid
    return EmptyHull(), CaseLabel.ELLIPSOID_EMPTY


# --- general (t-affecting) disjunctions on standard bodies ------------------

def split_cut_paraboloid_general(pi, pi_hat: float, pi0: float, pi1: float):
    """Split cut for the standard paraboloid {||x||^2 <= t} with a
    disjunction pi^T x + pi_hat * t in [pi0, pi1]."""
    pi = np.asarray(pi, dtype=float)
    if pi_hat == 0:
        raise UnsupportedCombination("pi_hat must be nonzero here")
    n = pi.size
    np2 = float(pi @ pi)
    m0 = -np2 / (4.0 * pi_hat)
    eps = _tol(pi0, pi1)

    if pi_hat > 0 and pi1 <= m0 + eps:
        return NoCut(), CaseLabel.PARABOLOID_NO_CUT
    if pi_hat < 0 and pi0 >= m0 - eps:
        return NoCut(), CaseLabel.PARABOLOID_NO_CUT
    if pi_hat > 0 and pi0 < m0 - eps < m0 + eps < pi1:
        cut = LinearCut(g=pi, h=pi_hat, k=pi1, sense="ge")
        return cut, CaseLabel.PARABOLOID_LINEAR_HI
    if pi_hat < 0 and pi0 < m0 - eps < m0 + eps < pi1:
        cut = LinearCut(g=pi, h=pi_hat, k=pi0, sense="le")
        return cut, CaseLabel.PARABOLOID_LINEAR_LO

    # remaining case: pi_hat > 0 with m0 <= pi0, or pi_hat < 0 with pi1 <= m0
    d0 = max(np2 + 4.0 * pi0 * pi_hat, 0.0)
    d1 = max(np2 + 4.0 * pi1 * pi_hat, 0.0)
    root = math.sqrt(d0) * math.sqrt(d1)
    f = math.sqrt(max(np2 + 2.0 * (pi0 + pi1) * pi_hat - root, 0.0))
    cc = f / (math.sqrt(2.0) * (pi1 - pi0) * pi_hat)
    dd = cc * pi_hat
    ee = (np2 + root) / (4.0 * math.sqrt(2.0) * (pi1 - pi0) * pi_hat ** 2) * f
    if np2 == 0.0:
        # convention 0/0 := 0 kills the pi-aligned term: ||x|| <= d t + e
        cut = NormCut(M=np.eye(n), m=np.zeros(n), p=2,
                      q=np.zeros(n), h=dd, k=ee)
        return cut, CaseLabel.PARABOLOID_CONIC
    bb = np2 / (2.0 * pi_hat)
    # P_perp x + ((pi^T x + b)/||pi||^2) pi  ==  x + (b/||pi||^2) pi
    cut = NormCut(M=np.eye(n), m=(bb / np2) * pi, p=2,
                  q=cc * pi, h=dd, k=ee)
    return cut, CaseLabel.PARABOLOID_CONIC


def split_cut_cone_general(pi, pi_hat: float, pi0: float, pi1: float):
    """Split cut for the standard cone {||x|| <= t} with a disjunction
    pi^T x + pi_hat * t in [pi0, pi1]."""
    pi = np.asarray(pi, dtype=float)
    if pi_hat == 0:
        raise UnsupportedCombination("pi_hat must be nonzero here")
    n = pi.size
    npi = float(np.linalg.norm(pi))
    eps = _tol(pi0, pi1)
    if pi0 >= -eps or pi1 <= eps:
        return NoCut(), CaseLabel.CONE_NO_CUT
    if pi_hat <= -npi + eps:
        cut = LinearCut(g=pi, h=pi_hat, k=pi0, sense="le")
        return cut, CaseLabel.CONE_LINEAR_LO
    if pi_hat >= npi - eps:
        cut = LinearCut(g=pi, h=pi_hat, k=pi1, sense="ge")
        return cut, CaseLabel.CONE_LINEAR_HI

    np2 = npi * npi
    diff = np2 - pi_hat ** 2
    f = math.sqrt(diff * (np2 * (pi0 - pi1) ** 2 - (pi0 + pi1) ** 2 * pi_hat ** 2))
    a = (pi0 + pi1) * diff / f
    b = -2.0 * pi0 * pi1 * np2 / f
    cc = -4.0 * pi0 * pi1 * pi_hat / ((pi1 - pi0) * f)
    dd = f / ((pi1 - pi0) * diff)
    ee = 2.0 * pi0 * pi1 * (pi0 + pi1) * pi_hat / ((pi1 - pi0) * f)
    Pperp = np.eye(n) - np.outer(pi, pi) / np2
    M = Pperp + (a / np2) * np.outer(pi, pi)
    cut = NormCut(M=M, m=(b / np2) * pi, p=2, q=cc * pi, h=dd, k=ee)
    return cut, CaseLabel.CONE_CONIC


def split_cut_hyperboloid(n: int, l: float, pi, pi0: float, pi1: float):
    """Split cut for {sqrt(||x||^2 + l^2) <= t}."""
    pi = np.asarray(pi, dtype=float)
    np2 = float(pi @ pi)
    eps = _tol(pi0, pi1)
    Pperp = np.eye(n) - np.outer(pi, pi) / np2
    if abs(abs(pi0) - abs(pi1)) <= eps:
        bh = math.sqrt(l * l * np2 + pi1 * pi1)
        cut = NormCut(M=Pperp, m=(bh / np2) * pi, p=2,
                      q=np.zeros(n), h=1.0, k=0.0)
        return cut, CaseLabel.HYPER_SYMMETRIC
    s00 = l * l * np2 + pi0 * pi0
    s11 = l * l * np2 + pi1 * pi1
    root = math.sqrt(s00 * s11)
    a = math.sqrt(max(2.0 * l * l * np2 + pi0 * pi0 + pi1 * pi1 - 2.0 * root, 0.0))
    a /= (pi1 - pi0)
    b = (l * l * np2 - pi0 * pi1 + root) / (pi0 + pi1) * a
    M = Pperp + (a / np2) * np.outer(pi, pi)
    cut = NormCut(M=M, m=(b / np2) * pi, p=2, q=np.zeros(n), h=1.0, k=0.0)
    return cut, CaseLabel.HYPER_ASYMMETRIC


# --- lifting ----------------------------------------------------------------

def lift_affine(cut: Cut, B, c) -> Cut:
    """Compose a cut written in coordinates x~ = B(x - c) with that map, so
    eval_cut(lifted, x) == eval_cut(cut, B(x - c)) for all x."""
    if isinstance(cut, (NoCut, EmptyHull)):
        return cut
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    inverse(B)  # raises Singular when not invertible
    if isinstance(cut, NormCut):
        M = cut.M @ B
        return NormCut(M=M, m=cut.m - M @ c, p=cut.p,
                       q=B.T @ cut.q, h=cut.h,
                       k=cut.k - float(cut.q @ B @ c))
    if isinstance(cut, QuadraticCut):
        E = B.T @ cut.E @ B
        lin = B.T @ cut.a - 2.0 * E @ c
        const = float(c @ E @ c) - float(cut.a @ B @ c) + cut.f
        return QuadraticCut(E=E, a=lin, f=const, t_coef=cut.t_coef)
    if isinstance(cut, LinearCut):
        g = B.T @ cut.g
        return LinearCut(g=g, h=cut.h, k=cut.k + float(cut.g @ B @ c),
                         sense=cut.sense)
    raise TypeError(f"not a cut: {cut!r}")


# --- dispatcher -------------------------------------------------------------

def _elementary_axis(pi: np.ndarray):
    """Return (k 1-based, scale) when pi is a positive multiple of a unit
    vector, else None."""
    nz = np.nonzero(pi)[0]
    if nz.size != 1:
        return None
    return int(nz[0]) + 1, float(pi[nz[0]])


def split_cut(body: ConvexBody, split: SplitDisjunction):
    """Family dispatcher; returns (cut, case label) in original coordinates."""
    pi, ph = split.pi, split.pi_hat
    pi0, pi1 = split.pi0, split.pi1
    if pi.size != body.n:
        raise UnsupportedCombination("split direction dimension != body n")
    fam = body.family

    if fam is Family.PARABOLOID:
        if ph == 0:
            return split_cut_paraboloid_simple(body.B, body.c, pi, pi0, pi1)
        w = inverse(body.B).T @ pi
        pc = float(pi @ body.c)
        cut, label = split_cut_paraboloid_general(w, ph, pi0 - pc, pi1 - pc)
        return lift_affine(cut, body.B, body.c), label
    if fam is Family.CONE:
        if ph == 0:
            return split_cut_cone_simple(body.B, body.c, pi, pi0, pi1)
        w = inverse(body.B).T @ pi
        pc = float(pi @ body.c)
        cut, label = split_cut_cone_general(w, ph, pi0 - pc, pi1 - pc)
        return lift_affine(cut, body.B, body.c), label
    if fam is Family.ELLIPSOID:
        if ph != 0:
            raise UnsupportedCombination("level sets take no t in the split")
        return split_cut_ellipsoid(body.B, body.c, body.r, pi, pi0, pi1)
    if fam is Family.HYPERBOLOID:
        if ph != 0:
            raise UnsupportedCombination(
                "no closed form for hyperboloids with t-affecting splits")
        return split_cut_hyperboloid(body.n, body.l, pi, pi0, pi1)
    if fam is Family.PCONE:
        if ph != 0:
            raise UnsupportedCombination(
                "t-affecting splits are not supported for p-cones")
        ax = _elementary_axis(pi)
        if ax is None:
            raise UnsupportedCombination("p-cone splits must be elementary")
        k, s = ax
        lo, hi = (pi0 / s, pi1 / s) if s > 0 else (pi1 / s, pi0 / s)
        return split_cut_p_cone(body.n, k, body.p, lo, hi)
    if fam is Family.PBALL:
        if ph != 0:
            raise UnsupportedCombination("level sets take no t in the split")
        ax = _elementary_axis(pi)
        if ax is None:
            raise UnsupportedCombination("p-ball splits must be elementary")
        k, s = ax
        lo, hi = (pi0 / s, pi1 / s) if s > 0 else (pi1 / s, pi0 / s)
        return split_cut_p_ball(body.n, k, body.p, body.r, lo, hi)
    raise UnsupportedCombination(f"unknown family {fam}")
