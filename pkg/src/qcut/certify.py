"""Constructive hull-membership certificates.

A certificate exhibits two feasible points outside the forbidden strip (the
"friends") whose convex combination recovers the certified point.  The
constructions mirror the case analysis of the cut formulas: parallel
translation when the interpolated endpoint values coincide, slope-following
or apex-ray wiggles otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BisectionFailure,
    CutViolated,
    NotInForbidden,
    NotInside,
    UnsupportedFamily,
)
from .interscuts import AggregationForm
from .linalg import inverse
from .model import (
    ConvexBody,
    Family,
    SplitDisjunction,
    eval_body,
    eval_cut,
    split_position,
    Position,
)
from .splitcuts import split_cut

_EPS = 1e-9
_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class FriendsCertificate:
    p0: np.ndarray  # on or below the lower disjunction boundary
    p1: np.ndarray  # on or above the upper disjunction boundary
    alpha: float    # point == alpha * p0 + (1 - alpha) * p1
    side0: str = "below"
    side1: str = "above"


def _combine_ok(point, cert: FriendsCertificate, tol: float) -> bool:
    point = np.asarray(point, dtype=float)
    mix = cert.alpha * cert.p0 + (1.0 - cert.alpha) * cert.p1
    scale = max(1.0, float(np.linalg.norm(point)))
    return float(np.linalg.norm(mix - point)) <= tol * scale


def check_certificate(body: ConvexBody, split_or_form, point,
                      cert: FriendsCertificate, tol: float = _CHECK_TOL) -> bool:
    """True iff all certificate invariants hold at the given tolerance."""
    if not 0.0 <= cert.alpha <= 1.0:
        return False
    if not _combine_ok(point, cert, tol):
        return False
    for friend in (cert.p0, cert.p1):
        if eval_body(body, friend) > tol:
            return False
    if isinstance(split_or_form, SplitDisjunction):
        split = split_or_form
        scale = max(1.0, abs(split.pi0), abs(split.pi1))
        for friend in (cert.p0, cert.p1):
            v = split.value(np.asarray(friend, dtype=float),
                            with_t=len(friend) == split.pi.size + 1)
            if split.pi0 + tol * scale < v < split.pi1 - tol * scale:
                return False
    elif isinstance(split_or_form, AggregationForm):
        form = split_or_form
        for friend in (cert.p0, cert.p1):
            friend = np.asarray(friend, dtype=float)
            x, t = friend[:-1], friend[-1]
            if form.eval_G(x) - form.gamma * t > tol:
                return False
    else:
        return False
    return True


# --- split certificates -----------------------------------------------------

def friends_split(body: ConvexBody, split: SplitDisjunction,
                  point) -> FriendsCertificate:
    """Certificate that a body point satisfying the split cut lies in the
    hull of the strip-exterior part of the body."""
    point = np.asarray(point, dtype=float)
    if eval_body(body, point) > _CHECK_TOL:
        raise CutViolated("point is not in the body")
    cut, label = split_cut(body, split)
    if eval_cut(cut, point) > _CHECK_TOL:
        raise CutViolated("point violates the split cut; no certificate exists")

    scale = max(1.0, abs(split.pi0), abs(split.pi1))
    v = split.value(point, with_t=body.epigraphical)
    if v <= split.pi0 - _EPS * scale or v >= split.pi1 + _EPS * scale:
        raise NotInside("point is not inside the strip")
    if v <= split.pi0 + _EPS * scale:
        # on the lower boundary within tolerance: the point is its own friend
        return FriendsCertificate(p0=point.copy(), p1=point.copy(), alpha=1.0)
    if v >= split.pi1 - _EPS * scale:
        return FriendsCertificate(p0=point.copy(), p1=point.copy(), alpha=0.0)

    fam = body.family
    if fam is Family.PARABOLOID and split.pi_hat == 0:
        return _friends_paraboloid_simple(body, split, point)
    if fam is Family.CONE and split.pi_hat == 0:
        return _friends_cone_like(body, split, point)
    if fam is Family.PCONE:
        return _friends_cone_like(body, split, point)
    if fam is Family.HYPERBOLOID:
        return _friends_hyperboloid(body, split, point)
    if fam in (Family.ELLIPSOID, Family.PBALL):
        return _friends_levelset(body, split, point)
    if fam is Family.PARABOLOID:
        return _friends_paraboloid_general(body, split, point)
    if fam is Family.CONE:
        return _friends_cone_general(body, split, point)
    raise UnsupportedFamily(str(fam))


def _standardize(body: ConvexBody, split: SplitDisjunction):
    """Return (map to std coords, map back, direction, bounds) so the body is
    the standard member of its family in the std coordinates."""
    if body.family in (Family.PARABOLOID, Family.CONE, Family.ELLIPSOID):
        B, c = body.B, body.c
        w = inverse(B).T @ split.pi
        pc = float(split.pi @ c)
        fwd = lambda x: B @ (x - c)
        back = lambda y: np.linalg.solve(B, y) + c
        return fwd, back, w, split.pi0 - pc, split.pi1 - pc
    ident = lambda x: x
    return ident, ident, split.pi.copy(), split.pi0, split.pi1


def _clamp01(a: float) -> float:
    return min(1.0, max(0.0, a))


def _friends_paraboloid_simple(body, split, point):
    fwd, back, w, l0, l1 = _standardize(body, split)
    x, t = point[:body.n], float(point[body.n])
    xs = fwd(x)
    nw2 = float(w @ w)
    u = float(w @ xs)
    perp = xs - (u / nw2) * w
    f0, f1 = l0 * l0 / nw2, l1 * l1 / nw2
    alpha = _clamp01((l1 - u) / (l1 - l0))
    x0 = perp + (l0 / nw2) * w
    x1 = perp + (l1 / nw2) * w
    if abs(f0 - f1) <= _EPS * max(1.0, abs(f0), abs(f1)):
        t0 = t1 = t
    else:
        a_sec = (l0 + l1) / nw2
        t0 = t + a_sec * (l0 - u)
        t1 = t + a_sec * (l1 - u)
    p0 = np.append(back(x0), t0)
    p1 = np.append(back(x1), t1)
    return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)


def _friends_cone_like(body, split, point):
    """Cones and p-cones: positive homogeneous epigraphs, pi_hat == 0."""
    fwd, back, w, l0, l1 = _standardize(body, split)
    x, t = point[:body.n], float(point[body.n])
    xs = fwd(x)
    nw2 = float(w @ w)
    u = float(w @ xs)
    scale = max(1.0, abs(l0), abs(l1))

    if l0 >= -_EPS * scale or l1 <= _EPS * scale:
        # 0 outside the open interval: ray through the origin
        if abs(u) <= 1e-14 * scale:
            raise NotInside("degenerate ray base")
        a0, a1 = l0 / u, l1 / u
        p0 = np.append(back(a0 * xs), a0 * t)
        p1 = np.append(back(a1 * xs), a1 * t)
        alpha = _clamp01((a1 - 1.0) / (a1 - a0))
        return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)

    if abs(abs(l0) - abs(l1)) <= _EPS * scale:
        perp = xs - (u / nw2) * w
        p0 = np.append(back(perp + (l0 / nw2) * w), t)
        p1 = np.append(back(perp + (l1 / nw2) * w), t)
        alpha = _clamp01((l1 - u) / (l1 - l0))
        return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)

    a = (l0 + l1) / (l1 - l0)
    b = -2.0 * l1 * l0 / (l1 - l0)
    apex = (-b / (a * nw2)) * w  # where the interpolated term vanishes
    return _apex_ray(back, xs, t, apex, 0.0, w, 0.0, l0, l1)


def _friends_hyperboloid(body, split, point):
    pi = split.pi
    x, t = point[:body.n], float(point[body.n])
    np2 = float(pi @ pi)
    u = float(pi @ x)
    l0, l1 = split.pi0, split.pi1
    scale = max(1.0, abs(l0), abs(l1))
    if abs(abs(l0) - abs(l1)) <= _EPS * scale:
        perp = x - (u / np2) * pi
        p0 = np.append(perp + (l0 / np2) * pi, t)
        p1 = np.append(perp + (l1 / np2) * pi, t)
        alpha = _clamp01((l1 - u) / (l1 - l0))
        return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)
    ll = body.l * body.l * np2
    root = math.sqrt((ll + l0 * l0) * (ll + l1 * l1))
    a = math.sqrt(max(2.0 * ll + l0 * l0 + l1 * l1 - 2.0 * root, 0.0)) / (l1 - l0)
    b = (ll - l0 * l1 + root) / (l0 + l1) * a
    apex = (-b / (a * np2)) * pi
    ident = lambda y: y
    return _apex_ray(ident, x, t, apex, 0.0, pi, 0.0, l0, l1)


def _apex_ray(back, xs, t, apex, t_apex, w, pi_hat, l0, l1):
    """Friends along the ray from the apex of the cut's epigraph through the
    point; the cut is linear along that ray."""
    val = float(w @ xs) + pi_hat * t
    vstar = float(w @ apex) + pi_hat * t_apex
    denom = val - vstar
    if abs(denom) <= 1e-14 * max(1.0, abs(l0), abs(l1)):
        raise NotInside("point projects onto the apex")
    a0 = (l0 - vstar) / denom
    a1 = (l1 - vstar) / denom
    p0 = np.append(back(apex + a0 * (xs - apex)), t_apex + a0 * (t - t_apex))
    p1 = np.append(back(apex + a1 * (xs - apex)), t_apex + a1 * (t - t_apex))
    alpha = _clamp01((a1 - 1.0) / (a1 - a0))
    return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)


def _friends_levelset(body, split, point):
    fwd, back, w, l0, l1 = _standardize(body, split)
    xs = fwd(np.asarray(point, dtype=float))
    nw2 = float(w @ w)
    nw = math.sqrt(nw2)
    u = float(w @ xs)
    if body.family is Family.ELLIPSOID:
        r = body.r

        def f(uu):
            return -math.sqrt(max(r * r - uu * uu / nw2, 0.0))
    else:
        r, p = body.r, body.p

        def f(uu):
            uu = min(abs(uu) / nw, r)  # p-ball bounds live on the e_k scale
            return -((r ** p - uu ** p) ** (1.0 / p)) * nw

    f0, f1 = f(l0), f(l1)
    alpha = _clamp01((l1 - u) / (l1 - l0))
    perp = xs - (u / nw2) * w
    scale = max(1.0, abs(f0), abs(f1))
    if abs(f0 - f1) <= _EPS * scale:
        p0 = back(perp + (l0 / nw2) * w)
        p1 = back(perp + (l1 / nw2) * w)
        return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)
    denom = alpha * f0 + (1.0 - alpha) * f1
    if abs(denom) <= _EPS * scale:
        beta0 = beta1 = 1.0  # cut forces the perpendicular part to vanish
    else:
        beta0, beta1 = f0 / denom, f1 / denom
    p0 = back(beta0 * perp + (l0 / nw2) * w)
    p1 = back(beta1 * perp + (l1 / nw2) * w)
    return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)


def _friends_paraboloid_general(body, split, point):
    fwd, back, w, l0, l1 = _standardize(body, split)
    ph = split.pi_hat
    x, t = point[:body.n], float(point[body.n])
    xs = fwd(x)
    np2 = float(w @ w)
    d0 = max(np2 + 4.0 * l0 * ph, 0.0)
    d1 = max(np2 + 4.0 * l1 * ph, 0.0)
    root = math.sqrt(d0) * math.sqrt(d1)
    ff = math.sqrt(max(np2 + 2.0 * (l0 + l1) * ph - root, 0.0))
    cc = ff / (math.sqrt(2.0) * (l1 - l0) * ph)
    dd = cc * ph
    ee = (np2 + root) / (4.0 * math.sqrt(2.0) * (l1 - l0) * ph ** 2) * ff
    if np2 == 0.0:
        apex = np.zeros(body.n)
        t_apex = -ee / dd
    else:
        bb = np2 / (2.0 * ph)
        apex = (-bb / np2) * w
        t_apex = (bb * cc - ee) / dd
    return _apex_ray(back, xs, t, apex, t_apex, w, ph, l0, l1)


def _friends_cone_general(body, split, point):
    fwd, back, w, l0, l1 = _standardize(body, split)
    ph = split.pi_hat
    x, t = point[:body.n], float(point[body.n])
    xs = fwd(x)
    np2 = float(w @ w)
    u = float(w @ xs)
    val = u + ph * t
    scale = max(1.0, abs(l0), abs(l1))

    if l0 >= -_EPS * scale or l1 <= _EPS * scale:
        # 0 outside the open interval: ray through the origin
        if abs(val) <= 1e-14 * scale:
            raise NotInside("degenerate ray base")
        a0, a1 = l0 / val, l1 / val
        p0 = np.append(back(a0 * xs), a0 * t)
        p1 = np.append(back(a1 * xs), a1 * t)
        return FriendsCertificate(p0=p0, p1=p1,
                                  alpha=_clamp01((a1 - 1.0) / (a1 - a0)))

    diff = np2 - ph * ph
    ff = math.sqrt(diff * (np2 * (l0 - l1) ** 2 - (l0 + l1) ** 2 * ph * ph))
    a = (l0 + l1) * diff / ff
    b = -2.0 * l0 * l1 * np2 / ff
    cc = -4.0 * l0 * l1 * ph / ((l1 - l0) * ff)
    dd = ff / ((l1 - l0) * diff)
    ee = 2.0 * l0 * l1 * (l0 + l1) * ph / ((l1 - l0) * ff)

    if abs(abs(l0) - abs(l1)) <= _EPS * scale:
        cd = cc / dd
        perp = xs - (u / np2) * w
        coef0 = (l0 - ph * t - cd * ph * u) / ((1.0 - cd * ph) * np2)
        coef1 = (l1 - ph * t - cd * ph * u) / ((1.0 - cd * ph) * np2)
        x0 = perp + coef0 * w
        x1 = perp + coef1 * w
        t0 = t + cd * (u - float(w @ x0))
        t1 = t + cd * (u - float(w @ x1))
        p0 = np.append(back(x0), t0)
        p1 = np.append(back(x1), t1)
        alpha = _clamp01((l1 - val) / (l1 - l0))
        return FriendsCertificate(p0=p0, p1=p1, alpha=alpha)

    apex = (-b / (a * np2)) * w
    t_apex = (b * cc - a * ee) / (a * dd)
    return _apex_ray(back, xs, t, apex, t_apex, w, ph, l0, l1)


# --- aggregation certificates ----------------------------------------------

def friends_aggregation(form: AggregationForm, point) -> FriendsCertificate:
    """Friends along +/- a_n with t following the aggregation slope, each on
    the surface G = gamma * t."""
    point = np.asarray(point, dtype=float)
    x, t = point[:-1], float(point[-1])
    if form.eval_G(x) - form.gamma * t <= 0.0:
        raise NotInForbidden("point does not lie in the forbidden interior")
    an = form.directions[-1]
    alpha_n = form.alpha_n
    k = float((form.m - form.l / alpha_n) @ an) / (1.0 + form.gamma / alpha_n)

    def phi(s: float) -> float:
        return form.eval_G(x + s * an) - form.gamma * (t + s * k)

    s_pos = _bracket_root(phi, +1.0)
    s_neg = _bracket_root(phi, -1.0)
    p1 = np.append(x + s_pos * an, t + s_pos * k)
    p0 = np.append(x + s_neg * an, t + s_neg * k)
    alpha = _clamp01(s_pos / (s_pos - s_neg))
    return FriendsCertificate(p0=p0, p1=p1, alpha=alpha,
                              side0="surface", side1="surface")


def _bracket_root(phi, direction: float) -> float:
    s = direction
    while phi(s) > 0.0:
        s *= 2.0
        if abs(s) > 1e6:
            raise BisectionFailure(
                "no sign change within |s| <= 1e6; recession condition "
                "likely violated")
    lo, hi = 0.0, s  # phi(lo) > 0 >= phi(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= 1e-10:
            break
    return hi
