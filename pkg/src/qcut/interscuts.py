"""Aggregation-based intersection cuts.

The base inequality F(x) <= t (or F(x) <= 0) and the forbidden inequality
gamma*t <= G(x) (or G(x) >= 0) share univariate convex pieces g_i along
mutually orthogonal directions a_i; the cut H is the nonnegative combination
of F and G in which the heaviest piece cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import BadWeights, RecessionFailure
from .linalg import as_mat, as_vec, eig_sym, inverse
from .model import Cut, EmptyHull, NoCut, QuadraticCut

# A piece is either a curvature coefficient kappa (meaning s -> kappa * s^2)
# or an arbitrary univariate convex evaluator.
Piece = Union[float, Callable[[float], float]]


@dataclass(frozen=True)
class AggregationForm:
    """Data of the aggregation pair F, G.

    F(x) = sum_i g_i(a_i^T x) + m^T x + r
    G(x) = -sum_i alpha_i g_i(a_i^T x) - l^T x - q
    """

    directions: Sequence[np.ndarray]
    pieces: Sequence[Piece]
    weights: Sequence[float]
    m: np.ndarray
    l: np.ndarray
    r: float
    q: float
    gamma: float = 0.0

    def __post_init__(self):
        dirs = [as_vec(a) for a in self.directions]
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", [float(w) for w in self.weights])
        object.__setattr__(self, "m", as_vec(self.m))
        object.__setattr__(self, "l", as_vec(self.l))
        if not (len(dirs) == len(self.pieces) == len(self.weights)):
            raise BadWeights("directions, pieces, weights must align")
        an = dirs[-1]
        if float(an @ an) == 0.0:
            raise BadWeights("a_n must be nonzero")
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                ni, nj = np.linalg.norm(dirs[i]), np.linalg.norm(dirs[j])
                if ni > 0 and nj > 0:
                    if abs(dirs[i] @ dirs[j]) > 1e-10 * ni * nj:
                        raise BadWeights("directions must be orthogonal")
        if any(w < 0 for w in self.weights):
            raise BadWeights("weights must be nonnegative")
        if self.gamma < 0:
            raise BadWeights("gamma must be nonnegative")

    @property
    def alpha_n(self) -> float:
        return self.weights[-1]

    def check_heaviest_last(self):
        an = self.alpha_n
        if an <= 0 or an < max(self.weights) - 1e-12 * max(1.0, an):
            raise BadWeights("alpha_n must be positive and maximal")

    def eval_F(self, x: np.ndarray) -> float:
        acc = float(self.m @ x) + self.r
        for a, g in zip(self.directions, self.pieces):
            acc += _eval_piece(g, float(a @ x))
        return acc

    def eval_G(self, x: np.ndarray) -> float:
        acc = -float(self.l @ x) - self.q
        for a, g, w in zip(self.directions, self.pieces, self.weights):
            acc -= w * _eval_piece(g, float(a @ x))
        return acc


def _eval_piece(g: Piece, s: float) -> float:
    if callable(g):
        return float(g(s))
    return float(g) * s * s


def _all_quadratic(form: AggregationForm) -> bool:
    return all(not callable(g) for g in form.pieces)


@dataclass(frozen=True)
class QuadForm:
    """x^T Q x + lin^T x + const <= tcoef * t (or <= 0)."""

    Q: np.ndarray
    lin: np.ndarray
    const: float
    tcoef: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "Q", as_mat(self.Q))
        object.__setattr__(self, "lin", as_vec(self.lin))


def recession_ok(form: AggregationForm) -> bool:
    """True when -alpha_n g_n(s a_n.a_n) minus the drift term diverges to
    -infinity on both tails."""
    an = form.directions[-1]
    alpha_n = form.alpha_n
    if alpha_n <= 0:
        return False
    denom = 1.0 + form.gamma / alpha_n
    drift = float(form.l @ an) + form.gamma * float(
        (form.m - form.l / alpha_n) @ an) / denom
    gn = form.pieces[-1]
    if not callable(gn):
        # quadratic tag: kappa > 0 dominates; kappa == 0 leaves a linear
        # term that cannot diverge to -inf on both tails
        return float(gn) > 0.0
    nan2 = float(an @ an)
    prev_pos, prev_neg = None, None
    for k in range(1, 9):
        s = 10.0 ** k
        vp = -alpha_n * _eval_piece(gn, s * nan2) - s * drift
        vn = -alpha_n * _eval_piece(gn, -s * nan2) + s * drift
        if prev_pos is not None and (vp >= prev_pos or vn >= prev_neg):
            return False
        prev_pos, prev_neg = vp, vn
    return prev_pos < -1e6 and prev_neg < -1e6


def _quadratic_hull_pieces(form: AggregationForm):
    """E and linear data of sum_{i} (1 - alpha_i/alpha_n) g_i(a_i^T x)."""
    n = form.directions[0].size
    E = np.zeros((n, n))
    alpha_n = form.alpha_n
    for a, g, w in zip(form.directions, form.pieces, form.weights):
        coeff = 1.0 - w / alpha_n
        if coeff != 0.0:
            E += coeff * float(g) * np.outer(a, a)
    return E


def aggregate_epigraph(form: AggregationForm) -> Cut:
    """Cut H(x) <= t with H = (F + G/alpha_n) / (1 + gamma/alpha_n)."""
    form.check_heaviest_last()
    alpha_n = form.alpha_n
    denom = 1.0 + form.gamma / alpha_n
    if denom <= 0:
        raise BadWeights("need 1 + gamma/alpha_n > 0")
    if not recession_ok(form):
        raise RecessionFailure("recession condition fails or is inconclusive")
    if not _all_quadratic(form):
        raise RecessionFailure(
            "only quadratic-tagged pieces have a closed-form cut")
    E = _quadratic_hull_pieces(form) / denom
    lin = (form.m - form.l / alpha_n) / denom
    const = (form.r - form.q / alpha_n) / denom
    return QuadraticCut(E=E, a=lin, f=const, t_coef=1.0)


def aggregate_levelset(form: AggregationForm) -> Cut:
    """Cut H(x) <= 0 with H = F + G/alpha_n; requires l = alpha_n * m so the
    linear terms cancel."""
    form.check_heaviest_last()
    alpha_n = form.alpha_n
    if np.max(np.abs(form.l - alpha_n * form.m)) > 1e-9 * max(
            1.0, float(np.max(np.abs(form.l)))):
        raise BadWeights("level-set form requires l = alpha_n * m")
    if form.gamma != 0.0:
        raise BadWeights("level-set form has no gamma")
    if not recession_ok(form):
        raise RecessionFailure("recession condition fails or is inconclusive")
    if not _all_quadratic(form):
        raise RecessionFailure(
            "only quadratic-tagged pieces have a closed-form cut")
    E = _quadratic_hull_pieces(form)
    const = form.r - form.q / alpha_n
    if np.max(np.abs(E)) == 0.0:
        return NoCut() if const <= 0 else EmptyHull()
    n = form.directions[0].size
    return QuadraticCut(E=E, a=np.zeros(n), f=const, t_coef=0.0)


def intersection_cut_quadratic(B, c, A, d, q: float, gamma: float) -> QuadraticCut:
    """Intersection cut for the paraboloid {||B(x-c)||^2 <= t} minus the
    interior of {gamma*t + q <= -||A(x-d)||^2}.

    Returns x^T E x + a^T x + f <= (alpha_n + gamma) * t.
    """
    B = as_mat(B)
    A = as_mat(A)
    c = as_vec(c)
    d = as_vec(d)
    if gamma < 0:
        raise BadWeights("gamma must be nonnegative")
    Binv = inverse(B)
    values, vectors = eig_sym(Binv.T @ A.T @ A @ Binv)
    alpha_n = float(values[-1])
    y0 = B @ (c - d)
    H = np.zeros_like(B)
    e = np.zeros(c.size)
    w = 0.0
    for i in range(c.size):
        vi = vectors[:, i]
        proj = float(vi @ y0)
        if i < c.size - 1:
            H += (alpha_n - float(values[i])) * np.outer(vi, vi)
        e += float(values[i]) * proj * vi
        w += float(values[i]) * proj * proj
    E = B.T @ H @ B
    a = -2.0 * B.T @ e - 2.0 * E @ c
    f = float(c @ E @ c) + 2.0 * float((B.T @ e) @ c) - w - q
    return QuadraticCut(E=E, a=a, f=f, t_coef=alpha_n + gamma)


def concentric_ellipsoid_cut(B, c, r1: float, r2: float) -> Cut:
    """Hull cut for the squared-radius ellipsoid {||B(x-c)||^2 <= r1} minus
    the interior of the forbidden exterior {||B(x-c)||^2 >= r2}.

    Radii are in the squared convention of the quadratic-set forms.
    """
    B = as_mat(B)
    c = as_vec(c)
    inverse(B)
    if r1 <= 0 or r2 <= 0:
        raise BadWeights("radii must be positive")
    if r2 > r1:
        return NoCut()
    E = B.T @ B
    a = -2.0 * E @ c
    f = float(c @ E @ c) - r2
    return QuadraticCut(E=E, a=a, f=f, t_coef=0.0)


def max_convex_lambda(QF: QuadForm, QG: QuadForm) -> float:
    """sup{lambda in [0,1] : (1-lambda) Q_F + lambda Q_G is psd}, found by
    bisection to 1e-10; the feasible set is an interval containing 0."""
    QFq = 0.5 * (QF.Q + QF.Q.T)
    QGq = 0.5 * (QG.Q + QG.Q.T)
    scale = max(1.0, float(np.linalg.norm(QFq)))
    if float(np.linalg.eigvalsh(QFq)[0]) < -1e-9 * scale:
        raise BadWeights("Q_F must be convex")

    def feasible(lam: float) -> bool:
        return float(np.linalg.eigvalsh((1 - lam) * QFq + lam * QGq)[0]) >= 0.0

    if feasible(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def blend(QF: QuadForm, QG: QuadForm, lam: float) -> QuadForm:
    """(1 - lam) * QF + lam * QG, componentwise."""
    return QuadForm(Q=(1 - lam) * QF.Q + lam * QG.Q,
                    lin=(1 - lam) * QF.lin + lam * QG.lin,
                    const=(1 - lam) * QF.const + lam * QG.const,
                    tcoef=(1 - lam) * QF.tcoef + lam * QG.tcoef)
