import math

import numpy as np
import pytest

from qcut.errors import BadWeights, RecessionFailure
from qcut.interscuts import (
    AggregationForm,
    QuadForm,
    aggregate_epigraph,
    aggregate_levelset,
    blend,
    concentric_ellipsoid_cut,
    intersection_cut_quadratic,
    max_convex_lambda,
    recession_ok,
)
from qcut.model import EmptyHull, NoCut, QuadraticCut, eval_cut

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def figure_form():
    # coordinates (y, z): F = 2y^2 + z^2, G = -y^2 - z^2 + 2z, gamma = 1
    return AggregationForm(directions=[E1, E2], pieces=[2.0, 1.0],
                           weights=[0.5, 1.0], m=np.zeros(2),
                           l=np.array([0.0, -2.0]), r=0.0, q=0.0, gamma=1.0)


class TestAggregationForm:
    def test_eval(self):
        form = figure_form()
        x = np.array([1.0, 2.0])
        assert form.eval_F(x) == 2.0 + 4.0
        assert form.eval_G(x) == -1.0 - 4.0 + 4.0

    def test_rejects_non_orthogonal(self):
        with pytest.raises(BadWeights):
            AggregationForm(directions=[E1, np.array([1.0, 0.5])],
                            pieces=[1.0, 1.0], weights=[0.5, 1.0],
                            m=np.zeros(2), l=np.zeros(2), r=0.0, q=0.0)

    def test_rejects_negative_weight(self):
        with pytest.raises(BadWeights):
            AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                            weights=[-0.5, 1.0], m=np.zeros(2),
                            l=np.zeros(2), r=0.0, q=0.0)

    def test_rejects_negative_gamma(self):
        with pytest.raises(BadWeights):
            AggregationForm(directions=[np.array([1.0])], pieces=[1.0],
                            weights=[1.0], m=np.zeros(1), l=np.zeros(1),
                            r=0.0, q=0.0, gamma=-1.0)

    def test_heaviest_must_be_last(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 0.5], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=0.0)
        with pytest.raises(BadWeights):
            aggregate_epigraph(form)


class TestRecession:
    def test_positive_curvature(self):
        assert recession_ok(figure_form())

    def test_zero_curvature_last_piece(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 0.0],
                               weights=[0.5, 1.0], m=np.zeros(2),
                               l=np.array([0.0, 1.0]), r=0.0, q=0.0)
        assert not recession_ok(form)

    def test_evaluator_quadratic_probe(self):
        form = AggregationForm(directions=[np.array([1.0])], pieces=[lambda s: s * s],
                               weights=[1.0], m=np.zeros(1), l=np.zeros(1),
                               r=0.0, q=0.0)
        assert recession_ok(form)

    def test_evaluator_abs_with_large_drift(self):
        form = AggregationForm(directions=[np.array([1.0])], pieces=[lambda s: abs(s)],
                               weights=[1.0], m=np.zeros(1),
                               l=np.array([2.0]), r=0.0, q=0.0)
        assert not recession_ok(form)

    def test_evaluator_abs_no_drift(self):
        form = AggregationForm(directions=[np.array([1.0])], pieces=[lambda s: abs(s)],
                               weights=[1.0], m=np.zeros(1), l=np.zeros(1),
                               r=0.0, q=0.0)
        assert recession_ok(form)


class TestAggregateEpigraph:
    def test_figure_instance(self):
        cut = aggregate_epigraph(figure_form())
        assert isinstance(cut, QuadraticCut)
        assert np.allclose(cut.E, np.diag([0.5, 0.0]), atol=1e-12)
        assert np.allclose(cut.a, [0.0, 1.0], atol=1e-12)
        assert abs(cut.f) < 1e-12
        assert cut.t_coef == 1.0

    def test_strip_instance_matches_interpolation(self):
        # F = x1^2 + x2^2, G = -x1^2 + 1 encodes the strip -1 <= x1 <= 1
        form = AggregationForm(directions=[E2, E1], pieces=[1.0, 1.0],
                               weights=[0.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=-1.0)
        cut = aggregate_epigraph(form)
        assert np.allclose(cut.E, np.diag([0.0, 1.0]), atol=1e-12)
        assert np.allclose(cut.a, np.zeros(2), atol=1e-12)
        assert abs(cut.f - 1.0) < 1e-12
        from qcut.splitcuts import split_cut_paraboloid_simple
        ref, _ = split_cut_paraboloid_simple(np.eye(2), np.zeros(2),
                                             E1, -1.0, 1.0)
        assert np.allclose(cut.E, ref.E, atol=1e-12)
        assert np.allclose(cut.a, ref.a, atol=1e-12)
        assert abs(cut.f - ref.f) < 1e-12

    def test_all_cancel(self):
        # G = -F + 1 leaves only the constant: cut 1 <= t
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=-1.0)
        cut = aggregate_epigraph(form)
        assert np.allclose(cut.E, np.zeros((2, 2)), atol=1e-12)
        assert abs(cut.f - 1.0) < 1e-12

    def test_recession_failure_raises(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 0.0],
                               weights=[0.5, 1.0], m=np.zeros(2),
                               l=np.array([0.0, 1.0]), r=0.0, q=0.0)
        with pytest.raises(RecessionFailure):
            aggregate_epigraph(form)

    def test_callable_pieces_refused(self):
        form = AggregationForm(directions=[np.array([1.0])], pieces=[lambda s: s * s],
                               weights=[1.0], m=np.zeros(1), l=np.zeros(1),
                               r=0.0, q=0.0)
        with pytest.raises(RecessionFailure):
            aggregate_epigraph(form)

    def test_validity_and_binding(self):
        form = figure_form()
        cut = aggregate_epigraph(form)
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(3000):
            x = rng.uniform(-3, 3, size=2)
            F = form.eval_F(x)
            t = F + abs(rng.normal()) * 2.0
            # keep points outside the interior of the forbidden set
            if form.gamma * t - form.eval_G(x) < 0:
                continue
            checked += 1
            assert eval_cut(cut, np.append(x, t)) <= 1e-7
        assert checked > 500
        # binding: H = t on the common surface {F = t} and {G = gamma t}
        for y in np.linspace(-1.0 / math.sqrt(6.0) + 1e-3,
                             1.0 / math.sqrt(6.0) - 1e-3, 25):
            z = (2.0 - math.sqrt(4.0 - 24.0 * y * y)) / 4.0
            x = np.array([y, z])
            t = form.eval_F(x)
            assert abs(form.eval_G(x) - form.gamma * t) < 1e-9
            assert abs(eval_cut(cut, np.append(x, t))) < 1e-7

    def test_convexity_of_emitted_cuts(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            k = rng.uniform(0, 2, size=2)
            w = np.sort(rng.uniform(0, 1, size=2))
            if w[-1] <= 0:
                w[-1] = 1.0
            form = AggregationForm(directions=[E1, E2], pieces=list(k),
                                   weights=list(w), m=rng.normal(size=2),
                                   l=rng.normal(size=2),
                                   r=rng.normal(), q=rng.normal(),
                                   gamma=float(abs(rng.normal())))
            if not recession_ok(form):
                continue
            cut = aggregate_epigraph(form)
            vals = np.linalg.eigvalsh(0.5 * (cut.E + cut.E.T))
            assert vals[0] >= -1e-9 * max(1.0, np.linalg.norm(cut.E))


class TestAggregateLevelset:
    def test_all_cancel_no_cut(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=1.0)
        assert isinstance(aggregate_levelset(form), NoCut)

    def test_all_cancel_empty(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=-1.0)
        assert isinstance(aggregate_levelset(form), EmptyHull)

    def test_one_direction_cancels(self):
        # F = x1^2 + x2^2 - 4, G = -x2^2 - q: cut x1^2 + (r - q) <= 0
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[0.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=-4.0, q=-2.0)
        cut = aggregate_levelset(form)
        assert np.allclose(cut.E, np.diag([1.0, 0.0]), atol=1e-12)
        assert abs(cut.f + 2.0) < 1e-12 and cut.t_coef == 0.0

    def test_inner_disk_removal_gives_no_cut(self):
        # removing an inner concentric disk leaves a set whose hull is the
        # original disk, so no cut is produced
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=-4.0, q=1.0)
        assert isinstance(aggregate_levelset(form), NoCut)

    def test_requires_matched_linear_part(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.array([1.0, 0.0]),
                               l=np.zeros(2), r=0.0, q=0.0)
        with pytest.raises(BadWeights):
            aggregate_levelset(form)

    def test_requires_zero_gamma(self):
        form = AggregationForm(directions=[E1, E2], pieces=[1.0, 1.0],
                               weights=[1.0, 1.0], m=np.zeros(2),
                               l=np.zeros(2), r=0.0, q=0.0, gamma=1.0)
        with pytest.raises(BadWeights):
            aggregate_levelset(form)


class TestIntersectionCutQuadratic:
    def test_unit_instance(self):
        cut = intersection_cut_quadratic(np.eye(2), np.zeros(2), np.eye(2),
                                         np.zeros(2), -1.0, 0.0)
        assert np.allclose(cut.E, np.zeros((2, 2)), atol=1e-12)
        assert np.allclose(cut.a, np.zeros(2), atol=1e-12)
        assert abs(cut.f - 1.0) < 1e-12
        assert abs(cut.t_coef - 1.0) < 1e-12

    def test_anisotropic_instance(self):
        cut = intersection_cut_quadratic(np.eye(2), np.zeros(2),
                                         np.diag([1.0, 2.0]), np.zeros(2),
                                         -1.0, 0.0)
        # 3 x1^2 + 1 <= 4 t
        assert np.allclose(cut.E, np.diag([3.0, 0.0]), atol=1e-12)
        assert np.allclose(cut.a, np.zeros(2), atol=1e-12)
        assert abs(cut.f - 1.0) < 1e-12
        assert abs(cut.t_coef - 4.0) < 1e-12
        # friends at x = (0, +-1/2), t = 1/4 lie on the cut boundary
        for s in (-0.5, 0.5):
            assert abs(eval_cut(cut, [0.0, s, 0.25])) < 1e-12

    def test_zero_forbidden_curvature(self):
        cut = intersection_cut_quadratic(np.eye(2), np.zeros(2),
                                         np.zeros((2, 2)), np.zeros(2),
                                         -2.0, 0.5)
        assert np.allclose(cut.E, np.zeros((2, 2)), atol=1e-12)
        assert abs(cut.f - 2.0) < 1e-12
        assert abs(cut.t_coef - 0.5) < 1e-12

    def test_rotation_of_A_irrelevant(self):
        # the cut depends on A only through A^T A
        rng = np.random.default_rng(9)
        B = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        c = rng.normal(size=3)
        A = rng.normal(size=(3, 3))
        d = rng.normal(size=3)
        theta = 0.7
        R = np.eye(3)
        R[:2, :2] = [[math.cos(theta), -math.sin(theta)],
                     [math.sin(theta), math.cos(theta)]]
        cut1 = intersection_cut_quadratic(B, c, A, d, -1.0, 0.3)
        cut2 = intersection_cut_quadratic(B, c, R @ A, d, -1.0, 0.3)
        assert np.allclose(cut1.E, cut2.E, atol=1e-9)
        assert np.allclose(cut1.a, cut2.a, atol=1e-9)
        assert abs(cut1.f - cut2.f) < 1e-9
        assert abs(cut1.t_coef - cut2.t_coef) < 1e-9

    def test_validity_random(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            B = rng.normal(size=(n, n)) + 3 * np.eye(n)
            c = rng.normal(size=n)
            A = rng.normal(size=(n, n))
            d = rng.normal(size=n)
            q = -abs(rng.normal()) - 0.1
            gamma = float(abs(rng.normal()))
            cut = intersection_cut_quadratic(B, c, A, d, q, gamma)
            checked = 0
            for _ in range(400):
                x = c + rng.normal(size=n)
                y = B @ (x - c)
                t = float(y @ y) + abs(rng.normal())
                # outside the interior of {gamma t + q <= -||A(x-d)||^2}
                z = A @ (x - d)
                if gamma * t + q + float(z @ z) < 0:
                    continue
                checked += 1
                lhs = float(x @ cut.E @ x) + float(cut.a @ x) + cut.f
                assert lhs <= cut.t_coef * t + 1e-7
            assert checked > 50


class TestConcentric:
    def test_unit_disk(self):
        cut = concentric_ellipsoid_cut(np.eye(2), np.zeros(2), 4.0, 1.0)
        assert np.allclose(cut.E, np.eye(2), atol=1e-12)
        assert np.allclose(cut.a, np.zeros(2), atol=1e-12)
        assert abs(cut.f + 1.0) < 1e-12 and cut.t_coef == 0.0

    def test_forbidden_misses_body(self):
        assert isinstance(
            concentric_ellipsoid_cut(np.eye(2), np.zeros(2), 1.0, 2.0), NoCut)

    def test_scaled_shifted(self):
        cut = concentric_ellipsoid_cut(2.0 * np.eye(2), E1, 1.0, 1.0)
        # 4 ||x - e1||^2 <= 1
        assert np.allclose(cut.E, 4.0 * np.eye(2), atol=1e-12)
        assert np.allclose(cut.a, [-8.0, 0.0], atol=1e-12)
        assert abs(cut.f - 3.0) < 1e-12

    def test_bad_radii(self):
        with pytest.raises(BadWeights):
            concentric_ellipsoid_cut(np.eye(2), np.zeros(2), 0.0, 1.0)


class TestMaxConvexLambda:
    def test_figure_instance(self):
        lam = max_convex_lambda(QuadForm(Q=np.diag([2.0, 4.0]),
                                         lin=np.zeros(2), const=0.0),
                                QuadForm(Q=np.diag([-2.0, -2.0]),
                                         lin=np.zeros(2), const=0.0))
        assert abs(lam - 0.5) < 1e-9

    def test_rank_one_loss(self):
        lam = max_convex_lambda(QuadForm(Q=np.diag([2.0, 2.0]),
                                         lin=np.zeros(2), const=0.0),
                                QuadForm(Q=np.diag([-2.0, 0.0]),
                                         lin=np.zeros(2), const=0.0))
        assert abs(lam - 0.5) < 1e-9

    def test_psd_target(self):
        lam = max_convex_lambda(QuadForm(Q=np.eye(2), lin=np.zeros(2),
                                         const=0.0),
                                QuadForm(Q=np.eye(2), lin=np.zeros(2),
                                         const=0.0))
        assert lam == 1.0

    def test_rejects_nonconvex_base(self):
        with pytest.raises(BadWeights):
            max_convex_lambda(QuadForm(Q=np.diag([-1.0, 1.0]),
                                       lin=np.zeros(2), const=0.0),
                              QuadForm(Q=np.eye(2), lin=np.zeros(2),
                                       const=0.0))

    def test_blend_at_result_is_psd(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            M = rng.normal(size=(n, n))
            QF = QuadForm(Q=M @ M.T, lin=rng.normal(size=n),
                          const=rng.normal())
            N = rng.normal(size=(n, n))
            QG = QuadForm(Q=(N + N.T) - 2 * np.eye(n),
                          lin=rng.normal(size=n), const=rng.normal())
            lam = max_convex_lambda(QF, QG)
            mixed = blend(QF, QG, lam)
            scale = max(1.0, float(np.linalg.norm(mixed.Q)))
            assert float(np.linalg.eigvalsh(
                0.5 * (mixed.Q + mixed.Q.T))[0]) >= -1e-7 * scale
            if lam < 1.0:
                beyond = blend(QF, QG, min(1.0, lam + 1e-6))
                assert float(np.linalg.eigvalsh(
                    0.5 * (beyond.Q + beyond.Q.T))[0]) <= 1e-7 * scale
