import math

import numpy as np
import pytest

from qcut.errors import DimUnsupported, EmptySample
from qcut.model import ConvexBody, Family, NoCut, NormCut, SplitDisjunction
from qcut.splitcuts import split_cut
from qcut.verify import (
    ForbiddenQuadratic,
    PolygonOracle,
    SampleConfig,
    check_validity,
    compare_to_oracle,
    eval_body_batch,
    hull_oracle_2d,
    monotone_chain,
    sample_body,
)

SQ3 = math.sqrt(3.0)


def disk_cut(b):
    # |y| <= (sqrt(3) - 2) z + b, cut on the (z, y) plane
    return NormCut(M=np.array([[0.0, 1.0]]), m=np.zeros(1), p=2,
                   q=np.array([SQ3 - 2.0, 0.0]), h=0.0, k=b)


class TestSampling:
    def test_disk_samples(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=1.0)
        pts = sample_body(body, SampleConfig(seed=7, count=100))
        assert pts.shape == (100, 2)
        assert np.all(np.linalg.norm(pts, axis=1) <= 1.0 + 1e-12)

    def test_paraboloid_samples_respect_t_cap(self):
        body = ConvexBody(family=Family.PARABOLOID, n=2)
        pts = sample_body(body, SampleConfig(seed=1, count=50, t_cap=4.0))
        assert np.all(pts[:, 2] <= 4.0)
        assert np.all(np.sum(pts[:, :2] ** 2, axis=1) <= pts[:, 2] + 1e-12)

    def test_deterministic(self):
        body = ConvexBody(family=Family.PBALL, n=2, p=3, r=1.0)
        cfg = SampleConfig(seed=42, count=60)
        assert np.array_equal(sample_body(body, cfg), sample_body(body, cfg))

    def test_empty_sample(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=1.0)
        box = np.array([[5.0, 6.0], [5.0, 6.0]])
        with pytest.raises(EmptySample):
            sample_body(body, SampleConfig(seed=0, count=10, box=box))

    def test_bad_config(self):
        with pytest.raises(ValueError):
            SampleConfig(seed=0, count=0)
        with pytest.raises(ValueError):
            SampleConfig(seed=0, count=5, box=np.array([[1.0, 0.0]]))


class TestCheckValidity:
    def setup_method(self):
        self.body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        self.split = SplitDisjunction(pi=np.array([1.0, 0.0]),
                                      pi0=0.0, pi1=1.0)

    def test_correct_cut_passes(self):
        rep = check_validity(self.body, self.split, disk_cut(2.0),
                             SampleConfig(seed=3, count=2000))
        assert rep.passed and rep.checked > 500
        assert rep.max_violation <= 1e-7

    def test_weakened_cut_fails(self):
        # the hull point (0, 2) violates |y| <= (sqrt(3)-2)z + 1.9 by 0.1
        rep = check_validity(self.body, self.split, disk_cut(1.9),
                             SampleConfig(seed=3, count=4000))
        assert not rep.passed
        assert rep.max_violation > 0.05
        assert rep.worst_point is not None

    def test_nocut_vacuous_pass(self):
        rep = check_validity(self.body, self.split, NoCut(),
                             SampleConfig(seed=3, count=500))
        assert rep.passed

    def test_determinism(self):
        cfg = SampleConfig(seed=11, count=1000)
        r1 = check_validity(self.body, self.split, disk_cut(2.0), cfg)
        r2 = check_validity(self.body, self.split, disk_cut(2.0), cfg)
        assert r1.checked == r2.checked
        assert r1.max_violation == r2.max_violation
        assert np.array_equal(r1.worst_point, r2.worst_point)


class TestMonotoneChain:
    def test_square(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0],
                        [0.5, 0.5], [0.5, 0.0]])
        hull = monotone_chain(pts)
        assert hull.shape == (4, 2)
        assert {tuple(v) for v in hull} == {(0.0, 0.0), (1.0, 0.0),
                                            (1.0, 1.0), (0.0, 1.0)}

    def test_collinear(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        hull = monotone_chain(pts)
        assert hull.shape[0] == 2

    def test_single_point(self):
        hull = monotone_chain(np.array([[1.0, 2.0]]))
        assert hull.shape == (1, 2)


class TestPolygonOracle:
    def test_triangle(self):
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        oracle = PolygonOracle(tri, tol=1e-9)
        assert oracle([0.2, 0.2])
        assert not oracle([0.8, 0.8])

    def test_empty(self):
        oracle = PolygonOracle(np.empty((0, 2)), tol=1e-9)
        assert not oracle([0.0, 0.0])

    def test_scaled_metric(self):
        # a sliver polygon: with unscaled metric the point would leak in
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 100.0]])
        oracle = PolygonOracle(tri, tol=1e-3, scale=(1.0, 100.0))
        assert oracle([0.1, 1.0])
        assert not oracle([0.6, 50.0])


class TestHullOracle:
    def test_disk_minus_strip(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=0.0, pi1=1.0)
        oracle = hull_oracle_2d(body, split, 400)
        assert not oracle([0.5, 1.99])
        assert oracle([0.5, 1.8])
        assert oracle([-1.0, 1.0])

    def test_no_forbidden_gives_body(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=1.0)
        # a strip that misses the disk entirely leaves the body unchanged
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=5.0, pi1=6.0)
        oracle = hull_oracle_2d(body, split, 300)
        assert oracle([0.0, 0.0])
        assert oracle([0.9, 0.0])
        assert not oracle([1.2, 0.0])

    def test_forbidden_covers_body(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=1.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=-5.0, pi1=5.0)
        oracle = hull_oracle_2d(body, split, 200)
        assert oracle.vertices.shape[0] == 0
        assert not oracle([0.0, 0.0])

    def test_dim_unsupported(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=3, r=1.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0, 0.0]),
                                 pi0=0.0, pi1=1.0)
        with pytest.raises(DimUnsupported):
            hull_oracle_2d(body, split, 100)

    def test_vertex_soundness(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=0.0, pi1=1.0)
        density = 300
        oracle = hull_oracle_2d(body, split, density)
        spacing = 4.0 / (density - 1)
        defects = eval_body_batch(body, oracle.vertices)
        assert np.all(defects <= 2 * spacing)
        from qcut.verify import forbidden_defect_batch
        assert np.all(forbidden_defect_batch(split, oracle.vertices, False)
                      >= -1e-12)


class TestCompareToOracle:
    def test_exact_hull_formula(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=0.0, pi1=1.0)
        cut, _ = split_cut(body, split)
        assert compare_to_oracle(body, split, cut, 300, 2) == 0

    def test_weak_cut_flagged(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=0.0, pi1=1.0)
        assert compare_to_oracle(body, split, disk_cut(2.2), 300, 2) > 0

    def test_over_tight_cut_flagged(self):
        body = ConvexBody(family=Family.ELLIPSOID, n=2, r=2.0)
        split = SplitDisjunction(pi=np.array([1.0, 0.0]), pi0=0.0, pi1=1.0)
        assert compare_to_oracle(body, split, disk_cut(1.7), 300, 2) > 0

    def test_epigraph_window_enlargement(self):
        body = ConvexBody(family=Family.PARABOLOID, n=1)
        split = SplitDisjunction(pi=np.array([1.0]), pi0=0.0, pi1=1.0)
        cut, _ = split_cut(body, split)
        assert compare_to_oracle(body, split, cut, 300, 2) == 0


class TestForbiddenQuadratic:
    def test_defect_signs(self):
        from qcut.verify import forbidden_defect_batch
        region = ForbiddenQuadratic(A=np.eye(2), d=np.zeros(2), q=-1.0,
                                    gamma=0.0)
        P = np.array([[0.0, 0.0], [2.0, 0.0]])
        d = forbidden_defect_batch(region, P, False)
        assert d[0] < 0 < d[1]

    def test_epigraph_defect(self):
        from qcut.verify import forbidden_defect_batch
        region = ForbiddenQuadratic(A=np.zeros((2, 2)), d=np.zeros(2),
                                    q=-1.0, gamma=1.0)
        P = np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 2.0]])
        d = forbidden_defect_batch(region, P, True)
        assert d[0] < 0 < d[1]
