"""Closed-form convex-hull cuts for structured sets minus forbidden regions.

Split cuts for quadratic, conic, and p-norm bodies; aggregation-based
intersection cuts; constructive sufficiency certificates; and sampling /
rasterization verification oracles.
"""

from .errors import QcutError
from .model import (
    CaseLabel,
    ConvexBody,
    Cut,
    EmptyHull,
    Family,
    LinearCut,
    NoCut,
    NormCut,
    Position,
    QuadraticCut,
    SplitDisjunction,
    eval_body,
    eval_cut,
    split_position,
)
from .splitcuts import lift_affine, split_cut
from .interscuts import (
    AggregationForm,
    QuadForm,
    aggregate_epigraph,
    aggregate_levelset,
    concentric_ellipsoid_cut,
    intersection_cut_quadratic,
    max_convex_lambda,
)
from .certify import (
    FriendsCertificate,
    check_certificate,
    friends_aggregation,
    friends_split,
)
from .verify import (
    ForbiddenQuadratic,
    SampleConfig,
    VerifyReport,
    check_validity,
    compare_to_oracle,
    hull_oracle_2d,
    sample_body,
)

__all__ = [
    "AggregationForm",
    "CaseLabel",
    "ConvexBody",
    "Cut",
    "EmptyHull",
    "Family",
    "ForbiddenQuadratic",
    "FriendsCertificate",
    "LinearCut",
    "NoCut",
    "NormCut",
    "Position",
    "QcutError",
    "QuadForm",
    "QuadraticCut",
    "SampleConfig",
    "SplitDisjunction",
    "VerifyReport",
    "aggregate_epigraph",
    "aggregate_levelset",
    "check_certificate",
    "check_validity",
    "compare_to_oracle",
    "concentric_ellipsoid_cut",
    "eval_body",
    "eval_cut",
    "friends_aggregation",
    "friends_split",
    "hull_oracle_2d",
    "intersection_cut_quadratic",
    "lift_affine",
    "max_convex_lambda",
    "sample_body",
    "split_cut",
    "split_position",
]

__version__ = "0.1.0"
