"""Command-line front end: JSON instances in, cut files and reports out.

Subcommands
-----------
cut      read an instance file, write the closed-form cut as JSON
verify   sample-check a cut against an instance (exit 1 on failure)
oracle   compare a 2D hull description with the rasterized oracle; writes
         delimited output and, optionally, a rendered figure
demo     cvp / svp bound demonstrations
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from .errors import DimensionCap, InputError, QcutError
from .interscuts import intersection_cut_quadratic
from .linalg import DIM_CAP
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
    eval_cut,
)
from .splitcuts import split_cut
from .verify import (
    ForbiddenQuadratic,
    SampleConfig,
    check_validity,
    compare_to_oracle,
    hull_oracle_2d,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


# --- instance / cut file schema ---------------------------------------------

def parse_body(obj: dict) -> ConvexBody:
    if not isinstance(obj, dict) or "family" not in obj or "n" not in obj:
        raise InputError("body must be an object with 'family' and 'n'")
    try:
        fam = Family(str(obj["family"]).lower())
    except ValueError:
        raise InputError(f"unknown family {obj['family']!r}")
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        raise InputError("body.n must be a positive integer")
    if n > DIM_CAP:
        raise DimensionCap(f"dimension {n} exceeds the cap {DIM_CAP}")
    kwargs = {}
    for key in ("B", "c"):
        if key in obj and obj[key] is not None:
            kwargs[key] = np.asarray(obj[key], dtype=float)
    for key in ("r", "l"):
        if key in obj and obj[key] is not None:
            kwargs[key] = float(obj[key])
    if "p" in obj and obj["p"] is not None:
        kwargs["p"] = int(obj["p"])
    return ConvexBody(family=fam, n=n, **kwargs)


def parse_split(obj: dict) -> SplitDisjunction:
    for key in ("pi", "pi0", "pi1"):
        if key not in obj:
            raise InputError(f"split is missing '{key}'")
    return SplitDisjunction(pi=np.asarray(obj["pi"], dtype=float),
                            pi0=float(obj["pi0"]), pi1=float(obj["pi1"]),
                            pi_hat=float(obj.get("pi_hat", 0.0)))


def parse_forbidden(obj: dict) -> ForbiddenQuadratic:
    if obj.get("kind") != "quadratic":
        raise InputError("forbidden.kind must be 'quadratic'")
    for key in ("A", "d", "q"):
        if key not in obj:
            raise InputError(f"forbidden is missing '{key}'")
    return ForbiddenQuadratic(A=np.asarray(obj["A"], dtype=float),
                              d=np.asarray(obj["d"], dtype=float),
                              q=float(obj["q"]),
                              gamma=float(obj.get("gamma", 0.0)))


def parse_instance(obj: dict):
    if not isinstance(obj, dict) or "body" not in obj:
        raise InputError("instance must be an object with a 'body'")
    body = parse_body(obj["body"])
    split = obj.get("split")
    forbidden = obj.get("forbidden")
    if (split is None) == (forbidden is None):
        raise InputError("instance needs exactly one of 'split'/'forbidden'")
    region = parse_split(split) if split is not None else \
        parse_forbidden(forbidden)
    return body, region


def serialize_cut(cut: Cut, case: Optional[CaseLabel] = None,
                  provenance: Optional[dict] = None) -> dict:
    if isinstance(cut, NormCut):
        out = {"type": "norm", "M": cut.M.tolist(), "m": cut.m.tolist(),
               "p": cut.p, "q": cut.q.tolist(), "h": cut.h, "k": cut.k}
    elif isinstance(cut, QuadraticCut):
        out = {"type": "quadratic", "E": cut.E.tolist(), "a": cut.a.tolist(),
               "f": cut.f, "t_coef": cut.t_coef}
    elif isinstance(cut, LinearCut):
        out = {"type": "linear", "g": cut.g.tolist(), "h": cut.h,
               "k": cut.k, "sense": cut.sense}
    elif isinstance(cut, NoCut):
        out = {"type": "nocut"}
    elif isinstance(cut, EmptyHull):
        out = {"type": "emptyhull"}
    else:
        raise InputError(f"cannot serialize {cut!r}")
    if case is not None:
        out["case"] = case.value
    if provenance is not None:
        out["provenance"] = provenance
    return out


def parse_cut(obj: dict) -> Cut:
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError("cut file must be an object with a 'type'")
    kind = obj["type"]
    try:
        if kind == "norm":
            return NormCut(M=np.asarray(obj["M"], dtype=float),
                           m=np.asarray(obj["m"], dtype=float),
                           p=int(obj["p"]),
                           q=np.asarray(obj["q"], dtype=float),
                           h=float(obj["h"]), k=float(obj["k"]))
        if kind == "quadratic":
            return QuadraticCut(E=np.asarray(obj["E"], dtype=float),
                                a=np.asarray(obj["a"], dtype=float),
                                f=float(obj["f"]),
                                t_coef=float(obj["t_coef"]))
        if kind == "linear":
            return LinearCut(g=np.asarray(obj["g"], dtype=float),
                             h=float(obj["h"]), k=float(obj["k"]),
                             sense=str(obj["sense"]))
        if kind == "nocut":
            return NoCut()
        if kind == "emptyhull":
            return EmptyHull()
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed cut file: {exc}")
    raise InputError(f"unknown cut type {kind!r}")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")


def _dump_json(obj, path: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QCUT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"QCUT_SEED={env!r} is not an integer")
    return 0


# --- cut generation ----------------------------------------------------------

def generate_cut(body: ConvexBody, region):
    """Closed-form cut for the instance; returns (cut, case, provenance)."""
    if isinstance(region, SplitDisjunction):
        cut, case = split_cut(body, region)
        prov = {"operation": "split_cut",
                "split": {"pi": region.pi.tolist(), "pi_hat": region.pi_hat,
                          "pi0": region.pi0, "pi1": region.pi1}}
        return cut, case, prov
    if body.family is not Family.PARABOLOID:
        raise InputError("quadratic forbidden regions pair with paraboloids")
    cut = intersection_cut_quadratic(body.B, body.c, region.A, region.d,
                                     region.q, region.gamma)
    prov = {"operation": "intersection_cut_quadratic",
            "forbidden": {"A": region.A.tolist(), "d": region.d.tolist(),
                          "q": region.q, "gamma": region.gamma}}
    return cut, None, prov


# --- demos -------------------------------------------------------------------

def _minimize_grid(fn, lo: np.ndarray, hi: np.ndarray,
                   points: int = 41, rounds: int = 8) -> float:
    """Coarse grid minimization with window refinement; ~1e-4 accurate for
    the desk-scale demo surfaces (not a solver)."""
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    n = lo.size
    best_x, best_v = None, math.inf
    for _ in range(rounds):
        axes = [np.linspace(lo[i], hi[i], points) for i in range(n)]
        mesh = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1).T
        vals = fn(mesh)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_v, best_x = float(vals[i]), mesh[i]
        width = (hi - lo) / (points - 1)
        lo = best_x - 2.0 * width
        hi = best_x + 2.0 * width
    return best_v


def demo_cvp(B, c) -> dict:
    """Per-coordinate unit-interval split cuts for min ||B(x-c)||^2 over
    integer x, with the resulting lower bounds on t."""
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    n = c.size
    body = ConvexBody(family=Family.PARABOLOID, n=n, B=B, c=c)

    def F(X):
        Z = (X - c) @ B.T
        return np.sum(Z * Z, axis=1)

    cuts = []
    for k in range(n):
        pi = np.zeros(n)
        pi[k] = 1.0
        lo = math.floor(c[k])
        split = SplitDisjunction(pi=pi, pi0=float(lo), pi1=float(lo + 1))
        cut, _ = split_cut(body, split)
        cuts.append(cut)

    def cut_surface(cut):
        def g(X):
            return np.einsum("ij,jk,ik->i", X, cut.E, X) + X @ cut.a + cut.f
        return g

    lo_box, hi_box = c - 2.0, c + 2.0
    per_coordinate = []
    for cut in cuts:
        g = cut_surface(cut)
        per_coordinate.append(
            _minimize_grid(lambda X: np.maximum(F(X), g(X)), lo_box, hi_box))
    surfaces = [cut_surface(cut) for cut in cuts]

    def combined(X):
        acc = F(X)
        for g in surfaces:
            acc = np.maximum(acc, g(X))
        return acc

    bound = _minimize_grid(combined, lo_box, hi_box)
    return {"demo": "cvp",
            "unstrengthened_bound": 0.0,
            "per_coordinate_bounds": per_coordinate,
            "combined_bound": bound}


def demo_svp(B, radius: float = 1.0) -> dict:
    """Split-futility phase plus the ball intersection cut for
    min ||B x||^2 over nonzero integer x."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    body = ConvexBody(family=Family.PARABOLOID, n=n, B=B)
    origin = np.zeros(n + 1)

    # phase 1: every unit-interval integer split leaves the origin feasible,
    # so split cuts alone cannot move the bound off 0
    origin_feasible = True
    for k in range(n):
        pi = np.zeros(n)
        pi[k] = 1.0
        for m in range(-2, 2):
            split = SplitDisjunction(pi=pi, pi0=float(m), pi1=float(m + 1))
            cut, _ = split_cut(body, split)
            if eval_cut(cut, origin) > 1e-12:
                origin_feasible = False
    split_only_bound = 0.0 if origin_feasible else None

    # phase 2: the ball of the given radius (in the ||B x|| metric) contains
    # no nonzero lattice point; cut it out
    cut = intersection_cut_quadratic(B, np.zeros(n), B, np.zeros(n),
                                     -radius * radius, 0.0)

    def F(X):
        Z = X @ B.T
        return np.sum(Z * Z, axis=1)

    def g(X):
        num = np.einsum("ij,jk,ik->i", X, cut.E, X) + X @ cut.a + cut.f
        return num / cut.t_coef

    bound = _minimize_grid(lambda X: np.maximum(F(X), g(X)),
                           -2.0 * np.ones(n), 2.0 * np.ones(n))
    return {"demo": "svp",
            "split_only_bound": split_only_bound,
            "cut_bound": bound,
            "radius": radius,
            "cut": serialize_cut(cut)}


# --- subcommand drivers ------------------------------------------------------

def _cmd_cut(args) -> int:
    body, region = parse_instance(_load_json(args.input))
    cut, case, prov = generate_cut(body, region)
    _dump_json(serialize_cut(cut, case, prov), args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    body, region = parse_instance(_load_json(args.input))
    if args.cut is not None:
        cut = parse_cut(_load_json(args.cut))
    else:
        cut, _, _ = generate_cut(body, region)
    cfg = SampleConfig(seed=_seed(args), count=args.samples)
    report = check_validity(body, region, cut, cfg, tol=args.tol)
    _dump_json({"checked": report.checked,
                "max_violation": report.max_violation,
                "worst_point": None if report.worst_point is None
                else report.worst_point.tolist(),
                "pass": report.passed}, args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_oracle(args) -> int:
    body, region = parse_instance(_load_json(args.input))
    if args.cut is not None:
        cut = parse_cut(_load_json(args.cut))
    else:
        cut, _, _ = generate_cut(body, region)
    mismatches = compare_to_oracle(body, region, cut,
                                   grid_density=args.grid, band=args.band)
    rows = [["family", "grid", "band", "mismatches"],
            [body.family.value, args.grid, args.band, mismatches]]
    if args.output is None:
        writer = csv.writer(sys.stdout)
        writer.writerows(rows)
    else:
        with open(args.output, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    if args.figure is not None:
        from .plotting import render_oracle_figure
        oracle = hull_oracle_2d(body, region, args.grid)
        render_oracle_figure(body, region, cut, oracle, args.figure,
                             grid_density=args.grid)
    return EXIT_OK if mismatches == 0 else EXIT_FAIL


def _cmd_demo(args) -> int:
    data = _load_json(args.input) if args.input is not None else {}
    if args.which == "cvp":
        B = np.asarray(data.get("B", np.eye(2)), dtype=float)
        c = np.asarray(data.get("c", [0.5, 0.5]), dtype=float)
        report = demo_cvp(B, c)
    else:
        B = np.asarray(data.get("B", np.eye(2)), dtype=float)
        radius = float(data.get("radius", 1.0))
        report = demo_svp(B, radius)
    _dump_json(report, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcut",
        description="Closed-form hull cuts for structured convex sets minus "
                    "forbidden regions, with verification oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("-i", "--input", required=True, metavar="PATH")
        else:
            p.add_argument("-i", "--input", default=None, metavar="PATH")
        p.add_argument("-o", "--output", default=None, metavar="PATH")

    p_cut = sub.add_parser("cut", help="generate a cut file")
    common(p_cut)

    p_ver = sub.add_parser("verify", help="sample-check a cut")
    common(p_ver)
    p_ver.add_argument("-c", "--cut", default=None, metavar="PATH")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("-n", "--samples", type=int, default=2000)
    p_ver.add_argument("--tol", type=float, default=1e-7)

    p_orc = sub.add_parser("oracle", help="2D hull-oracle comparison")
    common(p_orc)
    p_orc.add_argument("-c", "--cut", default=None, metavar="PATH")
    p_orc.add_argument("--grid", type=int, default=300)
    p_orc.add_argument("--band", type=int, default=2)
    p_orc.add_argument("--figure", default=None, metavar="PATH",
                       help="render the comparison as a PNG")

    p_demo = sub.add_parser("demo", help="CVP/SVP bound demonstrations")
    p_demo.add_argument("which", choices=["cvp", "svp"])
    common(p_demo, needs_input=False)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "cut":
            return _cmd_cut(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        return _cmd_demo(args)
    except QcutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
