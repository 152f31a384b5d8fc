"""Command-line interface: basis, decompose, verify, rate-sweep, counterexample."""

import argparse
import json
import math
import sys

import numpy as np


def _cmd_basis(args):
    from .orthobasis import build_basis
    from .quadrature import build_ball_rule

    exactness = args.exactness if args.exactness is not None else 2 * args.max_degree + 2
    rule = build_ball_rule(args.dim, exactness)
    basis = build_basis(args.dim, args.max_degree, rule)
    gram = basis.gram_matrix()
    report = {
        "dim": basis.dim,
        "max_degree": basis.max_degree,
        "size": basis.size,
        "degrees": list(basis.degrees),
        "rule_exactness": rule.exactness_degree,
        "rule_nodes": len(rule.weights),
        "gram_deviation": float(np.max(np.abs(gram - np.eye(basis.size)))),
    }
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(basis.to_json_dict(), handle)
        report["output"] = args.output
    print(json.dumps(report, indent=2))
    return 0 if report["gram_deviation"] < 1e-8 else 1


def _cmd_decompose(args):
    from .polycore import MultiIndexPolynomial, dim_homogeneous, monomials_up_to
    from .ridge_real import decompose, sample_spanning_directions

    if args.input:
        with open(args.input) as handle:
            poly = MultiIndexPolynomial.from_json_dict(json.load(handle))
        if poly.dim != args.dim:
            print(f"input polynomial has dim {poly.dim}, expected {args.dim}",
                  file=sys.stderr)
            return 1
    else:
        rng = np.random.default_rng(args.seed)
        poly = MultiIndexPolynomial(args.dim, {
            k: rng.standard_normal() for k in monomials_up_to(args.dim, args.degree)})
    s = max(1, poly.degree())
    m = args.dim - args.ell + 1
    dirs = sample_spanning_directions(m, s, dim_homogeneous(m, s), seed=args.seed)
    dec = decompose(poly, dirs, args.dim, args.ell)
    out = dec.to_json_dict()
    out["residual"] = dec.residual
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(out, handle)
        print(json.dumps({"residual": dec.residual, "terms": dec.count,
                          "output": args.output}, indent=2))
    else:
        print(json.dumps(out))
    return 0


def _cmd_verify(args):
    from .pipeline import verify

    report = verify(args.suite)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 1


def _cmd_rate_sweep(args):
    from .pipeline import ExperimentConfig, rate_sweep

    if args.config:
        with open(args.config) as handle:
            cfg = ExperimentConfig.from_json_dict(json.load(handle))
        cfg.csv_path = args.csv or cfg.csv_path
        cfg.json_path = args.json_out or cfg.json_path
    else:
        cfg = ExperimentConfig(
            d=args.dim, ell=args.ell, r=args.smoothness,
            q=math.inf if args.q == "inf" else float(args.q),
            n_list=tuple(int(n) for n in args.n_list.split(",")),
            target=args.target, seed=args.seed,
            budget_factor=args.budget_factor, max_degree=args.max_degree,
            csv_path=args.csv, json_path=args.json_out)
    report = rate_sweep(cfg)
    print(report.to_csv_text(), end="")
    print(json.dumps({"slope": report.slope,
                      "theoretical_slope": report.theoretical_slope}, indent=2))
    return 0


def _cmd_counterexample(args):
    from .testfuncs import counterexample_ratio, sup_norm_counterexample

    ns = [int(n) for n in args.n_list.split(",")]
    rows = []
    for n in ns:
        rows.append({"n": n, "ratio": counterexample_ratio(n, args.dim),
                     "sup_norm": sup_norm_counterexample(n)})
    decreasing = all(b["ratio"] < a["ratio"] for a, b in zip(rows, rows[1:]))
    print(json.dumps({"rows": rows, "strictly_decreasing": decreasing}, indent=2))
    return 0 if decreasing else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ridgekit",
        description="Polynomial ridge-decomposition toolkit: bases, decompositions, "
                    "verification suites, and approximation-rate experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="build an orthonormal polynomial basis on the ball")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--exactness", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("decompose", help="decompose a polynomial into ridge terms")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--degree", type=int, default=3,
                   help="degree of the random polynomial when --input is not given")
    p.add_argument("--input", default=None, help="polynomial JSON file")
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all",
                   choices=["projector", "expansion", "trig", "bumps",
                            "counterexample", "all"])
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("rate-sweep", help="run the approximation-rate experiment")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--smoothness", type=int, default=3)
    p.add_argument("--q", default="2")
    p.add_argument("--n-list", default="4,8,16,32,64")
    p.add_argument("--target", default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-factor", type=int, default=1)
    p.add_argument("--max-degree", type=int, default=15)
    p.add_argument("--csv", default=None)
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=_cmd_rate_sweep)

    p = sub.add_parser("counterexample", help="norm-ratio decay of the worst-case family")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-list", default="16,64,256,1024")
    p.set_defaults(func=_cmd_counterexample)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
