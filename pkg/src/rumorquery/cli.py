"""Command-line entry point: ``simulate`` and ``bounds`` subcommands."""

from __future__ import annotations

import argparse
import csv
import itertools
import sys

from . import bounds as B
from .errors import ConfigurationError, ParameterError
from .harness import ExperimentConfig, TopologySpec, run_experiment, write_csv

BOUNDS_HEADER = (
    "delta", "p", "q", "d",
    "K_na_nec", "K_na_suf", "K_ad_nec", "K_ad_suf", "AG_lower", "AG_upper",
    "r_na_nec", "r_na_suf", "r_ad_nec", "r_ad_suf",
)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _r_policy(text: str) -> int | str:
    return "auto" if text == "auto" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rumorquery", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo detection-probability sweep")
    sim.add_argument("--topology", default="tree:d=3",
                     help="tree:d=3 | er:n=2000,deg=4 | sf:n=2000,ratio=1.5 | file:PATH")
    sim.add_argument("--scheme", choices=("na", "ad", "rc"), default="na")
    sim.add_argument("--n-infected", type=int, default=400)
    sim.add_argument("--trials", type=int, default=200)
    sim.add_argument("--K", type=_ints, default=(25, 50, 100, 200, 400), help="comma-separated budgets")
    sim.add_argument("--r", type=_r_policy, default="auto", help="'auto' or a fixed repetition count")
    sim.add_argument("--p", type=_floats, default=(0.667,), help="comma-separated id truthfulness values")
    sim.add_argument("--q", type=_floats, default=(0.667,), help="comma-separated dir truthfulness values")
    sim.add_argument("--seed", type=int, default=42)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    bnd = sub.add_parser("bounds", help="tabulate the closed-form budget bounds as CSV")
    bnd.add_argument("--delta", type=_floats, default=(0.1,))
    bnd.add_argument("--p", type=_floats, default=(2 / 3,))
    bnd.add_argument("--q", type=_floats, default=(2 / 3,))
    bnd.add_argument("--d", type=_ints, default=(3,))
    bnd.add_argument("--C-d", type=float, default=1.0, dest="C_d")
    bnd.add_argument("--H-T", type=float, default=1.0, dest="H_T")
    bnd.add_argument("--U1", type=float, default=1.0)
    bnd.add_argument("--U2", type=float, default=1.0)
    bnd.add_argument("--out", default="-")
    return parser


def bounds_rows(deltas, ps, qs, ds, C_d=1.0, H_T=1.0, U1=1.0, U2=1.0) -> list[list]:
    rows = []
    for delta, p, q, d in itertools.product(deltas, ps, qs, ds):
        inp = B.BoundInputs(delta, p, q, d, C_d, H_T)
        na_nec = B.necessary_budget_na(inp)
        na_suf = B.sufficient_budget_na(inp)
        ad_nec = B.necessary_budget_ad(inp)
        ad_suf = B.sufficient_budget_ad(inp)
        gap = B.adaptivity_gap_envelope(inp, U1, U2)
        reals = [na_nec.budget, na_suf.budget, ad_nec.budget, ad_suf.budget, gap.lower, gap.upper]
        rows.append(
            [format(delta, ".6g"), format(p, ".6g"), format(q, ".6g"), d]
            + [format(x, ".6g") for x in reals]
            + [na_nec.r_star, na_suf.r_star, ad_nec.r_star, ad_suf.r_star]
        )
    return rows


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w", newline="", encoding="ascii")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = ExperimentConfig(
                topology=TopologySpec.parse(args.topology),
                n_infected=args.n_infected,
                trials=args.trials,
                scheme=args.scheme,
                K_grid=args.K,
                p_grid=args.p,
                q_grid=args.q,
                r=args.r,
                base_seed=args.seed,
            )
            rows = run_experiment(config, workers=args.workers)
            out = _open_out(args.out)
            try:
                write_csv(rows, out)
            finally:
                if out is not sys.stdout:
                    out.close()
        else:
            rows = bounds_rows(args.delta, args.p, args.q, args.d, args.C_d, args.H_T, args.U1, args.U2)
            out = _open_out(args.out)
            try:
                writer = csv.writer(out, lineterminator="\n")
                writer.writerow(BOUNDS_HEADER)
                writer.writerows(rows)
            finally:
                if out is not sys.stdout:
                    out.close()
    except (ConfigurationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
