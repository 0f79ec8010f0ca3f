"""Command line entry point: ``meshcam {sweep,scaffold-capacity,verify,bound}``."""

import argparse
import dataclasses
import logging
import os
import sys

from . import harness
from .metrics import count_synapses, mi_bound_perinbit
from .numerics import DEFAULT_RCOND
from .verify import format_checks, run_verify

EXIT_OK, EXIT_SPEC, EXIT_VERIFY = 0, 1, 2


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides the spec)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--noise", type=float, default=None, help="cue noise fraction")
    p.add_argument("--out", default="results")
    p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")
    p.add_argument("--max-steps", type=int, default=None, help="scaffold loop cap for MESH recall")


def _cmd_sweep(args):
    try:
        specs = harness.load_specs(args.spec) if args.spec else harness.default_specs()
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.noise is not None:
            overrides["noise_frac"] = args.noise
        if args.max_steps is not None:
            overrides["max_steps"] = args.max_steps
        specs = [dataclasses.replace(sp, **overrides) for sp in specs]
    except harness.SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    result = harness.run_sweep(specs, threads=args.threads)
    csv_path, json_path = harness.write_outputs(result, args.out, timing=args.timing)
    n_err = sum(r.status != "ok" for r in result.rows)
    print(f"wrote {len(result.rows)} rows to {csv_path} ({n_err} failed cells); summary {json_path}")
    return EXIT_OK


def _cmd_capacity(args):
    rows = harness.run_scaffold_capacity(args.n_label, args.k, args.n_hidden, args.noise, args.threshold,
                                         args.trials, args.seed, args.label_limit, args.density, args.hebbian_over)
    text = harness.capacity_csv(rows)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "scaffold_capacity.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_verify(args):
    checks = run_verify(rcond=args.rcond, corrupt_w_lh=args.corrupt_w_lh, seeds=range(args.seeds))
    print(format_checks(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def _cmd_bound(args):
    for n_patts in args.n_patts:
        raw = mi_bound_perinbit(args.n_hidden, args.n_feature, args.n_label, n_patts, cap=False)
        print(f"N_patts={n_patts}: bound={raw:.6g} bits/input bit (capped {min(1.0, raw):.6g}), "
              f"approx 2N_H/N_patts={2 * args.n_hidden / n_patts:.6g}")
    syn = count_synapses("mesh", n_label=args.n_label, n_hidden=args.n_hidden, n_feature=args.n_feature)
    print(f"learnable synapses={syn.learnable} fixed={syn.fixed}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="meshcam", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run recall sweeps, write CSV + JSON summary")
    p.add_argument("spec", nargs="?", help="YAML/JSON sweep spec; default desk-scale suite if omitted")
    _common(p)
    p.add_argument("--timing", action="store_true", help="fill the wall_time column (breaks byte-identity)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("scaffold-capacity", help="capacity of the memory scaffold over an (N_L, k, N_H) grid")
    p.add_argument("--n-label", type=int, nargs="+", default=[10, 12, 15])
    p.add_argument("--k", type=int, nargs="+", default=[3])
    p.add_argument("--density", type=float, default=None, help="fix k/N_L instead of k")
    p.add_argument("--n-hidden", type=int, nargs="+", default=[20, 50, 100, 150, 200])
    p.add_argument("--threshold", type=float, default=0.03)
    p.add_argument("--label-limit", type=int, default=None)
    p.add_argument("--hebbian-over", choices=["all", "stored"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--out", default="results")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("verify", help="run the invariant suite; exit 2 on any failure")
    p.add_argument("--rcond", type=float, default=DEFAULT_RCOND)
    p.add_argument("--corrupt-w-lh", action="store_true", help="fault injection: scramble W_LH")
    p.add_argument("--seeds", type=int, default=5)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bound", help="print the synaptic MI bound for given layer sizes")
    p.add_argument("--n-hidden", type=int, required=True)
    p.add_argument("--n-feature", type=int, required=True)
    p.add_argument("--n-label", type=int, required=True)
    p.add_argument("--n-patts", type=int, nargs="+", required=True)
    p.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
