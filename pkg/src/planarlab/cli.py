"""Command-line entry point: ``planarlab {estimate,sweep,blocks,bounds}``.

Exit codes: 0 success, 2 invalid arguments or parameter out of range,
3 experiment rejected by the resource guard.

Configuration precedence for ``estimate``: command-line flags, then a
``--config`` JSON file, then ``--preset``. The default worker count comes from
``PLANARLAB_WORKERS`` (1 if unset).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

from . import blocks as blk
from . import bounds, models, montecarlo, reduction, solvers
from .bounds import DomainError
from .montecarlo import ExperimentConfig, ResourceGuardError, dumps

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3

WORKERS_ENV = "PLANARLAB_WORKERS"

PRESETS = {
    "small-graph": {"model": "words", "r": 5000, "s": 5000, "k": 1_000_000, "trials": 10_000},
    "words-k4096": {"model": "words", "n": 32768, "k": 4096, "trials": 100},
    "binomial": {"model": "binomial", "n": 16384, "p": 1 / 1024, "trials": 100},
    "lis": {"model": "permutation", "n": 40_000, "trials": 200},
    "odb": {"model": "odb", "n": 2000, "p": 0.3, "trials": 50},
    "geometric": {"model": "geometric", "n": 300, "p": 0.5, "trials": 50},
}

# defaults for the otherwise unspecified constants; only used here
CONSTANT_DEFAULTS = {"C": 25.0, "C_tilde": 25.0, "C1": 5.0, "c": 1.0, "B0": 1.0, "B1": 1.0}


class UsageError(Exception):
    pass


def _default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _common_run_flags(p):
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--tail", type=_float_list, help="relative tail thresholds, e.g. 0.1,0.2")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--deterministic", action="store_true", help="omit the timestamp field")


def _estimate_config(args) -> ExperimentConfig:
    merged = {}
    if args.preset:
        merged.update(PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config) as fh:
                merged.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
    flags = {
        "model": args.model, "n": args.n, "r": args.r, "s": args.s, "k": args.k, "p": args.p,
        "trials": args.trials, "master_seed": args.seed, "workers": args.workers,
        "statistic": args.statistic, "tail_thresholds": args.tail, "solver": args.solver,
        "cell_limit": args.cell_limit, "split_q": args.split_q,
    }
    merged.update({k: v for k, v in flags.items() if v is not None})
    if "seed" in merged:
        merged.setdefault("master_seed", merged.pop("seed"))
    merged.setdefault("workers", _default_workers())
    merged["retain_trials"] = bool(args.retain_trials or args.jsonl or merged.get("retain_trials"))
    if "model" not in merged:
        raise UsageError("--model is required (or supply it through --config/--preset)")
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise UsageError(f"bad config key: {exc}")


def cmd_estimate(args) -> int:
    cfg = _estimate_config(args)
    summary = montecarlo.run_experiment(cfg)
    _write(dumps(summary.to_dict(timestamp=not args.deterministic)) + "\n", args.out)
    if args.jsonl:
        _write(montecarlo.trial_records_jsonl(summary), args.jsonl)
    return EXIT_OK


SWEEP_COLUMNS = ("n", "trials", "mean", "se", "normalized")


def _fmt(x):
    if isinstance(x, int):
        return str(x)
    return format(x, ".12g")


def cmd_sweep(args) -> int:
    if (args.k_list is None) == (args.p_list is None):
        raise UsageError("give exactly one of --k-list or --p-list")
    if args.ratio is None or args.ratio <= 0:
        raise UsageError("--ratio must be positive")
    workers = args.workers or _default_workers()
    trials = args.trials if args.trials is not None else 100
    seed = args.seed if args.seed is not None else 0
    tails = args.tail or []
    key = "k" if args.k_list is not None else "p"
    points = args.k_list if args.k_list is not None else args.p_list
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([key, *SWEEP_COLUMNS, *(f"tail_{_fmt(t)}" for t in tails)])
    for x in points:
        if key == "k":
            n = round(args.ratio * math.sqrt(x))
            cfg = ExperimentConfig("words", n=n, k=int(x), trials=trials, master_seed=seed,
                                   workers=workers, tail_thresholds=tails, cell_limit=args.cell_limit)
        else:
            n = round(args.ratio / math.sqrt(x))
            cfg = ExperimentConfig("binomial", n=n, p=x, trials=trials, master_seed=seed,
                                   workers=workers, tail_thresholds=tails, cell_limit=args.cell_limit)
        s = montecarlo.run_experiment(cfg)
        writer.writerow([_fmt(x), n, s.trials, _fmt(s.mean), _fmt(s.se), _fmt(s.normalized),
                         *(_fmt(row.frequency) for row in s.tails)])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_blocks(args) -> int:
    params = bounds.block_parameters(args.n, args.k, args.delta, args.epsilon, args.alpha, args.beta)
    if params.e_max < 1:
        raise DomainError("e_max", params.e_max, "e_max >= 1 (instance too small for these parameters)")
    w = models.sample_word_pair(args.n, args.n, args.k, models.RngStream(args.seed, 0))
    matching = solvers.planar_matching_recover(models.words_to_graph(w))
    part = blk.build_block_partition(matching, params.ell, params.e_max, spread=args.spread)
    part = blk.classify_and_enlarge(part, args.delta, args.n)
    problems = blk.check_invariants(part, args.delta)
    rep = part.report
    lines = [
        f"# n={args.n} k={args.k} seed={args.seed} matching_size={len(matching)}",
        f"# ell={params.ell} e_max={params.e_max} m_max={_fmt(params.m_max)} q={part.q}"
        f" type_length={len(blk.type_of(part))}",
        f"# short={rep.short_count} short_bound={_fmt(rep.short_bound)}"
        f" sum_r_bar={_fmt(rep.sum_r)} sum_s_bar={_fmt(rep.sum_s)}",
        blk.to_text(part).rstrip("\n"),
        "# invariants: " + ("pass" if not problems else "FAIL"),
        *(f"#   {msg}" for msg in problems),
    ]
    _write("\n".join(x for x in lines if x) + "\n", args.out)
    return EXIT_OK if not problems else 1


def _bounds_eval(a):
    ev = a.evaluator
    if ev == "m-upper":
        return {"value": bounds.m_upper(a.r, a.s, a.k, a.delta)}
    if ev == "m-lower":
        return {"value": bounds.m_lower(a.r, a.s, a.k, a.delta)}
    if ev == "prop5-regime":
        return bounds.prop5_regime_check(a.r, a.s, a.k, a.delta, a.C, a.which).as_dict()
    if ev == "prop5-tail-upper":
        return {"value": bounds.prop5_tail_upper(a.r, a.s, a.k, a.delta, a.t)}
    if ev == "prop5-tail-lower":
        return {"value": bounds.prop5_tail_lower(a.r, a.s, a.k, a.delta, a.t)}
    if ev in ("bdj-upper", "bdj-lower"):
        fn = bounds.bdj_tail_upper if ev == "bdj-upper" else bounds.bdj_tail_lower
        v = fn(a.N, a.lam, a.B1, a.c, a.B0)
        return {"value": v.value, "in_window": v.in_window, "reason": v.reason}
    if ev == "chebyshev":
        return {"value": bounds.chebyshev_indicator_bound(a.EX, a.Delta, a.t)}
    if ev == "type-count":
        v = bounds.type_count_log_bound(a.n, a.ell, a.q_max, a.C1)
        return {"log_count": v.log_count, "argmax_q": v.argmax_q, "closed_form": v.closed_form,
                "holds": v.holds, "margin": v.margin}
    if ev == "block-params":
        v = bounds.block_parameters(a.n, a.k, a.delta, a.epsilon, a.alpha, a.beta)
        return {"ell": v.ell, "e_max": v.e_max, "m_max": v.m_max, "n_large_enough": v.n_large_enough}
    if ev == "lower-params":
        v = bounds.lower_bound_parameters(a.k, a.delta, a.C_tilde)
        return {"n_tilde": v.n_tilde, "epsilon": v.epsilon, "expectation_floor": v.expectation_floor,
                "gate_value": v.gate_value, "gate_holds": v.gate_holds, "size_condition": v.size_condition}
    if ev == "tail-form":
        return {"value": bounds.theorem_tail_form(a.n, a.k_or_p, a.epsilon, a.c, a.model)}
    if ev == "johansson":
        return {"value": bounds.johansson_limit(a.p)}
    if ev == "odb-limit":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", bounds.RegimeWarning)
            value = bounds.odb_limit(a.p)
        return {"value": value, "in_regime": bounds.odb_limit_in_regime(a.p)}
    if ev == "expected-removed":
        bounds._sizes(a.r, a.s, a.k)
        v = reduction.expected_removed_exact(a.r, a.s, a.k)
        return {"exact": v.exact, "bound": v.bound}
    raise UsageError(f"unknown evaluator {ev}")


def cmd_bounds(args) -> int:
    inputs = {k: v for k, v in vars(args).items() if k not in ("command", "evaluator", "func", "out")}
    result = _bounds_eval(args)
    _write(dumps({"evaluator": args.evaluator, "inputs": inputs, "result": result}) + "\n", args.out)
    return EXIT_OK


def _add_bounds_parsers(sub):
    k = CONSTANT_DEFAULTS

    def mk(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out")
        return p

    def rsk(p, delta=True):
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--s", type=int, required=True)
        p.add_argument("--k", type=float, required=True)
        if delta:
            p.add_argument("--delta", type=float, required=True)

    for name in ("m-upper", "m-lower"):
        rsk(mk(name, "2(1 +/- delta) sqrt(rs/k)"))
    p = mk("prop5-regime", "small-graph regime conditions")
    rsk(p)
    p.add_argument("--C", type=float, default=k["C"])
    p.add_argument("--which", choices=("upper", "lower"), default="upper")
    for name in ("prop5-tail-upper", "prop5-tail-lower"):
        p = mk(name, "small-graph tail bound value")
        rsk(p)
        p.add_argument("--t", type=float, required=True)
    for name in ("bdj-upper", "bdj-lower"):
        p = mk(name, "LIS tail bound value")
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
        p.add_argument("--B1", type=float, default=k["B1"])
        p.add_argument("--c", type=float, default=k["c"])
        p.add_argument("--B0", type=float, default=k["B0"])
    p = mk("chebyshev", "(EX(1-EX)+Delta)/t^2")
    p.add_argument("--EX", type=float, required=True)
    p.add_argument("--Delta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p = mk("type-count", "log of the block-type count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--q-max", dest="q_max", type=int, required=True)
    p.add_argument("--C1", type=float, default=k["C1"])
    p = mk("block-params", "ell, e_max, m_max")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float)
    p = mk("lower-params", "n_tilde, epsilon and the C_tilde gate")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--C-tilde", dest="C_tilde", type=float, default=k["C_tilde"])
    p = mk("tail-form", "exp(-c n/sqrt k) or exp(-c n sqrt p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-or-p", dest="k_or_p", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c", type=float, default=k["c"])
    p.add_argument("--model", choices=("words", "binomial"), default="words")
    for name in ("johansson", "odb-limit"):
        mk(name, "limit constant").add_argument("--p", type=float, required=True)
    rsk(mk("expected-removed", "exact E[Y] and its crude bound"), delta=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planarlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="run one Monte Carlo experiment, print a JSON summary")
    p.add_argument("--model", choices=montecarlo.MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--statistic")
    p.add_argument("--solver", choices=("sparse", "dp"))
    p.add_argument("--split-q", dest="split_q", type=int)
    p.add_argument("--cell-limit", dest="cell_limit", type=int)
    p.add_argument("--retain-trials", action="store_true", help="keep per-trial values in the summary")
    p.add_argument("--jsonl", help="also write per-trial records as JSON lines here")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--preset", choices=sorted(PRESETS))
    _common_run_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="normalized L along a k or p list, CSV output")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k-list", dest="k_list", type=_int_list)
    g.add_argument("--p-list", dest="p_list", type=_float_list)
    p.add_argument("--ratio", type=float, help="n/sqrt(k) or n*sqrt(p), held fixed")
    p.add_argument("--cell-limit", dest="cell_limit", type=int, default=montecarlo.DEFAULT_CELL_LIMIT)
    _common_run_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("blocks", help="block partition of one sampled maximum matching")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--beta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spread", choices=("nodes", "difference"), default="nodes")
    p.add_argument("--out")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound, print JSON")
    _add_bounds_parsers(p.add_subparsers(dest="evaluator", required=True))
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except DomainError as exc:
        sys.stderr.write(json.dumps({"error": exc.as_dict()}, default=str) + "\n")
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"planarlab: error: {exc}\n")
        return EXIT_USAGE
    except ResourceGuardError as exc:
        sys.stderr.write(f"planarlab: resource guard: {exc}\n")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
