"""Command-line front end.

Exit codes: 0 success (or relation holds), 1 relation fails, 2 input or
infeasibility error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .core import InputError, to_number
from .execution import (
    GUARD_MODES,
    BRUTE_FORCE_BOUND,
    alpha_hat,
    brute_force_optimal,
    build_pal_energy_ts,
    build_pal_time_ts,
    build_reconfigurable_ts,
    optimal_offline,
    run_fixed,
    run_policy,
    trace_to_csv,
    trace_to_doc,
    trace_to_ts,
)
from .jsonio import dumps
from .machine import load_model
from .relations import (
    UnboundedRatio,
    check_by_simulation,
    check_c_simulation,
    largest_betterment,
    largest_simulation,
    min_c_factor,
)
from .workload import PROFILES, build_spec_ts, gen_synthetic, load_workload, prefix, workload_to_csv, workload_to_doc

log = logging.getLogger("wtsim")

RUN_SCHEMES = ("baseline", "pal_time", "pal_energy", "greedy_min_energy", "optimal_dp")
SYSTEM_HELP = (
    "spec | fixed:<config> | <scheme> (deterministic run) | "
    "ts:reconfigurable | ts:pal_time | ts:pal_energy"
)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    return load_workload(args.workload, getattr(args, "workload_format", None)), load_model(args.model)


def _trace_output(trace, spec, args, scheme, extra=None) -> str:
    if args.format == "csv":
        return trace_to_csv(trace, spec)
    doc = trace_to_doc(trace, spec, scheme)
    if extra:
        doc.update(extra)
    return dumps(doc)


def cmd_run(args) -> int:
    spec, m = _load(args)
    if args.horizon is not None:
        spec = prefix(spec, args.horizon)
    trace = run_policy(args.scheme, spec, m, guard_mode=args.guard_mode)
    _emit(_trace_output(trace, spec, args, args.scheme), args.out)
    return 0


def _system(desc: str, spec, m, args, obs):
    if desc == "spec":
        return build_spec_ts(spec)
    if desc.startswith("fixed:"):
        return trace_to_ts(run_fixed(desc.split(":", 1)[1], spec, m), spec.alphabet)
    if desc in RUN_SCHEMES:
        return trace_to_ts(run_policy(desc, spec, m, guard_mode=args.guard_mode), spec.alphabet)
    if desc == "ts:reconfigurable":
        return build_reconfigurable_ts(spec, m, None, with_energy=obs != "time")
    if desc == "ts:pal_time":
        return build_pal_time_ts(spec, m, None, args.guard_mode)
    if desc == "ts:pal_energy":
        return build_pal_energy_ts(spec, m, None, args.guard_mode)
    raise InputError(f"unknown system {desc!r}; expected {SYSTEM_HELP}")


def cmd_check(args) -> int:
    if args.relation == "csim" and args.c is None:
        raise InputError("--c is required for --relation csim")
    if args.right is None:
        raise InputError("--right is required")
    spec, m = _load(args)
    if args.horizon is not None:
        spec = prefix(spec, args.horizon)
    left = args.left or "spec"
    obs = args.obs or ("time" if args.relation == "bysim" or left == "spec" else "energy")
    t1 = _system(left, spec, m, args, obs)
    t2 = _system(args.right, spec, m, args, obs)
    if args.relation == "bysim":
        verdict = check_by_simulation(t1, t2)
    elif args.relation == "sim":
        verdict = largest_simulation(t1, t2, obs)
    elif args.relation == "betterment":
        verdict = largest_betterment(t1, t2, obs)
    else:
        verdict = check_c_simulation(t1, t2, to_number(args.c, "--c"), obs)
    _emit(dumps(verdict.to_doc()), args.out)
    return 0 if verdict.holds else 1


def cmd_optimal(args) -> int:
    spec, m = _load(args)
    if args.method == "dp":
        trace, energy = optimal_offline(spec, m)
    else:
        trace, energy = brute_force_optimal(spec, m, bound=args.bound)
    _emit(_trace_output(trace, spec, args, f"optimal_{args.method}"), args.out)
    return 0


def cmd_gen(args) -> int:
    params = {"min": args.min, "max": args.max}
    if args.labels:
        params["labels"] = [s for s in args.labels.split(",") if s]
    spec = gen_synthetic(args.profile, args.n, args.seed, **params)
    if args.format == "csv":
        _emit(workload_to_csv(spec), args.out)
    else:
        _emit(dumps(workload_to_doc(spec)), args.out)
    return 0


def cmd_compare(args) -> int:
    spec, m = _load(args)
    if args.against == "optimal":
        if args.method == "bruteforce":
            ref, _ = brute_force_optimal(spec, m, bound=args.bound)
        else:
            ref, _ = optimal_offline(spec, m)
    else:
        ref = run_policy("baseline", spec, m)
    trace = run_policy(args.scheme, spec, m, guard_mode=args.guard_mode)
    c = min_c_factor(trace_to_ts(ref, spec.alphabet), trace_to_ts(trace, spec.alphabet), args.obs)
    alpha = alpha_hat(m, spec.alphabet)
    log.info("alpha_hat=%s min_c=%s", alpha, c)
    pick = (lambda s: s.time) if args.obs == "time" else (lambda s: s.energy)
    doc = {
        "scheme": args.scheme,
        "against": args.against,
        "obs": args.obs,
        "scheme_energy": trace.total_energy,
        "reference_energy": ref.total_energy,
        "scheme_final": pick(trace.final),
        "reference_final": pick(ref.final),
        "min_c": c,
        "alpha_hat": alpha,
    }
    _emit(dumps(doc), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wtsim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp):
        sp.add_argument("workload", help="workload file (.json or .csv)")
        sp.add_argument("model", help="cost model JSON file")
        sp.add_argument("--workload-format", choices=("json", "csv"))
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("run", help="run one scheme and emit its trace")
    inputs(sp)
    sp.add_argument("--scheme", required=True, choices=RUN_SCHEMES)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--guard-mode", choices=GUARD_MODES, default="literal")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("check", help="decide a relation between two systems")
    inputs(sp)
    sp.add_argument("--relation", required=True, choices=("bysim", "sim", "betterment", "csim"))
    sp.add_argument("--left", help=f"first system (default spec): {SYSTEM_HELP}")
    sp.add_argument("--right", help=f"second system: {SYSTEM_HELP}")
    sp.add_argument("--c", help="constant factor for csim")
    sp.add_argument("--obs", choices=("time", "energy", "composite"))
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--guard-mode", choices=GUARD_MODES, default="literal")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("optimal", help="offline minimum-energy schedule")
    inputs(sp)
    sp.add_argument("--method", choices=("dp", "bruteforce"), default="dp")
    sp.add_argument("--bound", type=int, default=BRUTE_FORCE_BOUND)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_optimal)

    sp = sub.add_parser("compare", help="competitive ratio of a scheme against a reference")
    inputs(sp)
    sp.add_argument("--scheme", required=True, choices=RUN_SCHEMES)
    sp.add_argument("--against", choices=("optimal", "baseline"), default="optimal")
    sp.add_argument("--obs", choices=("time", "energy"), default="energy")
    sp.add_argument("--method", choices=("dp", "bruteforce"), default="dp")
    sp.add_argument("--bound", type=int, default=BRUTE_FORCE_BOUND)
    sp.add_argument("--guard-mode", choices=GUARD_MODES, default="literal")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("gen", help="generate a synthetic workload")
    sp.add_argument("--profile", choices=PROFILES, default="uniform")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--min", type=_number_arg)
    sp.add_argument("--max", type=_number_arg)
    sp.add_argument("--labels", help="comma-separated action labels")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)
    return p


def _number_arg(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, UnboundedRatio, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
