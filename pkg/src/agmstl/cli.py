"""Command-line interface: monitor, synth, disturb, compare.

Exit codes: 0 satisfied/feasible, 1 violated/infeasible, 2 inconclusive,
3 runtime errors, 4 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import robustness
from .config import ConfigError, load_config
from .disturbance import DisturbanceConfig, default_sigmas, failure_rate
from .dynamics import SimulationError, simulate, to_trace
from .formula import ParseError, parse
from .signal import Trace, TraceError, load_trace
from .synthesis import gradient_ascent

EXIT_SAT = 0
EXIT_VIOLATED = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3
EXIT_USAGE = 4

_STATUS_EXIT = {
    robustness.Status.SAT: EXIT_SAT,
    robustness.Status.VIOLATED: EXIT_VIOLATED,
    robustness.Status.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the
    # "inconclusive" verdict code.
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _verdict_payload(verdict: robustness.Verdict, t: int) -> dict:
    return {
        "score": _jsonable(verdict.score),
        "status": verdict.status.value,
        "semantics": verdict.semantics,
        "beta": verdict.beta,
        "t": t,
    }


def cmd_monitor(args) -> int:
    trace = load_trace(args.trace)
    phi = parse(args.formula)
    if args.semantics == "agm":
        verdict = robustness.agm(phi, trace, args.at, scale=args.scale)
    elif args.semantics == "smooth":
        verdict = robustness.smooth(phi, trace, args.at,
                                    robustness.SmoothConfig(args.beta),
                                    rho_top=args.rho_top)
    else:
        verdict = robustness.traditional(phi, trace, args.at,
                                         rho_top=args.rho_top)
    _emit(_verdict_payload(verdict, args.at))
    return _STATUS_EXIT[verdict.status]


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_synth(args) -> int:
    setup = load_config(args.config)
    optimizer = setup.optimizer
    if args.seed is not None:
        optimizer = dataclasses.replace(optimizer, seed=args.seed)
    problem = setup.problem()
    result = gradient_ascent(problem, optimizer)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = setup.model
    trajectory_path = out_dir / "trajectory.csv"
    _write_csv(trajectory_path, ("t",) + model.state_names,
               ([t] + [repr(v) for v in row]
                for t, row in enumerate(result.trajectory)))
    history_path = out_dir / "score_history.csv"
    _write_csv(history_path, ("iteration", "best_score"),
               ([i, _jsonable(s)] for i, s in enumerate(result.score_history)))
    policy_path = out_dir / "policy.csv"
    _write_csv(policy_path, ("t",) + model.input_names,
               ([t] + [repr(v) for v in row]
                for t, row in enumerate(result.u_star)))

    payload = {
        "feasible": result.feasible,
        "score": _jsonable(result.score),
        "semantics": problem.semantics,
        "scale": problem.scale,
        "beta": problem.beta if problem.semantics == "smooth" else None,
        "spec": setup.spec_text,
        "horizon": setup.horizon,
        "seed": result.seed,
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
        "u_star": result.u_star.tolist(),
        "files": {
            "trajectory": str(trajectory_path),
            "score_history": str(history_path),
            "policy": str(policy_path),
        },
    }
    with open(out_dir / "result.json", "w") as handle:
        json.dump(payload, handle, indent=2)
    _emit(payload)
    return EXIT_SAT if result.feasible else EXIT_VIOLATED


def _load_policy(path, model) -> np.ndarray:
    table = load_trace(path)
    if set(table.channels) != set(model.input_names):
        raise TraceError(
            f"policy channels {table.channels} do not match model inputs "
            f"{model.input_names}")
    order = [table.channel_index(name) for name in model.input_names]
    return table.values[:, order]


def cmd_disturb(args) -> int:
    setup = load_config(args.config)
    problem = setup.problem()
    u_star = _load_policy(args.policy, setup.model)
    sigmas = setup.disturbance.sigmas or default_sigmas(setup.model)
    seed = args.seed if args.seed is not None else setup.disturbance.seed

    rows = []
    summary = []
    for sigma in sigmas:
        cfg = DisturbanceConfig(sigma, setup.disturbance.n_runs, seed)
        outcome = failure_rate(problem, u_star, cfg)
        summary.append({"sigma": sigma, "failure_rate": outcome.rate})
        for run in outcome.runs:
            rows.append([repr(sigma), run.run, int(run.satisfied),
                         _jsonable(run.score)])
    _write_csv(Path(args.out), ("sigma", "run", "satisfied", "score"), rows)
    _emit({"n_runs": setup.disturbance.n_runs, "seed": seed,
           "results": summary, "out": args.out})
    return EXIT_SAT


def cmd_compare(args) -> int:
    setup = load_config(args.config)
    u_star = _load_policy(args.policy, setup.model)
    trajectory = simulate(setup.model, u_star)
    trace = to_trace(setup.model, trajectory)
    t = args.at

    rho = robustness.traditional(setup.spec, trace, t).score
    eta = robustness.agm(setup.spec, trace, t, scale=setup.scale).score
    smooth_entries = []
    for beta in args.betas:
        score = robustness.smooth(setup.spec, trace, t,
                                  robustness.SmoothConfig(beta)).score
        smooth_entries.append({"beta": beta, "score": _jsonable(score),
                               "abs_error": _jsonable(abs(score - rho))})
    _emit({
        "t": t,
        "scale": setup.scale,
        "traditional": _jsonable(rho),
        "agm": _jsonable(eta),
        "smooth": smooth_entries,
    })
    return EXIT_SAT


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="agmstl",
                             description="STL monitoring and control "
                                         "synthesis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    monitor = sub.add_parser("monitor", parents=[], help="score a trace "
                             "against a formula")
    monitor.add_argument("trace", help="trace CSV (t,<channel>,...)")
    monitor.add_argument("formula", help="formula text")
    monitor.add_argument("--semantics", default="agm",
                         choices=("agm", "smooth", "traditional"))
    monitor.add_argument("--beta", type=float, default=10.0)
    monitor.add_argument("--scale", default="half", choices=("half", "unit"))
    monitor.add_argument("--at", type=int, default=0,
                         help="evaluation time index")
    monitor.add_argument("--rho-top", type=float, default=math.inf,
                         help="score of the constant true (min/max "
                              "semantics)")
    monitor.set_defaults(func=cmd_monitor)

    synth = sub.add_parser("synth", help="synthesize a control policy")
    synth.add_argument("config", help="problem config JSON")
    synth.add_argument("--seed", type=int, default=None,
                       help="override the optimizer seed")
    synth.add_argument("--out-dir", default=".",
                       help="where result files are written")
    synth.set_defaults(func=cmd_synth)

    disturb = sub.add_parser("disturb", help="Monte-Carlo disturbance "
                             "experiment on a policy")
    disturb.add_argument("config")
    disturb.add_argument("policy", help="policy CSV (t,<input>,...)")
    disturb.add_argument("--out", default="rates.csv")
    disturb.add_argument("--seed", type=int, default=None)
    disturb.set_defaults(func=cmd_disturb)

    compare = sub.add_parser("compare", help="score one trajectory under "
                             "all three semantics")
    compare.add_argument("config")
    compare.add_argument("--policy", required=True,
                         help="policy CSV rolled out through the model")
    compare.add_argument("--betas", type=float, nargs="+",
                         default=[1.0, 10.0, 100.0])
    compare.add_argument("--at", type=int, default=0)
    compare.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, TraceError, SimulationError,
            robustness.EvaluationError, OSError, ValueError) as exc:
        print(f"agmstl: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
