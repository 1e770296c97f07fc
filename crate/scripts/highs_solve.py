#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and write a `name value` solution file.

Usage: highs_solve.py MODEL.lp SOLUTION.sol [--time-limit SECONDS] [--threads N]

Use as a solver command template:
    python3 scripts/highs_solve.py {model} {solution} --time-limit 60
"""

import argparse
import sys

import highspy


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if args.threads is not None:
        h.setOptionValue("threads", args.threads)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 2
    h.run()

    status = h.getModelStatus()
    info = h.getInfo()
    has_point = info.primal_solution_status == 2  # kSolutionStatusFeasible
    if status == highspy.HighsModelStatus.kOptimal:
        word = "optimal"
    elif status == highspy.HighsModelStatus.kInfeasible:
        word = "infeasible"
    elif has_point:
        word = "feasible"
    else:
        word = "unknown"

    lp = h.getLp()
    values = h.getSolution().col_value
    with open(args.solution, "w") as out:
        out.write(f"# HiGHS {h.version()}: {h.modelStatusToString(status)}\n")
        out.write(f"status {word}\n")
        if has_point:
            out.write(f"objective {info.objective_function_value!r}\n")
            for name, value in zip(lp.col_names_, values):
                if value != 0.0:
                    out.write(f"{name} {value!r}\n")
    print(f"{word}: {h.modelStatusToString(status)}", file=sys.stderr)
    return 0 if has_point else 1


if __name__ == "__main__":
    sys.exit(main())
