#!/usr/bin/env python3
"""Solve an exported LP file with HiGHS and compare the optimum."""

import argparse
import sys

import highspy


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("lp", help="CPLEX LP file")
    ap.add_argument("--expect", type=float, help="objective to compare against")
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--parse-only", action="store_true",
                    help="only check that the file reads cleanly")
    ap.add_argument("--solution", help="write '<var> <0|1>' lines here")
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.lp}", file=sys.stderr)
        return 2
    lp = h.getLp()
    print(f"columns {lp.num_col_} rows {lp.num_row_}")
    if args.parse_only:
        return 0

    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        print("status infeasible")
        return 0 if args.expect is None else 1
    if status != highspy.HighsModelStatus.kOptimal:
        print(f"status {h.modelStatusToString(status)}", file=sys.stderr)
        return 1
    objective = h.getInfo().objective_function_value
    print(f"status optimal objective {objective:.6f}")

    if args.solution:
        values = h.getSolution().col_value
        names = [h.getColName(j)[1] for j in range(lp.num_col_)]
        with open(args.solution, "w") as out:
            for name, v in zip(names, values):
                out.write(f"{name} {int(round(v))}\n")

    if args.expect is not None and abs(objective - args.expect) > args.tol * max(1.0, abs(args.expect)):
        print(f"objective differs: expected {args.expect:.6f}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
