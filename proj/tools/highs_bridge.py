#!/usr/bin/env python3
"""Solve an LP file with HiGHS and write a solution file for the rrcpsp bridge.

usage: highs_bridge.py MODEL.lp WARM.mst|- SOLUTION.sol TIME_LIMIT_S
"""
import math
import sys

import highspy


def main(argv):
    if len(argv) != 5:
        print(__doc__, file=sys.stderr)
        return 2
    lp, mst, sol, time_s = argv[1:]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", float(time_s))
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-7)
    if h.readModel(lp) != highspy.HighsStatus.kOk:
        print("could not read " + lp, file=sys.stderr)
        return 1
    names = list(h.getLp().col_names_)
    if mst != "-":
        index = {n: i for i, n in enumerate(names)}
        cols, vals = [], []
        with open(mst) as f:
            for line in f:
                parts = line.split()
                if len(parts) == 2 and parts[0] in index:
                    cols.append(index[parts[0]])
                    num, _, den = parts[1].partition("/")
                    vals.append(float(num) / float(den or 1))
        values = [0.0] * len(names)
        for c, v in zip(cols, vals):
            values[c] = v
        sol_obj = highspy.HighsSolution()
        sol_obj.col_value = values
        h.setSolution(sol_obj)
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    ms = highspy.HighsModelStatus
    has_sol = info.primal_solution_status == 2
    if status == ms.kOptimal:
        word = "optimal"
    elif status == ms.kInfeasible:
        word = "infeasible"
    elif status in (ms.kTimeLimit, ms.kIterationLimit, ms.kSolutionLimit, ms.kInterrupt):
        word = "timeout"
    else:
        word = "error"
    with open(sol, "w") as out:
        if has_sol and word in ("optimal", "timeout"):
            bound = info.mip_dual_bound if h.getLp().integrality_ else info.objective_function_value
            if math.isfinite(bound):
                out.write("%s %.10g %.10g\n" % (word, info.objective_function_value, bound))
            else:
                out.write("%s %.10g\n" % (word, info.objective_function_value))
            for n, v in zip(names, h.getSolution().col_value):
                out.write("%s %.10g\n" % (n, v))
        else:
            out.write(word + "\n")
    return 0 if word != "error" else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
