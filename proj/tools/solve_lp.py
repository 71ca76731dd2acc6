#!/usr/bin/env python3
"""Solve a CPLEX-LP-format file and print the optimal objective.

Parses the file independently of the C++ writer and hands the model to
scipy's HiGHS MILP backend. Usage: solve_lp.py MODEL.lp
Prints "objective <value>" on success.
"""
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp


def logical_lines(text):
    """Join wrapped rows: continuations start with a sign token."""
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if out and (line.startswith("+") or line.startswith("-")):
            out[-1] += " " + line
        else:
            out.append(line)
    return out


def parse_terms(text):
    """'T_1 + 2 u_1_2 - c_1' -> [(coef, var), ...]"""
    terms = []
    sign, coef = 1.0, None
    for tok in text.split():
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                coef = float(tok)
            except ValueError:
                terms.append((sign * (1.0 if coef is None else coef), tok))
                sign, coef = 1.0, None
    return terms


def main():
    if len(sys.argv) != 2:
        print("usage: solve_lp.py MODEL.lp", file=sys.stderr)
        return 2
    with open(sys.argv[1], "r", encoding="utf-8") as fh:
        lines = logical_lines(fh.read())

    section = None
    objective = []
    rows = []  # (terms, sense, rhs)
    lower = {}
    binaries = set()
    for line in lines:
        key = line.lower()
        if key == "minimize":
            section = "obj"
            continue
        if key == "subject to":
            section = "rows"
            continue
        if key == "bounds":
            section = "bounds"
            continue
        if key in ("binary", "binaries"):
            section = "bin"
            continue
        if key == "end":
            break
        if section == "obj":
            body = line.split(":", 1)[1] if ":" in line else line
            objective.extend(parse_terms(body))
        elif section == "rows":
            body = line.split(":", 1)[1] if ":" in line else line
            for sense in ("<=", ">=", "="):
                if sense in body:
                    lhs, rhs = body.rsplit(sense, 1)
                    rows.append((parse_terms(lhs), sense, float(rhs)))
                    break
        elif section == "bounds":
            if ">=" in line:
                var, lo = line.split(">=")
                lower[var.strip()] = float(lo)
        elif section == "bin":
            binaries.add(line)

    variables = []
    index = {}

    def vid(name):
        if name not in index:
            index[name] = len(variables)
            variables.append(name)
        return index[name]

    for _, v in objective:
        vid(v)
    for terms, _, _ in rows:
        for _, v in terms:
            vid(v)
    for v in binaries:
        vid(v)

    nvar = len(variables)
    c = np.zeros(nvar)
    for coef, v in objective:
        c[vid(v)] += coef

    a = np.zeros((len(rows), nvar))
    lb = np.empty(len(rows))
    ub = np.empty(len(rows))
    for i, (terms, sense, rhs) in enumerate(rows):
        for coef, v in terms:
            a[i, vid(v)] += coef
        lb[i] = rhs if sense in (">=", "=") else -np.inf
        ub[i] = rhs if sense in ("<=", "=") else np.inf

    lo = np.zeros(nvar)
    hi = np.full(nvar, np.inf)
    integrality = np.zeros(nvar)
    for v, val in lower.items():
        lo[vid(v)] = val
    for v in binaries:
        i = vid(v)
        lo[i], hi[i], integrality[i] = 0.0, 1.0, 1

    res = milp(
        c,
        constraints=LinearConstraint(a, lb, ub) if len(rows) else (),
        integrality=integrality,
        bounds=Bounds(lo, hi),
    )
    if not res.success:
        print(f"solver failed: {res.message}", file=sys.stderr)
        return 1
    print(f"objective {res.fun:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
