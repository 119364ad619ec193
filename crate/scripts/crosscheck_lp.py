#!/usr/bin/env python3
"""Solve an exported LP file with SciPy's HiGHS MILP interface.

Reads the subset of CPLEX LP format written by `qkdplan export-lp`
(Minimize / Subject To / Bounds / Generals / Binaries / End) and prints the
optimal objective. With --expect, exits nonzero unless the optimum matches
within --tol.

    python3 scripts/crosscheck_lp.py model.lp --expect 23475
"""

import argparse
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

TERM = re.compile(r"([+-])\s*(?:(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s+)?([A-Za-z_][\w.]*)")
SECTIONS = ("minimize", "subject to", "bounds", "generals", "binaries", "end")


def sections(text):
    current, out = None, {}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        if line.lower() in SECTIONS:
            current = line.lower()
            out.setdefault(current, [])
            continue
        out.setdefault(current, []).append(line)
    return out


def statements(lines):
    """Joins continuation lines: a statement starts with `name:`."""
    out = []
    for line in lines:
        if re.match(r"^[A-Za-z_][\w.]*\s*:", line):
            out.append(line)
        elif out:
            out[-1] += " " + line
    return out


def terms(expr):
    expr = expr.strip()
    if not expr.startswith(("+", "-")):
        expr = "+ " + expr
    found = []
    for sign, coef, name in TERM.findall(expr):
        c = float(coef) if coef else 1.0
        found.append((name, -c if sign == "-" else c))
    return found


def parse(text):
    sec = sections(text)
    index = {}

    def col(name):
        return index.setdefault(name, len(index))

    obj = {}
    for st in statements(sec.get("minimize", [])):
        for name, c in terms(st.split(":", 1)[1]):
            obj[col(name)] = obj.get(col(name), 0.0) + c
    rows = []
    for st in statements(sec.get("subject to", [])):
        body = st.split(":", 1)[1]
        m = re.match(r"(.*?)(<=|>=|=)\s*([-+]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$", body)
        if not m:
            raise ValueError(f"cannot parse row: {st}")
        lhs, sense, rhs = m.groups()
        rows.append(([(col(n), c) for n, c in terms(lhs)], sense, float(rhs)))
    for line in sec.get("bounds", []):
        m = re.match(r"([A-Za-z_][\w.]*)\s*>=\s*0$", line)
        if not m:
            raise ValueError(f"unsupported bound: {line}")
        col(m.group(1))
    integer = set()
    binary = set()
    for line in sec.get("generals", []):
        integer.update(col(n) for n in line.split())
    for line in sec.get("binaries", []):
        binary.update(col(n) for n in line.split())
    return index, obj, rows, integer, binary


def solve(text):
    index, obj, rows, integer, binary = parse(text)
    n = len(index)
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    a = lil_matrix((len(rows), n))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for i, (ts, sense, rhs) in enumerate(rows):
        for j, v in ts:
            a[i, j] += v
        if sense in ("<=", "="):
            hi[i] = rhs
        if sense in (">=", "="):
            lo[i] = rhs
    upper = np.full(n, np.inf)
    for j in binary:
        upper[j] = 1.0
    integrality = np.array([1 if j in integer or j in binary else 0 for j in range(n)])
    cons = [LinearConstraint(a.tocsr(), lo, hi)] if rows else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(np.zeros(n), upper))
    if res.status != 0:
        raise RuntimeError(f"solver status {res.status}: {res.message}")
    return res.fun


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("lp")
    ap.add_argument("--expect", type=float)
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()
    with open(args.lp) as f:
        value = solve(f.read())
    print(f"objective = {value:.6f}")
    if args.expect is not None and abs(value - args.expect) > args.tol * max(1.0, abs(args.expect)):
        print(f"mismatch: expected {args.expect:.6f}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
