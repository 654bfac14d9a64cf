#!/usr/bin/env python3
"""Solve a sparse SDPA file with cvxpy and print the primal objective.

SDPA form: maximize <F0, Y> s.t. <F_i, Y> = c_i, Y PSD (diagonal blocks: Y >= 0).
Prints "status <s>" and "objective <v>" where v = -max <F0,Y> (the minimisation
value written by dpbc, without its objective constant).
"""
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    tokens = []
    with open(path) as f:
        for line in f:
            if line.startswith('"') or line.startswith("*"):
                continue
            for ch in ",{}()":
                line = line.replace(ch, " ")
            tokens.extend(line.split())
    pos = 0
    m = int(tokens[pos]); pos += 1
    nb = int(tokens[pos]); pos += 1
    sizes = [int(t) for t in tokens[pos:pos + nb]]; pos += nb
    c = [float(t) for t in tokens[pos:pos + m]]; pos += m
    entries = []
    while pos + 5 <= len(tokens):
        mat, blk, i, j = (int(t) for t in tokens[pos:pos + 4])
        entries.append((mat, blk - 1, i - 1, j - 1, float(tokens[pos + 4])))
        pos += 5
    return m, sizes, c, entries


def main():
    m, sizes, c, entries = read_sdpa(sys.argv[1])
    Y = []
    cons = []
    for s in sizes:
        if s > 0:
            v = cp.Variable((s, s), symmetric=True)
            cons.append(v >> 0)
        else:
            v = cp.Variable(-s)
            cons.append(v >= 0)
        Y.append(v)
    rows = [0] * (m + 1)
    for mat, b, i, j, val in entries:
        if sizes[b] > 0:
            term = val * Y[b][i, j] if i == j else 2 * val * Y[b][i, j]
        else:
            term = val * Y[b][i]
        rows[mat] = rows[mat] + term
    for r in range(1, m + 1):
        cons.append(rows[r] == c[r - 1])
    prob = cp.Problem(cp.Maximize(rows[0]), cons)
    solver = sys.argv[2] if len(sys.argv) > 2 else "CLARABEL"
    prob.solve(solver=solver)
    print("status", prob.status)
    if prob.value is not None and np.isfinite(prob.value):
        print("objective %.12g" % (-prob.value))


if __name__ == "__main__":
    main()
