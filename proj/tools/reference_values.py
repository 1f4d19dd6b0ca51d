#!/usr/bin/env python3
# Copyright 2026 The motkit Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference values for the frozen test constants.

Every instance is solved as an explicit dense linear (or quadratic) program
with scipy's HiGHS backend or cvxpy, sharing no code with the C++ library.
Run from the repository root: python3 tools/reference_values.py
"""

import itertools
import json
import math

import numpy as np
from scipy.optimize import linprog


def mot_lp(cost, marginals):
    """min <C, P> over the transportation polytope, C given as an n^k array."""
    k = cost.ndim
    n = cost.shape[0]
    tuples = list(itertools.product(range(n), repeat=k))
    rows, rhs = [], []
    for i in range(k):
        for a in range(n):
            rows.append([1.0 if t[i] == a else 0.0 for t in tuples])
            rhs.append(marginals[i][a])
    res = linprog(
        [cost[t] for t in tuples],
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=(0, None),
        method="highs",
    )
    assert res.status == 0, res.message
    return res.fun


def load(path):
    with open(path) as f:
        return json.load(f)


def dense_from_graphical(doc):
    n, k = doc["n"], doc["k"]
    cost = np.zeros((n,) * k)
    for t in itertools.product(range(n), repeat=k):
        total = 0.0
        for fac in doc["graphical"]["factors"]:
            idx = 0
            for v in fac["scope"]:
                idx = idx * n + t[v]
            total += fac["table"][idx]
        cost[t] = total
    return cost


def dense_from_lowrank(n, k, lowrank):
    cost = np.zeros((n,) * k)
    for t in itertools.product(range(n), repeat=k):
        cost[t] = sum(
            math.prod(u[i][t[i]] for i in range(k)) for u in lowrank["factors"]
        )
    for e in lowrank.get("sparse", []):
        cost[tuple(e["index"])] += e["value"]
    return cost


def risk_value(doc):
    r, k = doc["r"], doc["k"]
    returns, probs = doc["returns"], doc["probs"]
    n = max(len(returns[l][i]) for l in range(r) for i in range(k))
    coords = r * k
    cost = np.zeros((n,) * coords)
    marg = []
    for l in range(r):
        for i in range(k):
            p = list(probs[l][i]) + [0.0] * (n - len(probs[l][i]))
            marg.append(p)
    for t in itertools.product(range(n), repeat=coords):
        total = 0.0
        for l in range(r):
            prod = 1.0
            for i in range(k):
                vals = returns[l][i]
                j = t[l * k + i]
                prod *= vals[j] if j < len(vals) else 1.0
            total += prod
        cost[t] = total
    return mot_lp(cost, marg)


def euler_value(n, k, sigma):
    x = [j / (n - 1) for j in range(n)]
    if sigma == "reverse":
        s = [1.0 - v for v in x]
    elif sigma == "shift-half":
        s = [math.fmod(v + 0.5, 1.0) for v in x]
    elif sigma == "double-cover":
        s = [min(2 * v, 2 - 2 * v) for v in x]
    else:
        s = list(x)
    cost = np.zeros((n,) * k)
    for t in itertools.product(range(n), repeat=k):
        c = sum((x[t[i + 1]] - x[t[i]]) ** 2 for i in range(k - 1))
        c += (s[t[0]] - x[t[k - 1]]) ** 2
        cost[t] = c
    return mot_lp(cost, [[1.0 / n] * n for _ in range(k)])


def connected(vertices, edges, keep):
    parent = list(range(vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (u, v), on in zip(edges, keep):
        if on:
            parent[find(u)] = find(v)
    return len({find(a) for a in range(vertices)}) == 1


def reliability(vertices, edges, q):
    k = len(edges)
    cost = np.zeros((2,) * k)
    for t in itertools.product(range(2), repeat=k):
        cost[t] = 1.0 if connected(vertices, edges, t) else 0.0
    marg = [[1 - qe, qe] for qe in q]
    rho_min = mot_lp(cost, marg)
    rho_max = -mot_lp(-cost, marg)
    return rho_min, rho_max


def projection_value(doc):
    import cvxpy as cp

    n, k = doc["n"], doc["k"]
    q = dense_from_lowrank(n, k, doc["lowrank"]).reshape(-1)
    tuples = list(itertools.product(range(n), repeat=k))
    p = cp.Variable(len(tuples), nonneg=True)
    cons = []
    for i in range(k):
        for a in range(n):
            sel = [idx for idx, t in enumerate(tuples) if t[i] == a]
            cons.append(cp.sum(p[sel]) == doc["marginals"][i][a])
    prob = cp.Problem(cp.Minimize(cp.sum_squares(p - q)), cons)
    prob.solve()
    return prob.value


def main():
    out = {}
    d = load("tests/data/dense_2x2.json")
    out["dense_2x2"] = mot_lp(
        np.array(d["dense"]["values"]).reshape((d["n"],) * d["k"]), d["marginals"]
    )
    g = load("tests/data/graphical_chain.json")
    out["graphical_chain"] = mot_lp(dense_from_graphical(g), g["marginals"])
    lr = load("tests/data/lowrank_small.json")
    out["lowrank_small"] = mot_lp(
        dense_from_lowrank(lr["n"], lr["k"], lr["lowrank"]), lr["marginals"]
    )
    out["risk_small"] = risk_value(load("tests/data/risk_small.json"))
    for sigma in ["reverse", "shift-half", "double-cover"]:
        out[f"euler_5_3_{sigma}"] = euler_value(5, 3, sigma)
    out["euler_4_4_reverse"] = euler_value(4, 4, "reverse")
    tri = reliability(3, [(0, 1), (1, 2), (0, 2)], [0.5, 0.4, 0.3])
    out["triangle_rho_min"], out["triangle_rho_max"] = tri
    k4 = reliability(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], [0.5, 0.4, 0.6, 0.3, 0.5])
    out["diamond_rho_min"], out["diamond_rho_max"] = k4
    out["projection_small"] = projection_value(load("tests/data/projection_small.json"))
    for key, val in out.items():
        print(f"{key} = {val:.12f}")


if __name__ == "__main__":
    main()
