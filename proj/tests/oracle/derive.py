"""Independent reference values for the unit tests.

Run from the repo root:  python3 tests/oracle/derive.py > tests/oracle_values.hpp
"""
import itertools
import math

import numpy as np
from scipy.optimize import minimize, root


def soc_project_bruteforce(y):
    # minimise ||z - y|| over z0 >= ||zhat|| with a generic NLP solver
    y = np.asarray(y, float)
    cons = {"type": "ineq", "fun": lambda z: z[0] - math.sqrt(z[1:] @ z[1:] + 1e-300)}
    best = None
    for z0 in (np.eye(len(y))[0], y.copy() + 1.0, np.abs(y) + 1.0):
        r = minimize(lambda z: 0.5 * (z - y) @ (z - y), z0, constraints=[cons], method="SLSQP",
                     options={"ftol": 1e-15, "maxiter": 500})
        if best is None or r.fun < best.fun:
            best = r
    # polish: 1-D reduced problem along the ray z = (s, s*w) with w the unit of yhat
    yh = y[1:]
    w = yh / np.linalg.norm(yh)
    grid = np.linspace(0.0, 10.0, 2000001)
    d = (grid - y[0]) ** 2 + np.sum((grid[:, None] * w - yh) ** 2, axis=1)
    s = grid[np.argmin(d)]
    ray = np.concatenate([[s], s * w])
    return ray if 0.5 * (ray - y) @ (ray - y) <= best.fun + 1e-12 else best.x


def spectral(y):
    y = np.asarray(y, float)
    n = np.linalg.norm(y[1:])
    return y[0] - n, y[0] + n, y[1:] / n


def caratheodory_bruteforce(vs, alpha):
    # smallest-cardinality subset whose span holds the sum with same-sign coefficients
    vs = [np.asarray(v, float) for v in vs]
    target = sum(a * v for a, v in zip(alpha, vs))
    sols = []
    for r in range(1, len(vs) + 1):
        for J in itertools.combinations(range(len(vs)), r):
            A = np.column_stack([vs[j] for j in J])
            if np.linalg.matrix_rank(A) < r:
                continue
            c, *_ = np.linalg.lstsq(A, target, rcond=None)
            if np.linalg.norm(A @ c - target) < 1e-12 and all(
                    c[i] * alpha[J[i]] > 0 for i in range(r)):
                sols.append((J, c))
        if sols:
            return sols
    return sols


def simplex_grid_min(vs, step=1.0 / 50):
    vs = [np.asarray(v, float) for v in vs]
    k = len(vs)
    N = int(round(1 / step))
    best = math.inf
    for comp in itertools.product(range(N + 1), repeat=k - 1):
        if sum(comp) > N:
            continue
        a = list(comp) + [N - sum(comp)]
        best = min(best, np.linalg.norm(sum(ai / N * v for ai, v in zip(a, vs))))
    return best


def halfline_kkt():
    # min x s.t. (x, 1) in L2 <=> x >= 1; multiplier of the block from stationarity
    r = minimize(lambda x: x[0], [5.0], constraints=[{"type": "ineq", "fun": lambda x: x[0] - 1.0}],
                 method="SLSQP", options={"ftol": 1e-14})
    x = r.x[0]
    # mu on the ray of the reflected point (1, -1): Dg^T mu = mu0 = grad f = 1
    mu = np.array([1.0, -1.0])
    return x, mu


def rosenbrock_min():
    f = lambda z: (1 - z[0]) ** 2 + 100 * (z[1] - z[0] ** 2) ** 2
    r = minimize(f, [-1.2, 1.0], method="BFGS", options={"gtol": 1e-10})
    g = lambda z: [-2 * (1 - z[0]) - 400 * z[0] * (z[1] - z[0] ** 2), 200 * (z[1] - z[0] ** 2)]
    return root(g, r.x, tol=1e-15).x


def phi_alpha_halfline(x, alpha):
    lam1 = x - 1.0
    return x + alpha * max(0.0, -lam1)


def armijo_first_t(x, d, dMd, sigma, alpha):
    t = 1.0
    while phi_alpha_halfline(x, alpha) - phi_alpha_halfline(x + t * d, alpha) < sigma * t * dMd:
        t *= 0.5
    return t


def ex33_scalars():
    s5 = math.sqrt(5.0)
    return (4 * s5 - 5) / (2 * s5), (4 * s5 + 5) / (2 * s5)


def emit(name, v):
    if isinstance(v, (list, tuple, np.ndarray)):
        body = ", ".join(f"{float(x):.17g}" for x in v)
        print(f"inline const std::vector<double> {name} = {{{body}}};")
    else:
        print(f"inline constexpr double {name} = {float(v):.17g};")


print("#pragma once")
print("// generated by tests/oracle/derive.py")
print("#include <vector>")
print("namespace oracle {")
emit("kProj_0_3_4", soc_project_bruteforce([0, 3, 4]))
l1, l2, w = spectral([0, 3, 4])
emit("kSpec_0_3_4_l1", l1)
emit("kSpec_0_3_4_l2", l2)
emit("kSpec_0_3_4_w", w)
sols = caratheodory_bruteforce([[1, 0], [0, 1], [1, 1]], [1, 1, 1])
emit("kCara3_min_cardinality", len(sols[0][0]))
emit("kCara3_sum", sum(a * np.asarray(v, float) for a, v in zip([1, 1, 1], [[1, 0], [0, 1], [1, 1]])))
sols2 = caratheodory_bruteforce([[1, 0], [2, 0]], [1, 1])
emit("kCara2_alpha_J0", sols2[0][1])
emit("kCara2_alpha_J1", sols2[1][1])
emit("kPldGrid_opposite", simplex_grid_min([[1, 0], [-1, 0]]))
emit("kPldGrid_basis", simplex_grid_min([[1, 0], [0, 1]]))
a, b = ex33_scalars()
emit("kEx33_scalars", [a, b])
x, mu = halfline_kkt()
emit("kHalflineX", x)
emit("kHalflineMu", mu)
emit("kRosenbrockMin", rosenbrock_min())
emit("kPhiHalfline_at0_alpha2", phi_alpha_halfline(0.0, 2.0))
emit("kArmijoHalfline_t", armijo_first_t(5.0, -4.0, 16.0, 0.1, 2.0))
# ex41 at 0: Dg = (-1, 1, 1); D family (1, -w) and (1, w) with w = (1, 1)/sqrt(2)
Dg = np.array([-1.0, 1.0, 1.0])
w = np.array([1.0, 1.0]) / math.sqrt(2.0)
emit("kEx41_family", [Dg @ np.concatenate([[1.0], -w]), Dg @ np.concatenate([[1.0], w])])
l1, _, _ = spectral([5, 3, 4])
emit("kLambda1_5_3_4", l1)
print("}  // namespace oracle")
