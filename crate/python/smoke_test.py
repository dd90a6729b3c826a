"""Smoke test for the supra_fixpoint extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
Then run:                 python python/smoke_test.py
"""

import math
import sys

import supra_fixpoint as sf


def check(name, cond, detail=""):
    print(f"{'ok  ' if cond else 'FAIL'} {name}{': ' + str(detail) if detail else ''}")
    return cond


def main():
    results = []

    quad = sf.Construction("quadratic", a=1, scale=1)
    results.append(check("declared params", quad.declared == (1.0, 2.0), quad.declared))
    results.append(check("non-metric triple", quad.distance(0, 1) + quad.distance(1, 2) == 4 < quad.distance(0, 2) == 6))
    report = quad.check_axioms(samples=20_000, seed=7)
    results.append(check("axioms hold", not report["violations"], report["worst_defect"]))
    bad = sf.Construction("exp_square", beta=1).check_axioms(samples=20_000)
    results.append(check("exp_square fails (1, 1)", len(bad["violations"]) > 0, len(bad["violations"])))

    lp = sf.Construction("lp", p=0.5, dim=3)
    results.append(check("vector points", lp.distance([0, 0, 0], [1, 1, 1]) == 9.0))

    psi = sf.ComparisonFunction("linear:0.5")
    member = psi.check(b=1.5)
    results.append(check("linear:0.5 in M_1.5", member["m"]["in_m"] and member["m_b"]["in_mb"]))
    rational = sf.ComparisonFunction("rational").check(b=2)
    results.append(check("rational in M, not M_2", rational["m"]["in_m"] and rational["m_b"]["in_mb"] is False))
    results.append(check("closed form", math.isclose(sf.ComparisonFunction("rational").iterate(1000, 1.0), 1 / 1001)))

    problem = sf.Problem(quad, "x/2+1", psi, 10.0)
    sol = problem.solve()
    results.append(check("fixed point", sol["converged"] and abs(sol["x_star"] - 2) < 1e-10, sol["x_star"]))
    unique = problem.uniqueness([-100.0, 0.0, 100.0])
    results.append(check("unique", unique["verdict"] == "unique"))
    cert = problem.certify(10.0)
    results.append(check("invariant ball", not cert["escapes"] and cert["certificate"]["q"] == 3, cert["certificate"]))

    callable_problem = sf.Problem(quad, lambda x: x / 2 + 1, lambda t: t / 2, -4.0)
    results.append(check("python callables", abs(callable_problem.solve()["x_star"] - 2) < 1e-10))

    results.append(check("c_q", (sf.c_q(1, 1, 3), sf.c_q(2, 1, 3), sf.c_q(1, 0, 2)) == (3.0, 12.0, 2.0)))
    results.append(check("q threshold", sf.q_threshold("linear:0.5", 2, 0, 1.0)["q"] == 3))
    results.append(check("series bound", math.isclose(sf.series_bound("linear:0.5", 1, 0, 1.0, 0), 2.0)))
    try:
        sf.series_bound("linear:0.5", 2, 0, 1.0, 0)
        results.append(check("series divergence", False))
    except RuntimeError as e:
        results.append(check("series divergence", "diverg" in str(e).lower(), e))
    try:
        sf.Problem(quad, "x//2", psi, 0.0)
        results.append(check("parse error", False))
    except ValueError as e:
        results.append(check("parse error", True, e))

    code, demo = sf.run(["demo-discrete", "--N", "60", "--samples", "5000"])
    results.append(check("cli demo-discrete", code == 0 and demo["status"] == "ok"))

    failed = results.count(False)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
