"""Power means whose expectation ignores both the sample size and the power.

For Cauchy draws shifted into the upper half plane, and for the hyperbolic
upper-half-plane family, E[((1/n) sum (Z_j)**p)**(1/p)] collapses to a single
point: gamma + alpha for the Cauchy family, -b/a + i D/a for the
upper-half-plane family.  Monte Carlo, fractional-calculus quadrature, and
the closed forms all land on the same value; pushing |p| beyond 1 breaks the
invariance, which is the reason the exploratory scan exists.
"""

import numpy as np

from fracmean import Cauchy, MCConfig, Poincare, PowerMeanSpec, Route, power_mean_expectation
from fracmean.moments import continuity_scan

cauchy = Cauchy(0.0, 1.0)
poincare = Poincare(1.0, 0.0, 1.0)
mc = MCConfig(samples=200_000, seed=20250808)

print("Cauchy(0,1) + alpha=i, target gamma + alpha = 2i")
print(f"{'p':>6} {'n':>3} {'closed':>22} {'monte carlo':>28}")
for p in (-1.0, -0.5, -0.1):
    for n in (2, 5):
        spec = PowerMeanSpec(p=p, n=n, alpha=1j)
        closed = power_mean_expectation(cauchy, spec, Route.CLOSED)
        sampled = power_mean_expectation(cauchy, spec, Route.MONTE_CARLO, mc=mc)
        print(
            f"{p:6.2f} {n:3d} {closed.value!s:>22} "
            f"{sampled.value.real:12.5f}{sampled.value.imag:+.5f}i  (se {sampled.uncertainty:.4f})"
        )

print()
print("Poincare(1,0,1), target -b/a + i D/a = i  (p = 0 is the geometric mean)")
for p in (-1.0, -0.5, 0.0, 0.5, 1.0):
    spec = PowerMeanSpec(p=p, n=3)
    closed = power_mean_expectation(poincare, spec, Route.CLOSED)
    sampled = power_mean_expectation(poincare, spec, Route.MONTE_CARLO, mc=mc)
    dev = abs(sampled.value - closed.value)
    print(
        f"  p={p:5.2f}: closed {closed.value}, mc dev {dev:.5f} "
        f"({dev / sampled.uncertainty:.2f} stderr)"
    )

print()
print("outside |p| <= 1 the invariance is expected to fail (exploratory scan):")
table = continuity_scan(
    poincare, 0.0, 2, [1.0, 1.25, 1.5, 2.0], Route.MONTE_CARLO,
    mc=MCConfig(samples=200_000, seed=4), exploratory=True,
)
for row in table.rows:
    dev = abs(row.estimate.value - 1j)
    flag = "  <- drift" if dev > 4 * row.estimate.uncertainty else ""
    print(f"  p={row.p:5.2f}: estimate {row.estimate.value:.5f}, |dev from i| = {dev:.4f}{flag}")
