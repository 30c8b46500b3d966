"""The heavy-tailed family that does NOT have an invariant power mean.

For the rescaled 3-degrees-of-freedom family the power-mean expectation is a
polynomial in p of degree n - 1, evaluated here through the cancellation-free
product identity p**k Gamma(k - 1/p) / Gamma(-1/p) = prod_{j<k} (j p - 1).
At n = 2 it is an affine function of p; the slope magnitude is
(n-1)! / (n**n |gamma + alpha|**(n-1)), and Monte Carlo tracks the line.
"""

import numpy as np

from fracmean import MCConfig, PowerMeanSpec, Route, ScaledT3, power_mean_expectation

model = ScaledT3(0.0, 1.0)
alpha = 1j
mc = MCConfig(samples=150_000, seed=99)

print("n = 2, gamma + alpha = 2i: closed values and Monte Carlo")
ps = np.round(np.arange(-0.9, -0.049, 0.1), 10)
vals = []
for p in ps:
    closed = power_mean_expectation(model, PowerMeanSpec(p=float(p), n=2, alpha=alpha), Route.CLOSED)
    sampled = power_mean_expectation(
        model, PowerMeanSpec(p=float(p), n=2, alpha=alpha), Route.MONTE_CARLO, mc=mc
    )
    vals.append(closed.value)
    pull = abs(sampled.value - closed.value) / sampled.uncertainty
    print(f"  p={p:5.2f}: closed {closed.value:.10f}   mc within {pull:4.1f} stderr")

coeffs = np.polyfit(ps, np.array(vals), 1)
residual = np.max(np.abs(np.polyval(coeffs, ps) - np.array(vals)))
print()
print(f"linear fit: slope {coeffs[0]:.10f}, intercept {coeffs[1]:.10f}")
print(f"fit residual {residual:.2e}  (affine: degree n-1 = 1)")
print(f"|slope| = {abs(coeffs[0]):.10f}  vs (n-1)!/(n^n |gamma+alpha|^(n-1)) = {1/8:.10f}")
print()
print("larger n raises the polynomial degree:")
for n in (3, 4):
    sample_ps = np.round(np.arange(-0.9, -0.049, 0.05), 10)
    values = np.array(
        [
            power_mean_expectation(model, PowerMeanSpec(p=float(p), n=n, alpha=alpha), Route.CLOSED).value
            for p in sample_ps
        ]
    )
    for deg in range(1, n):
        fit = np.polyfit(sample_ps, values, deg)
        res = np.max(np.abs(np.polyval(fit, sample_ps) - values))
        print(f"  n={n}: residual of a degree-{deg} fit = {res:.2e}")
