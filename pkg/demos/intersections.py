"""
When do random closed sets meet?
--------------------------------

n independent mu_p random closed sets intersect with positive probability
only below threshold(n) = 1 - 2^(-1/n).  Below it, the emptiness
probability has a closed form, which we check against simulation.
"""

from rcsets import (
    degree_of_intersectability,
    estimate_nfold_emptiness,
    f_n,
    nfold_emptiness_prob,
    threshold,
)

for n in range(1, 6):
    print(f"threshold({n}) = {threshold(n):.6f}")

p, n = 0.15, 3
print("f_n:", f_n(p, n))
print("emptiness (closed form):", nfold_emptiness_prob(p, n))
rec = estimate_nfold_emptiness(p, n, depth=60, trials=100_000, seed=42)
print(f"emptiness (simulated, depth 60): {rec.value:.4f} vs exact {rec.exact:.4f}")

for p in (0.4, 0.25, 0.1, 0.01):
    rep = degree_of_intersectability(p)
    print(f"p={p}: degree {rep.degree}, interval {rep.interval}")
