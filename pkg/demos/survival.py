"""
How often does a Galton-Watson tree survive?
--------------------------------------------

Each child survives with probability 0.8.  The exact survival curve r_d
is compared to the limit 0.9375 and to a seeded simulation.
"""

from rcsets import SurvivalPair, estimate_survival, gw_offspring, survival_limit, survival_recurrence

law = gw_offspring(SurvivalPair(0.8, 0.8))
curve = survival_recurrence(law, 30)
print("limit:", survival_limit(law))
for d in (1, 2, 5, 10, 25):
    print(f"r_{d} = {curve[d]:.10f}")

rec = estimate_survival(law, depth=25, trials=100_000, seed=1)
print(f"simulated {rec.value:.4f}  99% CI [{rec.ci_low:.4f}, {rec.ci_high:.4f}]  exact {rec.exact:.4f}")
