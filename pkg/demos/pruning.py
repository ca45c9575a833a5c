"""
Pruned trees look Bernoulli
---------------------------

Removing the nodes that die before the horizon leaves a tree whose
branching symbols follow the law (b0 + b1 - 1, 1 - b1, 1 - b0).
"""

from rcsets import SurvivalPair, gw_offspring, pruned_branch_probs, pruned_frequency_experiment

betas = SurvivalPair(0.9, 0.7)
law = gw_offspring(betas)
print("predicted (both, left, right):", pruned_branch_probs(betas))

rep = pruned_frequency_experiment(law, horizon=30, readable=10, trials=20_000, seed=3)
for r in rep.records:
    print(f"{r.name:>18}: {r.value:.4f}")
print("extinct trials discarded:", rep.details["extinct"])
