"""
The intersection is again Bernoulli
-----------------------------------

Pruned n-fold intersections of mu_p trees should be indistinguishable from
trees drawn directly with parameter f_n(p).  A chi-square test compares the
two samples; intersecting at a shifted parameter should be rejected.
"""

from rcsets import converse_distribution_test

rep = converse_distribution_test(0.2, 2, horizon=30, readable=8, trials=50_000, seed=5)
print(rep.verdict, rep.details["symbol_chi2"], rep.details["cylinder_chi2"], sep="\n")

control = converse_distribution_test(
    0.2, 2, horizon=50, readable=8, trials=50_000, seed=5, intersect_p=0.23
)
print("shifted control:", control.verdict)
