"""
Compressing member paths
------------------------

A path through a pruned mu_p tree has dimension at least -log2(1 - p).
The LZ78 rate gives a crude upper estimate from a finite prefix.
"""

from rcsets import RandomStream, binary_entropy, dim_bounds, estimate_dim, sample_member_path

p = 0.3
print(dim_bounds(p))

path = sample_member_path(p, 100_000, "leftmost", RandomStream(7))
est = estimate_dim(path)
print(f"ones: {path.count('1') / len(path):.4f}")
print(f"LZ78 rate {est.rate:.4f}, entropy {binary_entropy(p):.4f}, overhead bound {est.overhead:.4f}")
