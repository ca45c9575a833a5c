"""Effective-dimension bounds for members of random closed sets, and a
compression-rate estimator used as a computable stand-in for dimension.

Logarithms are base 2 throughout, so that ``dim_lower_bound(threshold(n))``
is exactly ``1/n``.

The estimator parses a bit string into LZ78 phrases and charges each phrase
``ceil(log2 j) + 1`` bits (a pointer to one of the ``j`` earlier phrases,
counting the empty one, plus the new bit).  The resulting rate is an upper
bound flavoured proxy for the Kolmogorov complexity rate; for stationary
ergodic sources it converges to the entropy rate, with a redundancy that
decays like ``log log n / log n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InputTooShort
from .intersection import degree_of_intersectability
from .measures import RandomStream

__all__ = [
    "DimBoundReport",
    "DimEstimate",
    "DegreeFloor",
    "MIN_ESTIMATE_LENGTH",
    "dim_lower_bound",
    "gamma_to_p",
    "member_dim_bound",
    "min_degree_for_dim",
    "dim_bounds",
    "sample_member_path",
    "lz78_phrase_count",
    "lz78_code_length",
    "estimate_dim",
    "binary_entropy",
]

MIN_ESTIMATE_LENGTH = 1024


@dataclass(frozen=True)
class DimBoundReport:
    p: float
    gamma: float
    degree: int
    member_bound: float


@dataclass(frozen=True)
class DimEstimate:
    sequence_length: int
    code_length: int
    rate: float
    phrases: int
    overhead: float  # worst-case rate minus 1 at this length


class DegreeFloor(NamedTuple):
    degree: int
    exceptional: bool  # s is 1/n: only degree >= floor(1/s) - 1 is excluded


def dim_lower_bound(p: float) -> float:
    """-log2(1 - p): least dimension of a member of a μ_p-random closed set."""
    if not 0 <= p <= 0.5:
        raise DomainError(f"p={p} outside [0, 1/2]")
    return -math.log2(1 - p)


def gamma_to_p(gamma: float) -> float:
    if not 0 <= gamma <= 1:
        raise DomainError(f"gamma={gamma} outside [0, 1]")
    return -math.expm1(-gamma * math.log(2))


def member_dim_bound(degree: int) -> float:
    if int(degree) != degree or degree < 1:
        raise DomainError("degree must be a positive integer")
    return 1 / (degree + 1)


def min_degree_for_dim(s: float) -> DegreeFloor:
    """floor(1/s): the smallest degree of a family guaranteed to contain x.

    ``exceptional`` is set when ``s`` is of the form ``1/n``; then families
    of degree ``floor(1/s) - 1`` may still contain x.
    """
    if not 0 < s <= 1:
        raise DomainError(f"s={s} outside (0, 1]")
    inv = 1 / s
    nearest = round(inv)
    if abs(inv - nearest) <= 1e-9 * inv:
        return DegreeFloor(int(nearest), True)
    return DegreeFloor(math.floor(inv), False)


def dim_bounds(p: float) -> DimBoundReport:
    degree = degree_of_intersectability(p).degree
    return DimBoundReport(p, dim_lower_bound(p), degree, member_dim_bound(degree))


def sample_member_path(
    p: float, length: int, policy: str = "uniform", stream: RandomStream | None = None
) -> str:
    """Walk a path through a pruned μ_p tree, drawing each node's branching as needed.

    Each node keeps both children with probability 1-2p and only the left
    (or only the right) with probability p.  ``leftmost`` goes left whenever
    it can; ``uniform`` tosses a fair coin at two-way branchings.
    """
    if not 0 <= p < 0.5:
        raise DomainError(f"p={p} outside [0, 1/2)")
    if length < 1:
        raise DomainError("length must be at least 1")
    if policy not in ("uniform", "leftmost"):
        raise DomainError(f"unknown policy {policy!r}")
    rng = (stream or RandomStream(0)).generator()
    u = rng.random(length)
    right_only = (u >= p) & (u < 2 * p)
    if policy == "leftmost":
        bits = right_only
    else:
        both = u >= 2 * p
        bits = right_only | (both & (rng.random(length) < 0.5))
    return (bits.astype(np.uint8) + ord("0")).tobytes().decode("ascii")


def _as_bits(x) -> str:
    if isinstance(x, str):
        if x.strip("01"):
            raise ValueError("input must be a string over 0/1")
        return x
    arr = np.asarray(x, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("input must consist of 0/1 values")
    return (arr + ord("0")).tobytes().decode("ascii")


def lz78_phrase_count(x) -> int:
    """Number of phrases in the incremental parse (a trailing partial phrase counts)."""
    bits = _as_bits(x)
    trie = {}
    node = 0
    fresh = 1
    count = 0
    for b in bits:
        key = (node, b)
        child = trie.get(key)
        if child is None:
            trie[key] = fresh
            fresh += 1
            count += 1
            node = 0
        else:
            node = child
    if node:
        count += 1
    return count


def lz78_code_length(phrases: int) -> int:
    """Total bits: phrase j costs ceil(log2 j) + 1."""
    return sum((j - 1).bit_length() + 1 for j in range(1, phrases + 1))


def _max_phrases(n: int) -> int:
    # the most distinct non-empty phrases fitting into n bits, plus a partial one
    count, used, k = 0, 0, 1
    while True:
        room = (n - used) // k
        if room < 2**k:
            return count + room + 1
        count += 2**k
        used += k * 2**k
        k += 1


def estimate_dim(x) -> DimEstimate:
    """LZ78 compression rate of a bit string, with its worst-case overhead."""
    bits = _as_bits(x)
    n = len(bits)
    if n < MIN_ESTIMATE_LENGTH:
        raise InputTooShort(f"need at least {MIN_ESTIMATE_LENGTH} bits, got {n}")
    c = lz78_phrase_count(bits)
    code = lz78_code_length(c)
    worst = lz78_code_length(_max_phrases(n)) / n
    return DimEstimate(n, code, code / n, c, max(worst - 1.0, 0.0))


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)
