"""Intersections of random closed sets given by trit codes.

The intersection of the trees coded by several trit codes is encoded level
by level as a quad code (3 marks a common node with no common child).  The
rest of the module is the parameter algebra around it: the symbol law of a
pairwise or n-fold intersection, the induced Bernoulli parameters, the
polynomials ``f_n(p) = 1 - (1-p)^n``, the emptiness thresholds
``1 - 2^(-1/n)`` and the degree of intersectability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError
from .measures import ABS_TOL, BernoulliPair, OffspringLaw, RandomStream, trit_symbols
from .tree_codec import PrefixTree, QuadCode, TritCode, decode_trit, encode_quad, expand_level

__all__ = [
    "IntersectionParams",
    "DegreeReport",
    "intersect_codes",
    "intersect_many",
    "intersection_depth",
    "induced_pair_params",
    "pair_symbol_law",
    "nfold_symbol_law",
    "f_n",
    "f_n_inverse",
    "pair_nonempty_possible",
    "pair_emptiness_prob",
    "nfold_emptiness_prob",
    "threshold",
    "degree_of_intersectability",
    "polynomial_recurrence_check",
]


@dataclass(frozen=True)
class IntersectionParams:
    """Parameters governing the intersection of two random closed sets.

    ``survival`` is kept as a plain ``(beta0, beta1)`` pair because the
    degenerate inputs (a full tree on either side) put it on the boundary
    excluded by :class:`~rcsets.measures.SurvivalPair`.
    """

    inputs: tuple
    induced: BernoulliPair
    survival: tuple


@dataclass(frozen=True)
class DegreeReport:
    p: float
    degree: int
    interval: tuple  # (low, high); low is included
    high_included: bool = False

    def __contains__(self, x):
        lo, hi = self.interval
        return lo <= x < hi or (self.high_included and x == hi)


def _as_trit(code) -> TritCode:
    return code if isinstance(code, TritCode) else TritCode(code)


def intersect_many(codes: Sequence[TritCode], depth: int, pad_to: int | None = None) -> QuadCode:
    """Quad code of the common part of the trees coded by ``codes``."""
    if len(codes) < 2:
        raise ValueError("need at least two codes")
    node_sets = [decode_trit(_as_trit(c), depth).tree.nodes for c in codes]
    common = reduce(frozenset.intersection, node_sets)
    return encode_quad(PrefixTree(depth, common), pad_to=pad_to)


def intersect_codes(x: TritCode, y: TritCode, depth: int, pad_to: int | None = None) -> QuadCode:
    """Quad code of T_x ∩ T_y through ``depth`` levels.

    Once the intersection dies the code ends; ``pad_to`` fills it with 3s.
    """
    return intersect_many([x, y], depth, pad_to=pad_to)


def intersection_depth(
    params: Sequence[BernoulliPair], depth: int, streams: Sequence[RandomStream]
) -> int:
    """Deepest level (at most ``depth``) reached by the intersection of random trees.

    Tree ``i`` is decoded from the trit code of ``streams[i]`` under
    ``params[i]``, one level at a time, exactly as :func:`decode_trit` would
    read a pre-sampled code.  Decoding stops as soon as the intersection is
    empty, so codes are only read as far as they matter.
    """
    if len(params) != len(streams):
        raise ValueError("one stream per tree is required")
    if depth > 62:
        raise ValueError("depth above 62 does not fit integer node labels")
    rngs = [s.generator() for s in streams]
    levels = [np.zeros(1, dtype=np.int64) for _ in params]
    for k in range(depth):
        for i, (prm, rng) in enumerate(zip(params, rngs)):
            syms = trit_symbols(prm, rng.random(levels[i].size))
            levels[i] = expand_level(levels[i], syms)
        common = reduce(lambda a, b: np.intersect1d(a, b, assume_unique=True), levels)
        if common.size == 0:
            return k
    return depth


def pair_symbol_law(a: BernoulliPair, b: BernoulliPair) -> OffspringLaw:
    """Law of the quad symbol at a common node of two independent trees."""
    p, q, r, s = a.p, a.q, b.p, b.q
    return OffspringLaw(
        p * r + p * (1 - r - s) + r * (1 - p - q),
        q * s + q * (1 - r - s) + s * (1 - p - q),
        (1 - p - q) * (1 - r - s),
        p * s + q * r,
    )


def induced_pair_params(a: BernoulliPair, b: BernoulliPair) -> IntersectionParams:
    """Parameters of the closed set obtained by intersecting ``a``- and ``b``-random sets."""
    p, q, r, s = a.p, a.q, b.p, b.q
    beta0 = (1 - s) * (1 - q)
    beta1 = (1 - r) * (1 - p)
    induced_p, induced_q = p + r - p * r, q + s - q * s
    if induced_p + induced_q > 1 + ABS_TOL:
        raise DomainError(
            "p+q+r+s >= 1+pr+qs: the intersection is empty, there is no induced measure"
        )
    return IntersectionParams((a, b), BernoulliPair(induced_p, induced_q), (beta0, beta1))


def _check_p(p: float, hi: float = 0.5):
    if not 0 <= p <= hi:
        raise DomainError(f"p={p} outside [0, {hi}]")


def _check_n(n: int):
    if int(n) != n or n < 1:
        raise DomainError(f"n={n} must be a positive integer")


def nfold_symbol_law(p: float, n: int) -> OffspringLaw:
    """Law of the quad symbol at a common node of ``n`` independent μ_p trees.

    A child is common to all trees with probability ``(1-p)^n``; both
    children are with probability ``(1-2p)^n``.
    """
    _check_p(p)
    _check_n(n)
    one = (1 - p) ** n
    both = (1 - 2 * p) ** n
    return OffspringLaw(one - both, one - both, both, 1 - 2 * one + both)


def f_n(p: float, n: int) -> float:
    _check_p(p)
    _check_n(n)
    return 1 - (1 - p) ** n


def f_n_inverse(p: float, n: int) -> float:
    _check_n(n)
    _check_p(p, 1 - 0.5**n)
    return 1 - (1 - p) ** (1 / n)


def threshold(n: int) -> float:
    """Smallest p at which n mutually random μ_p closed sets never meet."""
    _check_n(n)
    return -math.expm1(-math.log(2) / n)


def _check_pair(p, q, r, s):
    BernoulliPair(p, q)
    BernoulliPair(r, s)


def pair_nonempty_possible(p: float, q: float, r: float, s: float) -> bool:
    _check_pair(p, q, r, s)
    return p + q + r + s < 1 + p * r + q * s


def pair_emptiness_prob(p: float, q: float, r: float, s: float) -> float:
    """Probability that two relatively random closed sets are disjoint."""
    if not pair_nonempty_possible(p, q, r, s):
        raise DomainError("p+q+r+s >= 1+pr+qs: the intersection is always empty")
    if p + q >= 1 or r + s >= 1:
        raise DomainError("need p+q < 1 and r+s < 1")
    return (p * s + q * r) / ((1 - p - q) * (1 - r - s))


def nfold_emptiness_prob(p: float, n: int) -> float:
    """Probability that n mutually random μ_p closed sets have empty intersection."""
    _check_n(n)
    if not 0 <= p < threshold(n):
        raise DomainError(f"p={p} is not below threshold({n})={threshold(n)}")
    return 1 - (1 - 2 * f_n(p, n)) / (1 - 2 * p) ** n


def degree_of_intersectability(p: float) -> DegreeReport:
    """The largest n for which n mutually random μ_p closed sets can meet."""
    if not 0 < p <= 0.5:
        raise DomainError(f"p={p} outside (0, 1/2]")
    gamma = -math.log2(1 - p)
    n = max(1, math.ceil(1 / gamma) - 1)
    # the threshold comparisons are authoritative near interval ends
    while n > 1 and threshold(n) <= p:
        n -= 1
    while threshold(n + 1) > p:
        n += 1
    if n == 1:
        return DegreeReport(p, 1, (threshold(2), 0.5), high_included=True)
    return DegreeReport(p, n, (threshold(n + 1), threshold(n)))


def polynomial_recurrence_check(p: float, n: int, tol: float = ABS_TOL) -> bool:
    """Does f_{n+1}(p) equal p + f_n(p) - p f_n(p)?"""
    fn = f_n(p, n)
    return abs(f_n(p, n + 1) - (p + fn - p * fn)) <= tol
