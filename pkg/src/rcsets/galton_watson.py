"""Galton-Watson trees: survival probabilities, sampling and pruning.

Survival to depth ``n`` follows the recurrence

    r_0 = 1,   r_{k+1} = (a0 + a1) r_k + a2 (2 r_k - r_k^2),

whose limit is ``(a2 - a3) / a2`` for supercritical laws.  Pruning keeps the
nodes that have a descendant at a fixed horizon; it is the finite-depth
stand-in for removing every dead end of an infinite tree.  A node kept at
level ``k`` but dead in the infinite tree occurs with probability
``r_{horizon-k} - limit``, which bounds the bias of any statistic read off
the pruned tree.

Pruned laws: in an infinite tree conditioned to survive, a node has both
children surviving with probability ``a2 * l`` (``l`` the survival limit),
which equals ``a2 - a3``; left only with ``a0 + a2 (1 - l) = a0 + a3``; right
only with ``a1 + a3``.  For product laws these reduce to
``(beta0 + beta1 - 1, 1 - beta1, 1 - beta0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateLaw,
    Extinct,
    LevelOutOfRange,
    SubcriticalLaw,
)
from .measures import OffspringLaw, RandomStream, SurvivalPair, quad_symbols
from .tree_codec import (
    PrefixTree,
    QuadCode,
    TritCode,
    decode_quad,
    encode_trit,
    expand_level,
)

__all__ = [
    "DEFAULT_NODE_BUDGET",
    "SurvivalCurve",
    "PrunedTree",
    "survival_recurrence",
    "survival_limit",
    "pruned_branch_probs",
    "pruned_branch_probs_general",
    "sample_gw_tree",
    "prune_to_depth",
    "prune_code",
    "resolution_cap",
    "survives",
    "horizon_bias",
]

DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class SurvivalCurve:
    """``values[k]`` is the probability that the tree reaches level ``k``."""

    values: tuple
    law: OffspringLaw

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    @property
    def last(self) -> float:
        return self.values[-1]


@dataclass(frozen=True)
class PrunedTree:
    tree: PrefixTree
    horizon: int
    readable_depth: int

    @property
    def readable(self) -> PrefixTree:
        """The pruned tree cut at the readable depth."""
        return self.tree.restrict(self.readable_depth)


def survival_recurrence(law: OffspringLaw, n: int) -> SurvivalCurve:
    if n < 0:
        raise ValueError("n must be non-negative")
    single = law.a0 + law.a1
    both = law.a2
    r = 1.0
    values = [r]
    for _ in range(n):
        r = single * r + both * (2 * r - r * r)
        values.append(r)
    return SurvivalCurve(tuple(values), law)


def survival_limit(law: OffspringLaw) -> float:
    """Probability that the tree is infinite."""
    if law.a2 == 0:
        raise DegenerateLaw("a2 = 0: the limit formula is undefined")
    return max(0.0, (law.a2 - law.a3) / law.a2)


def pruned_branch_probs(params: SurvivalPair) -> tuple[float, float, float]:
    """(both, left only, right only) for a pruned infinite product-law tree."""
    b0, b1 = params.beta0, params.beta1
    return (b0 + b1 - 1, 1 - b1, 1 - b0)


def pruned_branch_probs_general(law: OffspringLaw) -> tuple[float, float, float]:
    """(both, left only, right only) for any supercritical offspring law."""
    if law.a2 <= law.a3:
        raise SubcriticalLaw(
            f"a2={law.a2} <= a3={law.a3}: the tree dies out almost surely"
        )
    return (law.a2 - law.a3, law.a0 + law.a3, law.a1 + law.a3)


def horizon_bias(law: OffspringLaw, distance: int) -> float:
    """``r_distance - limit``: chance a horizon-pruned node is really dead."""
    return survival_recurrence(law, distance).last - survival_limit(law)


def sample_gw_tree(
    law: OffspringLaw,
    depth: int,
    stream: RandomStream,
    budget: int = DEFAULT_NODE_BUDGET,
) -> PrefixTree:
    """Grow a Galton-Watson tree breadth first to ``depth`` levels.

    The i-th node visited takes the i-th symbol of the stream's quad code,
    so the result equals ``decode_quad(sample_quad_code(law, N, stream), depth)``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rng = stream.generator()
    level = np.zeros(1, dtype=np.int64)
    levels = [level]
    total = 1
    for k in range(depth):
        if level.size == 0:
            break
        syms = quad_symbols(law, rng.random(level.size))
        level = expand_level(level, syms)
        total += level.size
        if total > budget:
            raise BudgetExceeded(k + 1, total, budget)
        levels.append(level)
    return PrefixTree.from_levels(depth, levels)


def prune_to_depth(tree: PrefixTree, readable_depth: int) -> PrunedTree:
    """Keep the nodes that have a descendant at level ``tree.depth``."""
    if not 0 <= readable_depth <= tree.depth:
        raise LevelOutOfRange(f"readable depth {readable_depth} outside 0..{tree.depth}")
    levels = tree.levels()
    alive = set(levels[tree.depth])
    if not alive:
        raise Extinct(f"no node reaches level {tree.depth}")
    frontier = alive
    for k in range(tree.depth - 1, -1, -1):
        frontier = {n for n in levels[k] if n + "0" in frontier or n + "1" in frontier}
        alive |= frontier
    return PrunedTree(PrefixTree(tree.depth, frozenset(alive)), tree.depth, readable_depth)


def prune_code(code: QuadCode, horizon: int, readable_depth: int) -> TritCode:
    """Trit code of the first ``readable_depth`` levels of the pruned tree."""
    if readable_depth > horizon:
        raise LevelOutOfRange("readable depth exceeds horizon")
    out = decode_quad(code, horizon)
    if out.extinct:
        raise Extinct(f"the coded tree dies before level {horizon}")
    return encode_trit(prune_to_depth(out.tree, readable_depth).readable)


def resolution_cap(law: OffspringLaw, eps: float = 2.0**-64) -> int | None:
    """Generation size past which extinction has probability below ``eps``.

    ``Z`` independent lines all die with probability at most ``(1 - l)^Z``.
    Returns ``None`` when the survival limit is 0 (no such size exists).
    """
    if law.a2 == 0:
        return None
    ell = survival_limit(law)
    if ell <= 0:
        return None
    if ell >= 1:
        return 1
    return max(1, math.ceil(math.log(eps) / math.log1p(-ell)))


def survives(
    law: OffspringLaw,
    levels: int,
    rng: np.random.Generator,
    counts: np.ndarray | int = 1,
    size: int | None = None,
    cap: int | None = -1,
) -> np.ndarray:
    """Does each process, started from ``counts`` nodes, last ``levels`` generations?

    Generation sizes are evolved exactly (binomial splits of the offspring
    multinomial).  A process whose size reaches ``cap`` is declared alive;
    the default cap from :func:`resolution_cap` makes that call wrong with
    probability below 2^-64.  Pass ``cap=None`` to disable it.
    """
    if size is not None:
        z = np.full(size, counts, dtype=np.int64)
    else:
        z = np.atleast_1d(np.array(counts, dtype=np.int64))
    if cap == -1:
        cap = resolution_cap(law)
    out = np.zeros(z.size, dtype=bool)
    idx = np.arange(z.size)
    a2 = law.a2
    single = (law.a0 + law.a1) / (1 - a2) if a2 < 1 else 0.0
    single = min(single, 1.0)
    for _ in range(levels):
        live = z > 0
        if cap is not None:
            done = z >= cap
            out[idx[done]] = True
            live &= ~done
        z, idx = z[live], idx[live]
        if z.size == 0:
            return out
        both = rng.binomial(z, a2)
        one = rng.binomial(z - both, single)
        z = 2 * both + one
        if cap is None and z.max() > 2**60:
            raise BudgetExceeded(-1, int(z.max()), 2**60)
    out[idx[z > 0]] = True
    return out
