"""Bernoulli measures on trit codes, Galton-Watson laws on quad codes, and
seeded symbol samplers.

Randomness comes from :class:`RandomStream`, a counter-based Philox stream
keyed by ``(master_seed, stream_index)``.  Two streams with the same key
produce the same symbols no matter when or where they are consumed, which
is what makes parallel Monte Carlo runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters, InvalidSurvival
from .tree_codec import QuadCode, TritCode

__all__ = [
    "ABS_TOL",
    "BernoulliPair",
    "SurvivalPair",
    "OffspringLaw",
    "RandomStream",
    "cylinder_measure",
    "gw_offspring",
    "survival_from_bernoulli",
    "sample_trit_code",
    "sample_quad_code",
    "trit_symbols",
    "quad_symbols",
]

ABS_TOL = 1e-12
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class BernoulliPair:
    """Probabilities of symbols 0 and 1; symbol 2 gets the rest."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if p < 0 or q < 0 or p + q > 1 + ABS_TOL:
            raise InvalidParameters(f"need p, q >= 0 and p + q <= 1, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def symmetric(cls, p: float) -> "BernoulliPair":
        return cls(p, p)

    @property
    def both(self) -> float:
        return 1.0 - self.p - self.q


@dataclass(frozen=True)
class SurvivalPair:
    """Survival probabilities of a left (``beta0``) and right (``beta1``) child."""

    beta0: float
    beta1: float

    def __post_init__(self):
        b0, b1 = float(self.beta0), float(self.beta1)
        if not (0 < b0 < 1 and 0 < b1 < 1):
            raise InvalidSurvival(f"survival parameters must lie in (0, 1), got ({b0}, {b1})")
        if b0 + b1 < 1 - ABS_TOL:
            raise InvalidSurvival(f"need beta0 + beta1 >= 1, got {b0 + b1}")
        object.__setattr__(self, "beta0", b0)
        object.__setattr__(self, "beta1", b1)


@dataclass(frozen=True)
class OffspringLaw:
    """Per-node law over left-only, right-only, both, neither.

    Not necessarily of product form: intersections of random trees give
    laws where ``a2`` differs from the product of child survival rates.
    """

    a0: float
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        vals = [float(v) for v in (self.a0, self.a1, self.a2, self.a3)]
        for v in vals:
            if v < -ABS_TOL:
                raise InvalidParameters(f"negative probability {v} in offspring law")
        if abs(sum(vals) - 1.0) > ABS_TOL:
            raise InvalidParameters(f"offspring law sums to {sum(vals)}, not 1")
        for name, v in zip(("a0", "a1", "a2", "a3"), vals):
            object.__setattr__(self, name, max(v, 0.0))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3)

    @property
    def mean_offspring(self) -> float:
        return self.a0 + self.a1 + 2 * self.a2

    @property
    def child_survival(self) -> tuple[float, float]:
        """Marginal probabilities that the left / right child is present."""
        return (self.a0 + self.a2, self.a1 + self.a2)


@dataclass(frozen=True)
class RandomStream:
    """Counter-based random stream keyed by a master seed and a stream index."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if not 0 <= self.stream_index <= _MASK64:
            raise ValueError("stream_index must fit in 64 unsigned bits")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = (self.stream_index << 64) | self.master_seed
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RandomStream":
        return RandomStream(self.master_seed, index)


def cylinder_measure(params: BernoulliPair, sigma) -> float:
    """Measure of the set of codes extending the trit string ``sigma``."""
    weights = (params.p, params.q, params.both)
    out = 1.0
    for s in str(sigma) if isinstance(sigma, TritCode) else sigma:
        s = int(s)
        if s not in (0, 1, 2):
            raise ValueError(f"symbol {s} is not a trit")
        out *= weights[s]
    return out


def gw_offspring(params: SurvivalPair) -> OffspringLaw:
    b0, b1 = params.beta0, params.beta1
    return OffspringLaw(b0 * (1 - b1), b1 * (1 - b0), b0 * b1, (1 - b0) * (1 - b1))


def survival_from_bernoulli(params: BernoulliPair) -> SurvivalPair:
    """Survival parameters whose pruned trees follow ``params``: (1-q, 1-p)."""
    return SurvivalPair(1 - params.q, 1 - params.p)


def trit_symbols(params: BernoulliPair, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to trit symbols with law (p, q, 1-p-q)."""
    return (u >= params.p).astype(np.int8) + (u >= params.p + params.q)


def quad_symbols(law: OffspringLaw, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to quad symbols with law (a0, a1, a2, a3)."""
    cuts = np.array([law.a0, law.a0 + law.a1, 1.0 - law.a3])
    return np.searchsorted(cuts, u, side="right").astype(np.int8)


def sample_trit_code(params: BernoulliPair, count: int, stream: RandomStream) -> TritCode:
    """The first ``count`` symbols of the stream's i.i.d. trit code.

    Longer samples from the same stream extend shorter ones.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    u = stream.generator().random(count)
    return TritCode(trit_symbols(params, u))


def sample_quad_code(law: OffspringLaw, count: int, stream: RandomStream) -> QuadCode:
    if count < 0:
        raise ValueError("count must be non-negative")
    u = stream.generator().random(count)
    return QuadCode(quad_symbols(law, u))
