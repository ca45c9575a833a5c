"""Symbol codes for binary trees and the trees they decode to.

A trit code (alphabet ``012``) describes a tree without dead ends: the
i-th symbol says which children the i-th extendible node keeps
(0 = left only, 1 = right only, 2 = both).  A quad code adds the symbol 3
for a node with no children, which lets it describe Galton-Watson trees
that may die out.

Nodes are visited level by level and lexicographically within a level.
Trees are always finite truncations: a ``PrefixTree`` of depth ``d`` holds
the nodes of length at most ``d``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import ClassVar, Iterable, Sequence

import numpy as np

from .errors import CodeTooShort, DeadEndPresent, LevelOutOfRange

__all__ = [
    "TritCode",
    "QuadCode",
    "PrefixTree",
    "DecodeOutcome",
    "decode_trit",
    "encode_trit",
    "decode_quad",
    "encode_quad",
    "paths_at_level",
    "expand_level",
]


@dataclass(frozen=True)
class _Code:
    symbols: tuple[int, ...]
    alphabet: ClassVar[int] = 0

    def __post_init__(self):
        if isinstance(self.symbols, np.ndarray):
            syms = tuple(self.symbols.astype(int).tolist())
        else:
            syms = tuple(int(s) for s in self.symbols)
        for s in syms:
            if not 0 <= s < self.alphabet:
                raise ValueError(
                    f"symbol {s} outside alphabet 0..{self.alphabet - 1}"
                )
        object.__setattr__(self, "symbols", syms)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return type(self)(self.symbols[item])
        return self.symbols[item]

    def __str__(self):
        return "".join(map(str, self.symbols))

    @classmethod
    def from_str(cls, text: str):
        return cls(tuple(text.strip()))

    def is_prefix_of(self, other: "_Code") -> bool:
        return other.symbols[: len(self.symbols)] == self.symbols


class TritCode(_Code):
    """Finite prefix of a code over {0,1,2}."""

    alphabet = 3


class QuadCode(_Code):
    """Finite prefix of a code over {0,1,2,3}; 3 kills a node."""

    alphabet = 4


@dataclass(frozen=True)
class PrefixTree:
    """A prefix-closed set of binary strings of length at most ``depth``."""

    depth: int
    nodes: frozenset

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        nodes = frozenset(self.nodes)
        if "" not in nodes:
            raise ValueError("the empty string must be a node")
        for node in nodes:
            if len(node) > self.depth:
                raise ValueError(f"node {node!r} is deeper than {self.depth}")
            if node.strip("01"):
                raise ValueError(f"node {node!r} is not a binary string")
            if node and node[:-1] not in nodes:
                raise ValueError(f"node {node!r} is missing its parent")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def full(cls, depth: int) -> "PrefixTree":
        levels = [np.arange(2**k, dtype=np.int64) for k in range(depth + 1)]
        return cls.from_levels(depth, levels)

    @classmethod
    def path(cls, bits: str, depth: int | None = None) -> "PrefixTree":
        depth = len(bits) if depth is None else depth
        return cls(depth, frozenset(bits[:k] for k in range(len(bits) + 1)))

    @classmethod
    def from_levels(cls, depth: int, levels: Sequence[Iterable[int]]) -> "PrefixTree":
        """Build from per-level integer labels (bit ``k-1`` is the first step)."""
        nodes = {""}
        for k, level in enumerate(levels):
            if k == 0:
                continue
            fmt = f"0{k}b"
            nodes.update(format(int(v), fmt) for v in level)
        return cls(depth, frozenset(nodes))

    def level(self, k: int) -> list[str]:
        return sorted(n for n in self.nodes if len(n) == k)

    def levels(self) -> list[list[str]]:
        """Sorted nodes of every level 0..depth."""
        out = [[] for _ in range(self.depth + 1)]
        for n in self.nodes:
            out[len(n)].append(n)
        for level in out:
            level.sort()
        return out

    def level_ints(self, k: int) -> np.ndarray:
        return np.array(
            sorted(int(n, 2) if n else 0 for n in self.nodes if len(n) == k),
            dtype=np.int64,
        )

    def restrict(self, depth: int) -> "PrefixTree":
        if depth > self.depth:
            raise LevelOutOfRange(f"cannot restrict depth {self.depth} tree to {depth}")
        return PrefixTree(depth, frozenset(n for n in self.nodes if len(n) <= depth))

    def height(self) -> int:
        """Length of the longest node."""
        return max(len(n) for n in self.nodes)

    def __contains__(self, node):
        return node in self.nodes

    def __len__(self):
        return len(self.nodes)

    def to_dict(self) -> dict:
        return {"depth": self.depth, "nodes": sorted(self.nodes, key=lambda n: (len(n), n))}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PrefixTree":
        return cls(int(data["depth"]), frozenset(data["nodes"]))

    @classmethod
    def from_json(cls, text: str) -> "PrefixTree":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DecodeOutcome:
    tree: PrefixTree
    consumed: int
    extinct: bool = False


def expand_level(level: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """Children of ``level`` (sorted integer labels) under one symbol per node.

    Works for both alphabets; the output stays sorted, which is the
    lexicographic order of the next level.
    """
    has_left = (symbols == 0) | (symbols == 2)
    has_right = (symbols == 1) | (symbols == 2)
    cand = np.stack([2 * level, 2 * level + 1], axis=1).ravel()
    keep = np.stack([has_left, has_right], axis=1).ravel()
    return cand[keep]


def _decode(symbols: Sequence[int], depth: int, dead_ends: bool) -> DecodeOutcome:
    nodes = [""]
    level = [""]
    i = 0
    n = len(symbols)
    for k in range(depth):
        nxt = []
        for j, node in enumerate(level):
            if i >= n:
                remaining = len(level) - j
                # every trit node has a child, so later levels are no smaller
                missing = remaining if dead_ends else remaining + (depth - k - 1) * len(level)
                raise CodeTooShort(missing, depth, k)
            s = symbols[i]
            i += 1
            if s == 0:
                nxt.append(node + "0")
            elif s == 1:
                nxt.append(node + "1")
            elif s == 2:
                nxt.append(node + "0")
                nxt.append(node + "1")
        nodes.extend(nxt)
        level = nxt
        if not level:
            return DecodeOutcome(PrefixTree(depth, frozenset(nodes)), i, True)
    return DecodeOutcome(PrefixTree(depth, frozenset(nodes)), i, False)


def decode_trit(code: TritCode, depth: int) -> DecodeOutcome:
    """Decode the first ``depth`` levels of the tree coded by a trit code.

    Raises ``CodeTooShort`` if the code runs out first.
    """
    if not isinstance(code, TritCode):
        code = TritCode(code)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return _decode(code.symbols, depth, dead_ends=False)


def decode_quad(code: QuadCode, depth: int) -> DecodeOutcome:
    """Decode a quad code to ``depth`` levels, stopping early on extinction."""
    if not isinstance(code, QuadCode):
        code = QuadCode(code)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return _decode(code.symbols, depth, dead_ends=True)


def _child_symbol(nodes, node: str) -> int:
    left = node + "0" in nodes
    right = node + "1" in nodes
    if left and right:
        return 2
    if left:
        return 0
    if right:
        return 1
    return 3


def encode_trit(tree: PrefixTree) -> TritCode:
    """Inverse of :func:`decode_trit` for trees without dead ends."""
    out = []
    levels = tree.levels()
    for k in range(tree.depth):
        for node in levels[k]:
            s = _child_symbol(tree.nodes, node)
            if s == 3:
                raise DeadEndPresent(f"node {node!r} at level {k} has no child")
            out.append(s)
    return TritCode(out)


def encode_quad(tree: PrefixTree, pad_to: int | None = None) -> QuadCode:
    """Quad code of ``tree``; childless internal nodes get a 3.

    Encoding stops once a level is empty.  With ``pad_to`` the code is
    filled with 3s up to that length (the trailing 3s carry no information).
    """
    out = []
    levels = tree.levels()
    for k in range(tree.depth):
        level = levels[k]
        if not level:
            break
        out.extend(_child_symbol(tree.nodes, node) for node in level)
    if pad_to is not None and len(out) < pad_to:
        out.extend([3] * (pad_to - len(out)))
    return QuadCode(out)


def paths_at_level(tree: PrefixTree, level: int) -> frozenset:
    """All nodes of exactly length ``level``."""
    if not 0 <= level <= tree.depth:
        raise LevelOutOfRange(f"level {level} outside 0..{tree.depth}")
    return frozenset(n for n in tree.nodes if len(n) == level)
