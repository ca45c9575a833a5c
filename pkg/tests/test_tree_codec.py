import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcsets.errors import CodeTooShort, DeadEndPresent, LevelOutOfRange
from rcsets.tree_codec import (
    PrefixTree,
    QuadCode,
    TritCode,
    decode_quad,
    decode_trit,
    encode_quad,
    encode_trit,
    expand_level,
    paths_at_level,
)


def nodes(*names):
    return frozenset("" if n == "e" else n for n in names)


@pytest.mark.parametrize(
    "code,depth,expected,consumed",
    [
        ([2, 0, 1], 2, nodes("e", "0", "1", "00", "11"), 3),
        ([0] * 6, 6, frozenset("0" * k for k in range(7)), 6),
        ([2] * 7, 2, PrefixTree.full(2).nodes, 3),
        ([1, 0, 2], 3, nodes("e", "1", "10", "100", "101"), 3),
    ],
)
def test_decode_trit(code, depth, expected, consumed):
    out = decode_trit(TritCode(code), depth)
    assert out.tree.nodes == expected
    assert out.consumed == consumed
    assert not out.extinct


@pytest.mark.parametrize(
    "tree,code",
    [
        (PrefixTree.full(2), [2, 2, 2]),
        (PrefixTree(2, nodes("e", "0", "00")), [0, 0]),
        (PrefixTree(2, nodes("e", "0", "1", "00", "11")), [2, 0, 1]),
        (PrefixTree(0, nodes("e")), []),
    ],
)
def test_encode_trit(tree, code):
    assert encode_trit(tree) == TritCode(code)


@pytest.mark.parametrize(
    "code,depth,expected,extinct,consumed",
    [
        ([3], 5, nodes("e"), True, 1),
        ([2, 0, 3], 2, nodes("e", "0", "1", "00"), False, 3),
        ([2, 3, 3], 2, nodes("e", "0", "1"), True, 3),
        ([2, 3, 3, 2, 2], 3, nodes("e", "0", "1"), True, 3),
    ],
)
def test_decode_quad(code, depth, expected, extinct, consumed):
    out = decode_quad(QuadCode(code), depth)
    assert out.tree.nodes == expected
    assert out.extinct is extinct
    assert out.consumed == consumed


@pytest.mark.parametrize(
    "tree,level,expected",
    [
        (PrefixTree.full(2), 2, {"00", "01", "10", "11"}),
        (PrefixTree(2, nodes("e", "0", "00")), 2, {"00"}),
        (PrefixTree(2, nodes("e", "0", "1", "00", "11")), 2, {"00", "11"}),
        (PrefixTree(2, nodes("e", "0", "1", "00", "11")), 0, {""}),
    ],
)
def test_paths_at_level(tree, level, expected):
    assert paths_at_level(tree, level) == expected


def test_paths_at_level_out_of_range():
    with pytest.raises(LevelOutOfRange):
        paths_at_level(PrefixTree.full(2), 3)


def test_code_too_short_reports_lower_bound():
    with pytest.raises(CodeTooShort) as info:
        decode_trit(TritCode([2, 2]), 3)
    # one node left on level 1, and level 2 has at least two nodes
    assert info.value.missing >= 1 + 2
    assert info.value.level == 1


def test_code_too_short_quad():
    with pytest.raises(CodeTooShort):
        decode_quad(QuadCode([2, 0]), 2)


def test_encode_trit_rejects_dead_end():
    with pytest.raises(DeadEndPresent):
        encode_trit(PrefixTree(2, nodes("e", "0", "1", "00")))


def test_encode_quad_marks_dead_ends_and_pads():
    tree = PrefixTree(2, nodes("e", "0", "1", "00"))
    assert encode_quad(tree) == QuadCode([2, 0, 3])
    dead = PrefixTree(3, nodes("e"))
    assert encode_quad(dead) == QuadCode([3])
    assert encode_quad(dead, pad_to=4) == QuadCode([3, 3, 3, 3])


@pytest.mark.parametrize(
    "bad",
    [
        dict(depth=1, nodes=nodes("0")),  # no root
        dict(depth=2, nodes=nodes("e", "01")),  # missing prefix
        dict(depth=1, nodes=nodes("e", "0", "00")),  # too deep
        dict(depth=1, nodes=nodes("e", "2")),  # not binary
    ],
)
def test_prefix_tree_invariants(bad):
    with pytest.raises(ValueError):
        PrefixTree(**bad)


@pytest.mark.parametrize("cls,text", [(TritCode, "0123"), (QuadCode, "04")])
def test_code_alphabet(cls, text):
    with pytest.raises(ValueError):
        cls.from_str(text)


def test_code_text_form():
    c = QuadCode.from_str("0123")
    assert str(c) == "0123"
    assert c.symbols == (0, 1, 2, 3)
    assert isinstance(c[1:3], QuadCode)
    assert TritCode("01").is_prefix_of(TritCode("012"))


def test_tree_json_roundtrip():
    tree = PrefixTree(2, nodes("e", "0", "1", "00", "11"))
    data = json.loads(tree.to_json())
    assert data == {"depth": 2, "nodes": ["", "0", "1", "00", "11"]}
    assert PrefixTree.from_json(tree.to_json()) == tree


# ---- properties -----------------------------------------------------------


@st.composite
def dead_end_free_trees(draw, max_depth=7):
    """Prefix closure of a non-empty set of depth-d leaves."""
    depth = draw(st.integers(0, max_depth))
    leaves = draw(st.sets(st.integers(0, 2**depth - 1), min_size=1, max_size=40))
    words = {format(v, f"0{depth}b") if depth else "" for v in leaves}
    return PrefixTree(depth, frozenset(w[:k] for w in words for k in range(depth + 1)))


@settings(max_examples=300, deadline=None)
@given(dead_end_free_trees())
def test_trit_roundtrip_on_trees(tree):
    code = encode_trit(tree)
    out = decode_trit(code, tree.depth)
    assert out.tree == tree
    assert out.consumed == len(code)


trit_lists = st.lists(st.integers(0, 2), min_size=0, max_size=200)


@settings(max_examples=300, deadline=None)
@given(trit_lists, st.integers(0, 8))
def test_code_prefix_roundtrip(symbols, depth):
    code = TritCode(symbols)
    try:
        out = decode_trit(code, depth)
    except CodeTooShort:
        return
    again = encode_trit(out.tree)
    assert again.is_prefix_of(code)
    assert len(again) == out.consumed


@settings(max_examples=300, deadline=None)
@given(trit_lists, st.integers(0, 8), st.integers(0, 8))
def test_decode_monotone_in_depth(symbols, d1, d2):
    lo, hi = sorted((d1, d2))
    code = TritCode(symbols)
    try:
        deep = decode_trit(code, hi)
    except CodeTooShort:
        return
    shallow = decode_trit(code, lo)
    assert deep.tree.restrict(lo) == shallow.tree


@settings(max_examples=300, deadline=None)
@given(trit_lists, st.integers(0, 8))
def test_trit_decode_has_no_dead_ends(symbols, depth):
    try:
        tree = decode_trit(TritCode(symbols), depth).tree
    except CodeTooShort:
        return
    assert "" in tree
    for node in tree.nodes:
        if node:
            assert node[:-1] in tree
        if len(node) < depth:
            assert node + "0" in tree or node + "1" in tree


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=120), st.integers(0, 8))
def test_quad_roundtrip(symbols, depth):
    code = QuadCode(symbols)
    try:
        out = decode_quad(code, depth)
    except CodeTooShort:
        return
    again = encode_quad(out.tree)
    assert again.is_prefix_of(code)
    assert decode_quad(again, depth).tree == out.tree
    if out.extinct:
        assert out.tree.height() < depth


def test_vectorised_expansion_matches_decode():
    rng = np.random.default_rng(3)
    syms = rng.integers(0, 3, size=400)
    depth = 6
    tree = decode_trit(TritCode(syms), depth).tree
    level = np.zeros(1, dtype=np.int64)
    i = 0
    for k in range(depth):
        level_next = expand_level(level, syms[i : i + level.size])
        i += level.size
        level = level_next
        assert level.tolist() == tree.level_ints(k + 1).tolist()
