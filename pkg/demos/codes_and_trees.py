"""
Coding trees by symbol strings
------------------------------

A trit code lists, level by level, which children each node keeps.  Here we
decode one, re-encode it, and intersect two trees.
"""

from rcsets import TritCode, decode_trit, encode_trit, intersect_codes, decode_quad

x = TritCode.from_str("201")
tree = decode_trit(x, depth=2).tree
for k, level in enumerate(tree.levels()):
    print(k, level or "-")

print("re-encoded:", encode_trit(tree))

y = TritCode.from_str("211")
q = intersect_codes(x, y, depth=2)
print("intersection quad code:", q)
print("common nodes:", sorted(decode_quad(q, 2).tree.nodes, key=lambda s: (len(s), s)))
