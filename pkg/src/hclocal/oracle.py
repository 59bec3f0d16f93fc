"""Brute-force ground truth for small instances.

Everything here is deliberately independent of the arena/engine code paths:
trees are nested tuples of 1-based labels, revenue is evaluated from the
definition, and neighbors are produced by direct tuple surgery. Tests compare
the fast engine against these references.

Enumeration is capped at n = 8 (135135 trees) and breadth-first interchange
distance at n = 6, keeping the full oracle suite fast.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .tree import parse

MAX_ENUM_N = 8
MAX_DIST_N = 6


def double_factorial_count(n):
    """(2n-3)!!, the number of distinct unordered trees on n labeled leaves."""
    out = 1
    for k in range(2 * n - 3, 1, -2):
        out *= k
    return out


def canonical(tup):
    """Canonical text of a nested-tuple tree (same format the arena emits)."""
    return _canon(tup)[1] + ";"


def _canon(node):
    if isinstance(node, int):
        return node, str(node)
    (m1, s1), (m2, s2) = _canon(node[0]), _canon(node[1])
    if m1 > m2:
        m1, s1, s2 = m2, s2, s1
    return m1, "(" + s1 + "," + s2 + ")"


def all_tuple_trees(n):
    """Every unordered tree on leaves 1..n, by leaf insertion.

    A tree on k leaves grows to k+1 leaves by pairing the new leaf with any
    of its 2k-1 subtrees (including the whole tree); each shape is produced
    exactly once.
    """
    if not 2 <= n <= MAX_ENUM_N:
        raise InputError(f"enumeration supports 2 <= n <= {MAX_ENUM_N}, got {n}")
    trees = [(1, 2)]
    for new in range(3, n + 1):
        trees = [grown for t in trees for grown in _insert_leaf(t, new)]
    return trees


def _insert_leaf(node, new):
    yield (node, new)
    if isinstance(node, tuple):
        left, right = node
        for sub in _insert_leaf(left, new):
            yield (sub, right)
        for sub in _insert_leaf(right, new):
            yield (left, sub)


@dataclass
class TreeSpace:
    """All distinct trees of one order, as canonical text."""

    n: int
    trees: list

    def __len__(self):
        return len(self.trees)


def enumerate_trees(n):
    space = [canonical(t) for t in all_tuple_trees(n)]
    expected = double_factorial_count(n)
    if len(space) != len(set(space)) or len(space) != expected:
        raise InputError(
            f"enumeration produced {len(space)} trees, expected {expected}")
    return TreeSpace(n=n, trees=space)


def _leafset(node):
    if isinstance(node, int):
        return (node,)
    return _leafset(node[0]) + _leafset(node[1])


def revenue_of_tuple(tup, values):
    """Revenue from the definition: every pair pays (n - size of the smallest
    subtree containing both). ``values`` is indexed 0-based."""
    subtrees = []

    def collect(node):
        leaves = _leafset(node)
        subtrees.append(frozenset(leaves))
        if isinstance(node, tuple):
            collect(node[0])
            collect(node[1])
        return leaves

    all_leaves = collect(tup)
    n = len(all_leaves)
    total = 0
    for ai in range(1, n + 1):
        for bj in range(ai + 1, n + 1):
            smallest = min(len(s) for s in subtrees if ai in s and bj in s)
            total += values[ai - 1][bj - 1] * (n - smallest)
    return total


def tuple_neighbors(tup):
    """All trees one interchange away, as a set of canonical texts."""
    return {canonical(t) for t in _neighbor_tuples(tup)}


def _neighbor_tuples(node):
    if isinstance(node, int):
        return
    left, right = node
    if isinstance(left, tuple):
        a, b = left
        yield ((a, right), b)   # swap left's second child with its sibling
        yield ((right, b), a)   # swap left's first child with its sibling
    if isinstance(right, tuple):
        a, b = right
        yield ((a, left), b)
        yield ((left, b), a)
    for sub in _neighbor_tuples(left):
        yield (sub, right)
    for sub in _neighbor_tuples(right):
        yield (left, sub)


def text_to_tuple(text):
    """Reuse the arena parser for syntax, then rebuild nested tuples."""
    t = parse(text)

    def build(v):
        if t.child1[v] == -1:
            return int(t.label[v]) + 1
        return (build(int(t.child1[v])), build(int(t.child2[v])))

    return build(t.root)


def neighbors_of_text(text):
    return tuple_neighbors(text_to_tuple(text))


def exact_optimum(w):
    """Exhaustive revenue maximization; returns (HcTree, max revenue).

    Ties resolve to the lexicographically smallest canonical text.
    """
    n = w.n
    if n > MAX_ENUM_N:
        raise InputError(f"exact optimum supports n <= {MAX_ENUM_N}, got {n}")
    best_text, best_rev = None, None
    values = w.values
    for tup in all_tuple_trees(n):
        rev = revenue_of_tuple(tup, values)
        text = canonical(tup)
        if best_rev is None or rev > best_rev or \
                (rev == best_rev and text < best_text):
            best_text, best_rev = text, rev
    return parse(best_text), best_rev


def interchange_graph(n):
    """Adjacency (canonical text -> set of canonical texts) over all trees."""
    if n > MAX_DIST_N:
        raise InputError(f"interchange graph supports n <= {MAX_DIST_N}, got {n}")
    return {canonical(t): tuple_neighbors(t) for t in all_tuple_trees(n)}


def idist_exact(t1, t2):
    """Minimum number of interchanges from t1 to t2, by breadth-first search."""
    if t1.n != t2.n:
        raise InputError(f"trees have different orders: {t1.n} vs {t2.n}")
    if t1.n > MAX_DIST_N:
        raise InputError(
            f"exact distance supports n <= {MAX_DIST_N}, got {t1.n}")
    start, goal = t1.serialize(), t2.serialize()
    if start == goal:
        return 0
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for text in frontier:
            d = dist[text]
            for nb in neighbors_of_text(text):
                if nb not in dist:
                    if nb == goal:
                        return d + 1
                    dist[nb] = d + 1
                    nxt.append(nb)
        frontier = nxt
    raise InputError("trees are not connected by interchanges (impossible)")


def bfs_distances(start_text, adjacency):
    """Hop counts from ``start_text`` to every reachable tree in ``adjacency``."""
    dist = {start_text: 0}
    frontier = [start_text]
    while frontier:
        nxt = []
        for text in frontier:
            for nb in adjacency[text]:
                if nb not in dist:
                    dist[nb] = dist[text] + 1
                    nxt.append(nb)
        frontier = nxt
    return dist
