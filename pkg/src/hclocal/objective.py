"""Pairwise cost and revenue functionals over hierarchy trees.

For a tree T and similarity w, with T_{i,j} the subtree rooted at the lowest
common ancestor of leaves i and j:

  cost(T)    = sum_{i<j} w(i,j) * |T_{i,j}|          (lower is better)
  revenue(T) = sum_{i<j} w(i,j) * (n - |T_{i,j}|)    (higher is better)

Both decompose over the n-1 merges of the tree: a merge joining disjoint leaf
sets A and B contributes (|A|+|B|) * w(A,B) to cost and (n-|A|-|B|) * w(A,B)
to revenue. The identity cost + revenue = n * total_weight ties the two.
``normalized_revenue`` divides by (n-2) * total_weight, the upper bound on
revenue, so locally optimal trees score at least 1/3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

DUALITY_RTOL = 1e-9


def _check_sizes(t, w):
    if t.n != w.n:
        raise InputError(
            f"tree has {t.n} leaves but similarity matrix is {w.n}x{w.n}")


def merge_cross_weights(t, w):
    """Per-merge totals w(A,B), aligned with the internal node ids.

    Returns (ids, sizes, crosses): for each internal node, its id, its cached
    leaf count |A|+|B|, and the total similarity between its two child leaf
    sets. Runs in O(n^2) overall.
    """
    _check_sizes(t, w)
    wv = w.values
    order = t.postorder()
    leafsets = {}
    ids, sizes, crosses = [], [], []
    for v in order:
        v = int(v)
        c1 = int(t.child1[v])
        if c1 == -1:
            leafsets[v] = np.array([v], dtype=np.int64)
            continue
        c2 = int(t.child2[v])
        la, lb = leafsets.pop(c1), leafsets.pop(c2)
        if len(la) > len(lb):
            la, lb = lb, la
        crosses.append(wv[np.ix_(la, lb)].sum())
        ids.append(v)
        sizes.append(int(t.count[v]))
        leafsets[v] = np.concatenate((la, lb))
    return (np.array(ids, dtype=np.int64),
            np.array(sizes, dtype=np.int64),
            np.array(crosses))


def cost(t, w):
    """Dasgupta-style cost, aggregated over merges."""
    _, sizes, crosses = merge_cross_weights(t, w)
    return (sizes * crosses).sum()


def revenue(t, w):
    """Moseley-Wang-style revenue, aggregated over merges."""
    _, sizes, crosses = merge_cross_weights(t, w)
    return ((t.n - sizes) * crosses).sum()


def cost_and_revenue(t, w):
    """Both functionals from one merge sweep."""
    _, sizes, crosses = merge_cross_weights(t, w)
    return (sizes * crosses).sum(), ((t.n - sizes) * crosses).sum()


def normalized_revenue(t, w):
    """revenue / ((n-2) * total_weight); defined for n > 2, positive weight."""
    return normalize_revenue(revenue(t, w), t.n, w.total_weight)


def normalize_revenue(rev, n, total_weight):
    if n <= 2:
        raise InputError(f"normalized revenue is undefined for n={n}")
    if not total_weight > 0:
        raise InputError("normalized revenue is undefined for zero total weight")
    return rev / ((n - 2) * total_weight)


def revenue_by_pairs(t, w):
    """Direct evaluation of the revenue definition, one LCA walk per pair.

    Independent of the merge decomposition; O(n^2 * depth), meant for
    verification at moderate n.
    """
    _check_sizes(t, w)
    wv = w.values
    n = t.n
    total = wv[0, 0] * 0
    for i in range(n):
        depth_of = {}
        v, d = i, 0
        while v != -1:
            depth_of[v] = d
            v = int(t.parent[v])
            d += 1
        for j in range(i + 1, n):
            v = j
            while v not in depth_of:
                v = int(t.parent[v])
            total = total + wv[i, j] * (n - int(t.count[v]))
    return total


def cost_by_pairs(t, w):
    """Direct evaluation of the cost definition; verification twin of
    revenue_by_pairs."""
    _check_sizes(t, w)
    n_total = t.n * w.total_weight
    return n_total - revenue_by_pairs(t, w)


@dataclass
class Score:
    """Evaluation record for one (tree, matrix) pair."""

    cost: float
    revenue: float
    normalized_revenue: float | None
    duality_gap: float

    @property
    def duality_ok(self):
        return self.duality_gap <= DUALITY_RTOL

    def to_dict(self):
        return {
            "revenue": float(self.revenue),
            "cost": float(self.cost),
            "normalized": None if self.normalized_revenue is None
            else float(self.normalized_revenue),
            "duality_ok": bool(self.duality_ok),
        }


def score(t, w):
    """Cost, revenue, normalized revenue (None when undefined), and the
    relative duality gap |cost + revenue - n * total| / (n * total)."""
    c, r = cost_and_revenue(t, w)
    n_total = t.n * w.total_weight
    gap = abs(c + r - n_total) / n_total if n_total > 0 else abs(c + r) * 0.0
    norm = None
    if t.n > 2 and w.total_weight > 0:
        norm = normalize_revenue(r, t.n, w.total_weight)
    return Score(cost=c, revenue=r, normalized_revenue=norm,
                 duality_gap=float(gap))
