"""Interchange move evaluation over a subtree-weight table.

An interchange acts on an edge (x, parent(x)) where x is internal and not the
root: one of x's two child subtrees is exchanged with x's sibling subtree.
With x's children A (first) and B (second) and sibling C, the revenue deltas
are

  swap second child with sibling:  |B| * w(A,C) - |C| * w(A,B)
  swap first  child with sibling:  |A| * w(B,C) - |C| * w(A,B)

so a tree is locally optimal iff |C| w(A,B) >= |A| w(B,C) and
|C| w(A,B) >= |B| w(A,C) at every eligible edge.

The W table holds, for every ordered node pair (i, j), the total similarity
between the leaf sets of the subtrees rooted at i and j (diagonal: twice the
internal weight of subtree i). It is built once in O(n^2) and updated in O(n)
per applied move: only row/column x changes, because an interchange preserves
the leaf set of every other node.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InputError, InternalInvariantError, StaleMoveError

EPSILON = 1e-12


class MoveVariant(IntEnum):
    """Which child of x is exchanged with x's sibling."""

    SWAP_SECOND_WITH_SIBLING = 0
    SWAP_FIRST_WITH_SIBLING = 1


@dataclass(frozen=True)
class InterchangeMove:
    """One candidate interchange at edge (x, y) with its exact revenue gain."""

    x: int
    y: int
    variant: MoveVariant
    gain: float
    tree_version: int

    def key(self):
        return (self.x, int(self.variant))


class WMatrix:
    """Dense (2n-1) x (2n-1) table of inter-subtree total weights.

    ``values[i, j]`` is the total similarity between the leaf sets under nodes
    i and j (well-defined for overlapping subtrees too, with self-pairs
    weighing zero). ``total_weight`` is the full pairwise weight of the
    instance. ``exact`` marks object-dtype (Fraction) arithmetic.
    """

    __slots__ = ("values", "total_weight", "exact")

    def __init__(self, values, total_weight, exact):
        self.values = values
        self.total_weight = total_weight
        self.exact = exact


def build_w(t, w):
    """Construct the W table bottom-up in height order, O(n^2) time/space.

    Leaf-pair entries come straight from the similarity matrix; an internal
    node's row is the sum of its children's rows, each entry O(1).
    """
    if t.n != w.n:
        raise InputError(
            f"tree has {t.n} leaves but similarity matrix is {w.n}x{w.n}")
    n, m = t.n, t.m
    exact = w.is_exact
    dtype = object if exact else np.float64
    values = np.zeros((m, m), dtype=dtype)
    values[:n, :n] = w.values
    for v in t.postorder():
        v = int(v)
        c1 = int(t.child1[v])
        if c1 == -1:
            continue
        c2 = int(t.child2[v])
        values[v, :] = values[c1, :] + values[c2, :]
        values[:, v] = values[v, :]
        values[v, v] = values[v, c1] + values[v, c2]
    return WMatrix(values, w.total_weight, exact)


def _candidate_arrays(t, W):
    """Gain vectors for all eligible edges.

    Returns (xs, ys, gains) where gains has shape (2, len(xs)): row 0 swaps
    the second child with the sibling, row 1 the first child.
    """
    xs = t.internal_nonroot_ids()
    if len(xs) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty((2, 0))
    a = t.child1[xs].astype(np.int64)
    b = t.child2[xs].astype(np.int64)
    ys = t.parent[xs].astype(np.int64)
    other = t.child2[ys].astype(np.int64)
    c = np.where(t.child1[ys] == xs, other, t.child1[ys].astype(np.int64))
    V = W.values
    w_ab = V[a, b]
    w_ac = V[a, c]
    w_bc = V[b, c]
    cnt = t.count
    common = cnt[c] * w_ab
    gains = np.stack((cnt[b] * w_ac - common, cnt[a] * w_bc - common))
    return xs, ys, gains


def _threshold(W, tolerance):
    if W.exact:
        return 0
    return tolerance * float(W.total_weight)


def enumerate_moves(t, W):
    """All 2(n-2) candidate moves with exact gains, ordered by (x, variant)."""
    xs, ys, gains = _candidate_arrays(t, W)
    moves = []
    for k in range(len(xs)):
        for variant in (MoveVariant.SWAP_SECOND_WITH_SIBLING,
                        MoveVariant.SWAP_FIRST_WITH_SIBLING):
            moves.append(InterchangeMove(
                x=int(xs[k]), y=int(ys[k]), variant=variant,
                gain=gains[int(variant), k], tree_version=t.version))
    return moves


def best_move(t, W, tolerance=EPSILON):
    """Most profitable move, or None when the tree is locally optimal.

    A move is profitable when its gain exceeds tolerance * total_weight
    (strictly greater than zero in exact mode). Ties break toward the
    smallest (x id, variant) pair.
    """
    xs, ys, gains = _candidate_arrays(t, W)
    if len(xs) == 0:
        return None
    best = gains.max()
    if not best > _threshold(W, tolerance):
        return None
    variants, ks = np.nonzero(gains == best)
    pick = min(range(len(ks)), key=lambda i: (xs[ks[i]], variants[i]))
    k, variant = int(ks[pick]), MoveVariant(int(variants[pick]))
    return InterchangeMove(x=int(xs[k]), y=int(ys[k]), variant=variant,
                           gain=gains[int(variant), k],
                           tree_version=t.version)


def profitable_moves(t, W, tolerance=EPSILON):
    """All moves with gain above the profitability threshold, by (x, variant)."""
    thr = _threshold(W, tolerance)
    return [mv for mv in enumerate_moves(t, W) if mv.gain > thr]


def apply_move(t, W, mv):
    """Relink the tree per ``mv``, update W incrementally, return the realized
    revenue delta.

    Only the subtree of x changes its leaf set, so only row/column x of W is
    rewritten (plus the diagonal entry, which tracks the internal weight of
    the subtree). The realized delta is recomputed from the diagonal entries
    of the two affected merges, a route independent of the gain formula.
    """
    if mv.tree_version != t.version:
        raise StaleMoveError(
            f"move was generated at tree version {mv.tree_version}, "
            f"tree is now at {t.version}")
    x, y = mv.x, mv.y
    if int(t.parent[x]) != y or t.child1[x] == -1:
        raise StaleMoveError(f"edge ({x},{y}) no longer exists")

    if mv.variant == MoveVariant.SWAP_SECOND_WITH_SIBLING:
        keep, out = int(t.child1[x]), int(t.child2[x])
    else:
        keep, out = int(t.child2[x]), int(t.child1[x])
    c = t.sibling(x)
    V = W.values
    n = t.n

    # realized delta, from the merge decomposition at x and y:
    # cross(v) = (V[v,v] - V[c1,c1] - V[c2,c2]) / 2
    cross_x_old = (V[x, x] - V[keep, keep] - V[out, out]) / 2
    cross_y_old = (V[y, y] - V[x, x] - V[c, c]) / 2
    rev_old = ((n - t.count[x]) * cross_x_old
               + (n - t.count[y]) * cross_y_old)

    # relink: `out` leaves x and takes c's slot under y; c moves under x
    if t.child1[x] == out:
        t.child1[x] = c
    else:
        t.child2[x] = c
    if t.child1[y] == c:
        t.child1[y] = out
    else:
        t.child2[y] = out
    t.parent[c] = x
    t.parent[out] = y
    t.count[x] += t.count[c] - t.count[out]
    t.version += 1

    # W update: row/column x gains c's row and loses out's row
    V[x, :] += V[c, :] - V[out, :]
    V[:, x] = V[x, :]
    V[x, x] = V[keep, keep] + V[c, c] + 2 * V[keep, c]

    cross_x_new = (V[x, x] - V[keep, keep] - V[c, c]) / 2
    cross_y_new = (V[y, y] - V[x, x] - V[out, out]) / 2
    rev_new = ((n - t.count[x]) * cross_x_new
               + (n - t.count[y]) * cross_y_new)
    realized = rev_new - rev_old
    if not W.exact:
        scale = max(abs(float(mv.gain)), float(W.total_weight), 1.0)
        if abs(float(realized) - float(mv.gain)) > 1e-6 * scale:
            raise InternalInvariantError(
                f"realized delta {realized} disagrees with predicted gain "
                f"{mv.gain} at edge ({x},{y})")
    elif realized != mv.gain:
        raise InternalInvariantError(
            f"exact realized delta {realized} != predicted gain {mv.gain}")
    return realized


@dataclass(frozen=True)
class Violation:
    """A profitable interchange found during certification."""

    x: int
    y: int
    variant: MoveVariant
    gain: float


@dataclass
class LocalOptCertificate:
    """Outcome of checking both profitability inequalities at every edge."""

    locally_optimal: bool
    violations: list
    tolerance: float
    normalized_revenue: float | None
    bound_margin: float | None  # normalized_revenue - 1/3, when defined

    def to_dict(self):
        return {
            "locally_optimal": bool(self.locally_optimal),
            "violations": [
                {"x": v.x, "y": v.y, "variant": v.variant.name,
                 "gain": float(v.gain)} for v in self.violations
            ],
            "tolerance": self.tolerance,
            "normalized_revenue": None if self.normalized_revenue is None
            else float(self.normalized_revenue),
            "bound_margin": None if self.bound_margin is None
            else float(self.bound_margin),
        }


def certify_local_optimality(t, w, tolerance=EPSILON):
    """Build W fresh and test local optimality of ``t`` under ``w``.

    The certificate lists every violated inequality with its gain. When the
    tree certifies and normalization is defined, the revenue bound margin
    (normalized revenue minus 1/3) is attached; a certified tree must sit at
    or above the 1/3 floor.
    """
    from .objective import normalize_revenue, revenue

    W = build_w(t, w)
    xs, ys, gains = _candidate_arrays(t, W)
    thr = _threshold(W, tolerance)
    violations = []
    for k in range(len(xs)):
        for variant in (MoveVariant.SWAP_SECOND_WITH_SIBLING,
                        MoveVariant.SWAP_FIRST_WITH_SIBLING):
            g = gains[int(variant), k]
            if g > thr:
                violations.append(Violation(
                    x=int(xs[k]), y=int(ys[k]), variant=variant, gain=g))
    optimal = not violations
    norm = margin = None
    if t.n > 2 and w.total_weight > 0:
        norm = float(normalize_revenue(revenue(t, w), t.n, w.total_weight))
        margin = norm - 1.0 / 3.0
        if optimal and margin < -1e-9:
            raise InternalInvariantError(
                f"certified tree violates the revenue floor: normalized "
                f"revenue {norm} < 1/3")
    return LocalOptCertificate(locally_optimal=optimal, violations=violations,
                               tolerance=tolerance, normalized_revenue=norm,
                               bound_margin=margin)
