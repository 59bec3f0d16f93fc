"""Agglomerative baselines producing hierarchy trees.

average, single, and complete operate directly on a similarity matrix; at
every step the pair of clusters maximizing the linkage similarity is merged:

  average  : w(A,B) / (|A| |B|)
  single   : max pairwise similarity between members
  complete : min pairwise similarity between members

ward operates on raw feature rows via the Lance-Williams minimum-variance
recurrence on squared Euclidean distances, merging the pair with the smallest
merge cost. All four use a naive O(n^3) nearest-pair scan with deterministic
ties: among equal-quality pairs the lexicographically smallest (id, id) pair
wins, where ids follow cluster creation order (leaves 0..n-1, then n, n+1,
...). The returned merge order therefore maps directly onto tree node ids.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError
from .tree import HcTree

LINKAGE_KINDS = ("average", "single", "complete", "ward")


def _pick_pair(quality, active, ids, maximize):
    """Best active pair under ``quality`` with the deterministic tie-break."""
    q = quality.copy()
    bad = ~active
    fill = -np.inf if maximize else np.inf
    q[bad, :] = fill
    q[:, bad] = fill
    np.fill_diagonal(q, fill)
    best = q.max() if maximize else q.min()
    si, sj = np.nonzero(q == best)
    pairs = [(min(int(ids[i]), int(ids[j])), max(int(ids[i]), int(ids[j])),
              int(i), int(j)) for i, j in zip(si, sj) if i < j]
    pairs.sort()
    return pairs[0][2], pairs[0][3]


def agglomerate(w, kind):
    """Similarity-based agglomeration; ``kind`` in {average, single, complete}."""
    if kind not in ("average", "single", "complete"):
        raise InputError(f"unknown similarity linkage kind {kind!r}")
    n = w.n
    if n < 2:
        raise InputError(f"agglomeration needs n >= 2, got {n}")
    totals = np.array(w.values, dtype=np.float64, copy=True)
    extrema = totals.copy()  # per-pair max (single) or min (complete)
    size = np.ones(n, dtype=np.int64)
    ids = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    merges = []
    for step in range(n - 1):
        if kind == "average":
            quality = totals / np.outer(size, size)
        else:
            quality = extrema
        i, j = _pick_pair(quality, active, ids, maximize=True)
        a, b = int(ids[i]), int(ids[j])
        merges.append((min(a, b), max(a, b)))
        totals[i, :] += totals[j, :]
        totals[:, i] = totals[i, :]
        if kind == "single":
            extrema[i, :] = np.maximum(extrema[i, :], extrema[j, :])
            extrema[:, i] = extrema[i, :]
        elif kind == "complete":
            extrema[i, :] = np.minimum(extrema[i, :], extrema[j, :])
            extrema[:, i] = extrema[i, :]
        size[i] += size[j]
        ids[i] = n + step
        active[j] = False
    return HcTree.from_merges(n, merges)


def ward(data):
    """Minimum-variance agglomeration on feature rows.

    Costs are maintained with the Lance-Williams update
    d(A+B, C) = ((|A|+|C|) d(A,C) + (|B|+|C|) d(B,C) - |C| d(A,B))
                / (|A|+|B|+|C|)
    starting from squared Euclidean distances, so d(X,Y) is twice the
    variance increase of merging X and Y.
    """
    n = data.n
    if n < 2:
        raise InputError(f"ward needs n >= 2 rows, got {n}")
    d = squareform(pdist(data.features, metric="sqeuclidean"))
    size = np.ones(n, dtype=np.int64)
    ids = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    merges = []
    for step in range(n - 1):
        i, j = _pick_pair(d, active, ids, maximize=False)
        a, b = int(ids[i]), int(ids[j])
        merges.append((min(a, b), max(a, b)))
        sa, sb = size[i], size[j]
        dij = d[i, j]
        d[i, :] = ((sa + size) * d[i, :] + (sb + size) * d[j, :]
                   - size * dij) / (sa + sb + size)
        d[:, i] = d[i, :]
        size[i] = sa + sb
        ids[i] = n + step
        active[j] = False
    return HcTree.from_merges(n, merges)


def build_linkage(kind, similarity=None, data=None):
    """Dispatch helper used by the CLI: ward needs ``data``, the rest need
    ``similarity``."""
    if kind not in LINKAGE_KINDS:
        raise InputError(f"unknown linkage kind {kind!r}")
    if kind == "ward":
        if data is None:
            raise InputError("ward linkage requires raw feature data")
        return ward(data)
    if similarity is None:
        raise InputError(f"{kind} linkage requires a similarity matrix")
    return agglomerate(similarity, kind)
