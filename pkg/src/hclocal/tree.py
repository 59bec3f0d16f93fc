"""Arena representation of hierarchy trees.

A hierarchy tree over n labeled items is a full binary tree with n leaves,
each leaf carrying a distinct label in {0, ..., n-1} (printed 1-based in the
text format). Children are unordered: two trees are equal iff their canonical
serializations coincide.

Node ids are stable: leaves occupy ids 0..n-1 (id == label), internal nodes
occupy ids n..2n-2 in creation order. Interchange moves relink parent/child
pointers and never reallocate ids, so an id can index auxiliary per-subtree
tables across mutations.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, TreeFormatError

_NO_NODE = -1


class HcTree:
    """Full binary tree with n uniquely labeled leaves, stored as parallel arrays.

    Arrays (length m = 2n-1, all int32):
      parent : parent id, -1 for the root
      child1 : first child id, -1 for leaves
      child2 : second child id, -1 for leaves
      label  : leaf label in 0..n-1 for leaves, -1 for internal nodes
      count  : cached number of leaf descendants

    ``version`` increments on every mutation; move objects record it so that
    stale applications can be rejected.
    """

    __slots__ = ("n", "root", "parent", "child1", "child2", "label", "count",
                 "version")

    def __init__(self, n, root, parent, child1, child2, label, count):
        self.n = int(n)
        self.root = int(root)
        self.parent = parent
        self.child1 = child1
        self.child2 = child2
        self.label = label
        self.count = count
        self.version = 0

    # ------------------------------------------------------------------ #
    # constructors                                                        #
    # ------------------------------------------------------------------ #

    @classmethod
    def _empty(cls, n):
        m = 2 * n - 1
        parent = np.full(m, _NO_NODE, dtype=np.int32)
        child1 = np.full(m, _NO_NODE, dtype=np.int32)
        child2 = np.full(m, _NO_NODE, dtype=np.int32)
        label = np.full(m, _NO_NODE, dtype=np.int32)
        label[:n] = np.arange(n, dtype=np.int32)
        count = np.zeros(m, dtype=np.int32)
        count[:n] = 1
        return cls(n, m - 1, parent, child1, child2, label, count)

    @classmethod
    def from_merges(cls, n, merges):
        """Build a tree from an agglomeration sequence.

        ``merges`` is an ordered list of n-1 id pairs. Leaves are ids 0..n-1;
        the k-th merge (k from 0) joins two current roots and creates id n+k.
        The final merge creates the root, id 2n-2.
        """
        if n < 1:
            raise InputError(f"leaf count must be >= 1, got {n}")
        merges = list(merges)
        if len(merges) != n - 1:
            raise InputError(
                f"expected {n - 1} merges for {n} leaves, got {len(merges)}")
        t = cls._empty(n)
        used = np.zeros(2 * n - 1, dtype=bool)
        for k, (a, b) in enumerate(merges):
            new = n + k
            for side in (a, b):
                if not 0 <= side < new:
                    raise InputError(
                        f"merge {k}: id {side} is not an existing cluster")
                if used[side]:
                    raise InputError(f"merge {k}: id {side} already merged")
            if a == b:
                raise InputError(f"merge {k}: cannot merge id {a} with itself")
            used[a] = used[b] = True
            t.child1[new] = a
            t.child2[new] = b
            t.parent[a] = new
            t.parent[b] = new
            t.count[new] = t.count[a] + t.count[b]
        if n > 1 and not used[: 2 * n - 2].all():
            missing = int(np.flatnonzero(~used[: 2 * n - 2])[0])
            raise InputError(
                f"merge sequence does not connect all clusters (id {missing} unused)")
        return t

    @classmethod
    def random(cls, n, seed):
        """Random agglomeration: repeatedly merge a uniformly random pair of
        current roots. Deterministic for a given seed. Not uniform over tree
        shapes."""
        if n < 2:
            raise InputError(f"random tree needs n >= 2, got {n}")
        rng = np.random.default_rng(seed)
        t = cls._empty(n)
        roots = list(range(n))
        for k in range(n - 1):
            size = len(roots)
            i = int(rng.integers(size))
            j = int(rng.integers(size - 1))
            if j >= i:
                j += 1
            a, b = roots[i], roots[j]
            new = n + k
            t.child1[new] = a
            t.child2[new] = b
            t.parent[a] = new
            t.parent[b] = new
            t.count[new] = t.count[a] + t.count[b]
            # replace the two merged roots by the new one
            hi, lo = (i, j) if i > j else (j, i)
            roots[hi] = roots[-1]
            roots.pop()
            roots[lo] = new
        return t

    # ------------------------------------------------------------------ #
    # basic queries                                                       #
    # ------------------------------------------------------------------ #

    @property
    def m(self):
        """Total node count, always 2n-1."""
        return 2 * self.n - 1

    def is_leaf(self, v):
        return self.child1[v] == _NO_NODE

    def sibling(self, v):
        """The other child of v's parent. v must not be the root."""
        p = self.parent[v]
        if p == _NO_NODE:
            raise InputError(f"node {v} is the root and has no sibling")
        return int(self.child2[p] if self.child1[p] == v else self.child1[p])

    def internal_nonroot_ids(self):
        """Ids of internal nodes other than the root (the eligible lower
        endpoints of interchange edges), ascending."""
        ids = np.flatnonzero((self.child1 != _NO_NODE) &
                             (self.parent != _NO_NODE))
        return ids.astype(np.int64)

    def postorder(self):
        """All node ids, children before parents."""
        order = np.empty(self.m, dtype=np.int64)
        stack = [self.root]
        k = self.m
        while stack:
            v = stack.pop()
            k -= 1
            order[k] = v
            if self.child1[v] != _NO_NODE:
                stack.append(int(self.child1[v]))
                stack.append(int(self.child2[v]))
        if k != 0:
            raise InputError("tree is not fully connected from the root")
        return order

    def leaves_under(self, v):
        """Leaf ids (== labels) in the subtree rooted at v, as an int array."""
        out = []
        stack = [int(v)]
        while stack:
            u = stack.pop()
            if self.child1[u] == _NO_NODE:
                out.append(u)
            else:
                stack.append(int(self.child1[u]))
                stack.append(int(self.child2[u]))
        return np.array(out, dtype=np.int64)

    def lca(self, i, j):
        """Lowest common ancestor of leaf labels i and j (0-based)."""
        n = self.n
        if i == j:
            raise InputError("lca requires two distinct leaves")
        for lbl in (i, j):
            if not 0 <= lbl < n:
                raise InputError(f"unknown leaf label {lbl} (n={n})")
        seen = set()
        v = i
        while v != _NO_NODE:
            seen.add(v)
            v = int(self.parent[v])
        v = j
        while v not in seen:
            v = int(self.parent[v])
        return v

    def lca_subtree_size(self, i, j):
        """Number of leaves in the smallest subtree containing leaves i and j."""
        return int(self.count[self.lca(i, j)])

    def copy(self):
        t = HcTree(self.n, self.root, self.parent.copy(), self.child1.copy(),
                   self.child2.copy(), self.label.copy(), self.count.copy())
        t.version = self.version
        return t

    # ------------------------------------------------------------------ #
    # validation                                                          #
    # ------------------------------------------------------------------ #

    def validate(self):
        """Check every structural invariant; raises InputError on failure."""
        n, m = self.n, self.m
        leaves = self.child1 == _NO_NODE
        if (self.child2 == _NO_NODE).tolist() != leaves.tolist():
            raise InputError("a node has exactly one child (tree not full)")
        if int(leaves.sum()) != n:
            raise InputError(f"expected {n} leaves, found {int(leaves.sum())}")
        if not leaves[:n].all() or leaves[n:].any():
            raise InputError("leaf ids must be exactly 0..n-1")
        if sorted(self.label[:n].tolist()) != list(range(n)):
            raise InputError("leaf labels are not a permutation of 0..n-1")
        if (self.label[:n] != np.arange(n)).any():
            raise InputError("leaf id must equal leaf label")
        if self.parent[self.root] != _NO_NODE:
            raise InputError("root has a parent")
        order = self.postorder()  # also checks connectivity / single tree
        if len(set(order.tolist())) != m:
            raise InputError("node ids are not unique in traversal")
        for v in order:
            v = int(v)
            c1, c2 = int(self.child1[v]), int(self.child2[v])
            if c1 == _NO_NODE:
                if self.count[v] != 1:
                    raise InputError(f"leaf {v} has cached count {self.count[v]}")
                continue
            for c in (c1, c2):
                if self.parent[c] != v:
                    raise InputError(f"child link {v}->{c} is not mirrored")
            if self.count[v] != self.count[c1] + self.count[c2]:
                raise InputError(
                    f"node {v}: cached count {self.count[v]} != "
                    f"{self.count[c1]} + {self.count[c2]}")
        if self.count[self.root] != n:
            raise InputError("root count does not equal leaf count")
        return True

    # ------------------------------------------------------------------ #
    # text format                                                         #
    # ------------------------------------------------------------------ #

    def serialize(self):
        """Canonical parenthesized text with 1-based labels.

        At every internal node the child whose subtree holds the smaller
        minimum label is printed first, so equal unordered trees serialize
        identically. Terminated by a semicolon.
        """
        order = self.postorder()
        minlab = np.empty(self.m, dtype=np.int64)
        expr = [None] * self.m
        for v in order:
            v = int(v)
            c1 = int(self.child1[v])
            if c1 == _NO_NODE:
                minlab[v] = self.label[v]
                expr[v] = str(int(self.label[v]) + 1)
            else:
                c2 = int(self.child2[v])
                if minlab[c1] > minlab[c2]:
                    c1, c2 = c2, c1
                minlab[v] = minlab[c1]
                expr[v] = "(" + expr[c1] + "," + expr[c2] + ")"
        return expr[self.root] + ";"

    def __eq__(self, other):
        if not isinstance(other, HcTree):
            return NotImplemented
        return self.n == other.n and self.serialize() == other.serialize()

    def __hash__(self):
        return hash(self.serialize())

    def __repr__(self):
        text = self.serialize()
        if len(text) > 60:
            text = text[:57] + "..."
        return f"HcTree(n={self.n}, {text!r})"


def _parse_nested(text):
    """Parse tree text into nested tuples of 1-based int labels."""
    stack = []       # open groups, each a list of finished children
    last = None      # most recently finished subtree
    i, size = 0, len(text)
    end = None
    while i < size:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == "(":
            if last is not None:
                raise TreeFormatError("unexpected '(' after a subtree", i)
            stack.append([])
            i += 1
        elif ch.isdigit():
            if last is not None:
                raise TreeFormatError("two subtrees without a separator", i)
            j = i
            while j < size and text[j].isdigit():
                j += 1
            last = int(text[i:j])
            if last == 0:
                raise TreeFormatError("labels are 1-based; 0 is invalid", i)
            i = j
        elif ch == ",":
            if last is None or not stack:
                raise TreeFormatError("unexpected ','", i)
            stack[-1].append(last)
            last = None
            i += 1
        elif ch == ")":
            if last is None or not stack:
                raise TreeFormatError("unexpected ')'", i)
            group = stack.pop()
            group.append(last)
            if len(group) != 2:
                raise TreeFormatError(
                    f"internal node must have exactly two children, got "
                    f"{len(group)}", i)
            last = (group[0], group[1])
            i += 1
        elif ch == ";":
            if stack:
                raise TreeFormatError("unbalanced '(' before ';'", i)
            if last is None:
                raise TreeFormatError("empty tree before ';'", i)
            end = i
            i += 1
            break
        else:
            raise TreeFormatError(f"unexpected character {ch!r}", i)
    if end is None:
        raise TreeFormatError("missing terminating ';'", size)
    rest = text[i:].strip()
    if rest:
        raise TreeFormatError("trailing content after ';'", i)
    return last


def parse(text):
    """Parse canonical or non-canonical tree text into an HcTree.

    Labels must be a permutation of 1..n; errors carry the byte offset for
    syntax problems and name the offending label otherwise.
    """
    nested = _parse_nested(text)

    # collect labels
    labels = []
    stack = [nested]
    while stack:
        node = stack.pop()
        if isinstance(node, int):
            labels.append(node)
        else:
            stack.extend(node)
    n = len(labels)
    seen = set()
    for lbl in labels:
        if lbl in seen:
            raise TreeFormatError(f"duplicate leaf label {lbl}")
        seen.add(lbl)
    for want in range(1, n + 1):
        if want not in seen:
            raise TreeFormatError(
                f"labels are not a permutation of 1..{n}: missing {want}")

    t = HcTree._empty(n)
    if n == 1:
        return t

    # build bottom-up: reversed preorder visits children before parents
    order = []
    stack = [nested]
    while stack:
        node = stack.pop()
        order.append(node)
        if isinstance(node, tuple):
            stack.extend(node)
    built = {}
    next_internal = n
    for node in reversed(order):
        if isinstance(node, int):
            built[id(node)] = node - 1
        else:
            a = built[id(node[0])]
            b = built[id(node[1])]
            v = next_internal
            next_internal += 1
            t.child1[v] = a
            t.child2[v] = b
            t.parent[a] = v
            t.parent[b] = v
            t.count[v] = t.count[a] + t.count[b]
            built[id(node)] = v
    return t


def from_merges(n, merges):
    return HcTree.from_merges(n, merges)


def random_tree(n, seed):
    return HcTree.random(n, seed)


def serialize(t):
    return t.serialize()
