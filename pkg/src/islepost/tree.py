"""Greedy CART-style regression trees.

Trees are grown by recursive best-split search minimizing the summed squared
error of the two children (equivalently, maximizing variance reduction).
Candidate thresholds are midpoints between consecutive distinct sorted values;
ties are broken toward the lowest feature index, then the lowest threshold, so
fits are fully deterministic for a given generator state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SplitCondition",
    "TreeNode",
    "RegressionTree",
    "fit_tree",
    "predict_tree",
    "predict_tree_matrix",
    "tree_to_text",
    "tree_from_text",
]

_NO_FEATURE = -1


@dataclass(frozen=True)
class SplitCondition:
    """One axis-aligned test: rows with x[feature] <= threshold go left."""

    feature: int
    threshold: float


@dataclass(frozen=True)
class TreeNode:
    depth: int
    count: int
    value: float
    feature: int = _NO_FEATURE  # _NO_FEATURE marks a leaf
    threshold: float = math.nan
    left: int = -1
    right: int = -1

    @property
    def is_leaf(self) -> bool:
        return self.feature == _NO_FEATURE


@dataclass(frozen=True)
class RegressionTree:
    """Flat-array binary tree; node 0 is the root, children follow in preorder."""

    nodes: tuple[TreeNode, ...]
    max_depth: int
    n_features: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def split_features(self) -> set[int]:
        """Indices of features tested by at least one internal node."""
        return {nd.feature for nd in self.nodes if not nd.is_leaf}


def _node_arrays(tree: RegressionTree):
    feat = np.fromiter((nd.feature for nd in tree.nodes), dtype=np.int64)
    thr = np.fromiter((nd.threshold for nd in tree.nodes), dtype=float)
    left = np.fromiter((nd.left for nd in tree.nodes), dtype=np.int64)
    right = np.fromiter((nd.right for nd in tree.nodes), dtype=np.int64)
    value = np.fromiter((nd.value for nd in tree.nodes), dtype=float)
    return feat, thr, left, right, value


def predict_tree(tree: RegressionTree, x) -> float:
    """Value of the unique leaf whose path conditions x satisfies."""
    x = np.asarray(x, dtype=float)
    if x.shape != (tree.n_features,):
        raise ValueError(f"expected a length-{tree.n_features} vector, got {x.shape}")
    node = tree.nodes[0]
    while not node.is_leaf:
        node = tree.nodes[node.left if x[node.feature] <= node.threshold else node.right]
    return node.value


def predict_tree_matrix(tree: RegressionTree, X: np.ndarray) -> np.ndarray:
    """Vectorized predict over the rows of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != tree.n_features:
        raise ValueError(f"expected an m×{tree.n_features} matrix, got {X.shape}")
    m = X.shape[0]
    if m == 0:
        return np.zeros(0)
    feat, thr, left, right, value = _node_arrays(tree)
    cur = np.zeros(m, dtype=np.int64)
    for _ in range(tree.max_depth + 1):
        internal = feat[cur] >= 0
        if not internal.any():
            break
        idx = np.flatnonzero(internal)
        node = cur[idx]
        goes_left = X[idx, feat[node]] <= thr[node]
        cur[idx] = np.where(goes_left, left[node], right[node])
    return value[cur]


def _best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best (threshold, children_sse) for one feature, or None.

    Scans midpoints between consecutive distinct sorted values; positions that
    would leave a child below min_leaf rows are skipped. The first minimum in
    ascending threshold order wins.
    """
    m = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    valid = xs[:-1] < xs[1:]
    lo, hi = min_leaf, m - min_leaf
    if lo > 1:
        valid[: lo - 1] = False
    if hi < m - 1:
        valid[hi:] = False
    if not valid.any():
        return None
    s1 = np.cumsum(ys)
    s2 = np.cumsum(ys * ys)
    tot1, tot2 = s1[-1], s2[-1]
    counts = np.arange(1, m, dtype=float)
    sse_left = s2[:-1] - (s1[:-1] ** 2) / counts
    sse_right = (tot2 - s2[:-1]) - ((tot1 - s1[:-1]) ** 2) / (m - counts)
    total = np.where(valid, sse_left + sse_right, np.inf)
    best = int(np.argmin(total))
    return 0.5 * (xs[best] + xs[best + 1]), float(total[best])


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
    min_leaf: int = 5,
    feature_fraction: float = 1.0,
    rng: np.random.Generator | None = None,
) -> RegressionTree:
    """Grow a greedy regression tree on the row multiset ``rows``.

    Parameters
    ----------
    X, y : training matrix and target; the tree is fit to whatever target is
        supplied (callers pass residuals for boosting).
    rows : index multiset into X/y; repeats count with multiplicity.
    max_depth : depth cap; 0 gives a root-only tree.
    min_leaf : minimum training rows per leaf.
    feature_fraction : at every node a fresh uniform sample of
        ceil(feature_fraction * p) columns is searched.
    rng : generator driving the per-node feature sampling; defaults to a fresh
        unseeded generator (pass one explicitly for reproducibility).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("rows must be non-empty")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if not 0.0 < feature_fraction <= 1.0:
        raise ValueError("feature_fraction must lie in (0, 1]")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if rng is None:
        rng = np.random.default_rng()
    p = X.shape[1]
    n_sample = int(math.ceil(feature_fraction * p))

    nodes: list[TreeNode] = []

    def build(idx: np.ndarray, depth: int) -> int:
        ys = y[idx]
        node_id = len(nodes)
        nodes.append(None)  # reserve the slot so ids follow preorder
        value = float(ys.mean())
        count = int(idx.size)
        split = None
        if depth < max_depth and count >= 2 * min_leaf and np.ptp(ys) > 0.0:
            if n_sample == p:
                feats = np.arange(p)
            else:
                feats = np.sort(rng.choice(p, size=n_sample, replace=False))
            best_sse = math.inf
            parent_sse = float(ys @ ys - count * value * value)
            for f in feats:
                cand = _best_split(X[idx, f], ys, min_leaf)
                if cand is not None and cand[1] < best_sse:
                    best_sse = cand[1]
                    split = (int(f), cand[0])
            # keep the node a leaf unless the split strictly reduces SSE
            if split is not None and not (parent_sse - best_sse > 1e-12 * max(parent_sse, 1.0)):
                split = None
        if split is None:
            nodes[node_id] = TreeNode(depth, count, value)
            return node_id
        f, t = split
        go_left = X[idx, f] <= t
        left_id = build(idx[go_left], depth + 1)
        right_id = build(idx[~go_left], depth + 1)
        nodes[node_id] = TreeNode(depth, count, value, f, t, left_id, right_id)
        return node_id

    build(rows, 0)
    return RegressionTree(tuple(nodes), max_depth, p)


def tree_to_text(tree: RegressionTree) -> str:
    """Human-readable nested serialization; round-trips via tree_from_text."""
    lines = [f"tree max_depth={tree.max_depth} n_features={tree.n_features} "
             f"n_nodes={tree.n_nodes}"]
    for i, nd in enumerate(tree.nodes):
        pad = "  " * nd.depth
        head = f"{pad}node={i} depth={nd.depth} count={nd.count} value={nd.value!r}"
        if nd.is_leaf:
            lines.append(head + " leaf")
        else:
            lines.append(head + f" split=x{nd.feature}<={nd.threshold!r} "
                                f"left={nd.left} right={nd.right}")
    return "\n".join(lines) + "\n"


def tree_from_text(text: str) -> RegressionTree:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    header = dict(part.split("=") for part in lines[0].split()[1:])
    nodes = []
    for ln in lines[1:]:
        fields = dict(part.split("=", 1) for part in ln.split() if "=" in part)
        depth = int(fields["depth"])
        count = int(fields["count"])
        value = float(fields["value"])
        if ln.endswith(" leaf"):
            nodes.append(TreeNode(depth, count, value))
        else:
            cond, thr = fields["split"].split("<=")
            nodes.append(TreeNode(depth, count, value, int(cond[1:]), float(thr),
                                  int(fields["left"]), int(fields["right"])))
    return RegressionTree(tuple(nodes), int(header["max_depth"]), int(header["n_features"]))
