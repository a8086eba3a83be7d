"""Minimum spanning tree construction, density adjustment, and tree queries.

The minmax (path) distance between two objects is the smallest possible
bottleneck: the minimum over all connecting paths of the maximum edge weight
along the path. On the minimum spanning tree of the complete dissimilarity
graph, the unique tree path realizes that minimum, so a single traversal from
a center yields its minmax distance to every other object.

Density adjustment rescales each tree edge to the cube root of
weight * kdist(u) * kdist(v): edges touching sparse-region vertices (large
k-distance) grow, which pushes noise chains away from cluster bodies while
leaving dense regions nearly untouched.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dataset import PointSet
from .neighbors import DensityProfile, default_k

# Relative floor applied to k-distances during adjustment so exact duplicates
# (kdist = 0) cannot collapse edges between distinct points to weight zero.
KDIST_FLOOR_REL = 1e-12

APPROX_MIN_NEIGHBORS = 10


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """Spanning tree over n vertices: n-1 weighted edges plus adjacency lists."""

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    kind: str = "raw"

    def __post_init__(self):
        edge_u = np.asarray(self.edge_u, dtype=np.int64)
        edge_v = np.asarray(self.edge_v, dtype=np.int64)
        edge_w = np.asarray(self.edge_w, dtype=np.float64)
        if not (len(edge_u) == len(edge_v) == len(edge_w) == self.n - 1):
            raise ValueError(f"expected {self.n - 1} edges, got {len(edge_w)}")
        if not np.all(np.isfinite(edge_w)) or np.any(edge_w < 0):
            raise ValueError("edge weights must be finite and non-negative")
        if self.kind not in ("raw", "adjusted"):
            raise ValueError(f"unknown tree kind {self.kind!r}")
        object.__setattr__(self, "edge_u", edge_u)
        object.__setattr__(self, "edge_v", edge_v)
        object.__setattr__(self, "edge_w", edge_w)
        adjacency = [[] for _ in range(self.n)]
        for u, v, w in zip(edge_u, edge_v, edge_w):
            adjacency[u].append((int(v), float(w)))
            adjacency[v].append((int(u), float(w)))
        object.__setattr__(self, "_adjacency", adjacency)
        if not self._is_connected():
            raise ValueError("edges do not form a connected tree")

    def _is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v, _ in self._adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return bool(seen.all())

    @property
    def adjacency(self) -> list:
        return self._adjacency

    @property
    def total_weight(self) -> float:
        return float(self.edge_w.sum())

    def edges(self):
        """Edges as (u, v, weight) tuples."""
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()))


@dataclass(frozen=True)
class MinmaxVector:
    """Minmax distances from a single source vertex to every vertex."""

    source: int
    dist: np.ndarray


def _row_distances(src, i: int) -> np.ndarray:
    if isinstance(src, PointSet):
        diff = src.coords - src.coords[i]
        return np.sqrt((diff * diff).sum(axis=1))
    return src.values[i]


def build_mst(src, mode: str = "exact") -> SpanningTree:
    """Minimum spanning tree of the complete dissimilarity graph.

    exact: dense Prim, O(N^2) time and O(N) memory, with distance rows
    computed on the fly. approximate: Kruskal over the union of kNN edges,
    stitching any residual components through their nearest inter-component
    pair; always returns a connected tree.
    """
    if mode == "exact":
        return _prim_exact(src)
    if mode == "approximate":
        return _kruskal_knn(src)
    raise ValueError(f"unknown MST mode {mode!r}")


def _prim_exact(src) -> SpanningTree:
    n = src.n
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    parent = np.full(n, n, dtype=np.int64)
    best[0] = 0.0
    edge_u, edge_v, edge_w = [], [], []
    for _ in range(n):
        key = np.where(in_tree, np.inf, best)
        u = int(np.argmin(key))  # ties resolve to the smallest index
        in_tree[u] = True
        if parent[u] < n:
            edge_u.append(int(parent[u]))
            edge_v.append(u)
            edge_w.append(float(best[u]))
        du = _row_distances(src, u)
        # Tie on weight keeps the smaller parent index, making the tree
        # deterministic under duplicate distances.
        better = ~in_tree & ((du < best) | ((du == best) & (u < parent)))
        best[better] = du[better]
        parent[better] = u
    return SpanningTree(n, np.array(edge_u), np.array(edge_v), np.array(edge_w), "raw")


def _candidate_knn_edges(src, k_graph: int):
    n = src.n
    if isinstance(src, PointSet):
        from .neighbors import build_index

        dists, idx = build_index(src).query(src.coords, k_graph + 1)
        rows = np.repeat(np.arange(n), k_graph)
        cols = idx[:, 1:].ravel()
        weights = dists[:, 1:].ravel()
    else:
        k_graph = min(k_graph, n - 1)
        values = src.values.copy()
        np.fill_diagonal(values, np.inf)
        cols = np.argpartition(values, k_graph - 1, axis=1)[:, :k_graph].ravel()
        rows = np.repeat(np.arange(n), k_graph)
        weights = values[rows, cols]
    u = np.minimum(rows, cols)
    v = np.maximum(rows, cols)
    order = np.lexsort((v, u, weights))
    return u[order], v[order], weights[order]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _kruskal_knn(src) -> SpanningTree:
    n = src.n
    k_graph = max(default_k(n), APPROX_MIN_NEIGHBORS)
    k_graph = min(k_graph, n - 1)
    cand_u, cand_v, cand_w = _candidate_knn_edges(src, k_graph)
    uf = _UnionFind(n)
    edge_u, edge_v, edge_w = [], [], []
    for u, v, w in zip(cand_u, cand_v, cand_w):
        if uf.union(int(u), int(v)):
            edge_u.append(int(u))
            edge_v.append(int(v))
            edge_w.append(float(w))
            if len(edge_w) == n - 1:
                break
    while len(edge_w) < n - 1:
        u, v, w = _nearest_cross_pair(src, uf)
        uf.union(u, v)
        edge_u.append(u)
        edge_v.append(v)
        edge_w.append(w)
    return SpanningTree(n, np.array(edge_u), np.array(edge_v), np.array(edge_w), "raw")


def _nearest_cross_pair(src, uf: _UnionFind):
    """Closest (inside, outside) pair for the component containing vertex 0."""
    n = src.n
    roots = np.fromiter((uf.find(i) for i in range(n)), dtype=np.int64, count=n)
    inside = np.flatnonzero(roots == roots[0])
    outside = np.flatnonzero(roots != roots[0])
    if isinstance(src, PointSet):
        from scipy.spatial import cKDTree

        tree = cKDTree(src.coords[outside])
        dists, nearest = tree.query(src.coords[inside], k=1)
        j = int(np.argmin(dists))
        return int(inside[j]), int(outside[nearest[j]]), float(dists[j])
    best = (np.inf, -1, -1)
    for i in inside:
        row = _row_distances(src, int(i))[outside]
        j = int(np.argmin(row))
        if row[j] < best[0]:
            best = (float(row[j]), int(i), int(outside[j]))
    return best[1], best[2], best[0]


def adjust_weights(tree: SpanningTree, density: DensityProfile) -> SpanningTree:
    """Rescale every edge to cbrt(weight * kdist(u) * kdist(v)).

    The edge set is unchanged. k-distances are floored at a tiny fraction of
    the largest raw edge weight so duplicate points keep distinct-point edges
    positive.
    """
    if tree.kind != "raw":
        raise ValueError("expected a raw tree")
    kdist = np.asarray(density.kdist, dtype=np.float64)
    if kdist.shape != (tree.n,):
        raise ValueError(f"density length {kdist.shape} does not match n={tree.n}")
    floor = KDIST_FLOOR_REL * float(tree.edge_w.max()) if tree.n > 1 else 0.0
    kdist = np.maximum(kdist, floor)
    new_w = np.cbrt(tree.edge_w * kdist[tree.edge_u] * kdist[tree.edge_v])
    return SpanningTree(tree.n, tree.edge_u, tree.edge_v, new_w, "adjusted")


def minmax_from_center(tree: SpanningTree, center: int) -> MinmaxVector:
    """Minmax distance from center to every vertex via one tree traversal.

    Each vertex's value is the maximum edge weight on its unique tree path
    from the center: the max of its parent's value and the connecting edge.
    """
    if not 0 <= center < tree.n:
        raise ValueError(f"center {center} out of range [0, {tree.n})")
    dist = np.zeros(tree.n)
    visited = np.zeros(tree.n, dtype=bool)
    visited[center] = True
    queue = deque([center])
    adjacency = tree.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v, w in adjacency[u]:
            if not visited[v]:
                visited[v] = True
                dist[v] = w if w > du else du
                queue.append(v)
    return MinmaxVector(center, dist)


def propagate_labels(tree: SpanningTree, labels) -> np.ndarray:
    """Assign each unlabeled vertex the label of its nearest labeled vertex.

    Nearness is summed path weight along the tree (multi-source shortest
    path); distance ties break toward the smaller label value. Labels are
    positive integers; 0 marks unlabeled.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (tree.n,):
        raise ValueError(f"labels length {labels.shape} does not match n={tree.n}")
    if not np.any(labels > 0):
        raise ValueError("at least one vertex must be labeled")
    out = labels.copy()
    if np.all(out > 0):
        return out
    settled = np.zeros(tree.n, dtype=bool)
    heap = [(0.0, int(lab), int(v)) for v, lab in enumerate(labels) if lab > 0]
    heapq.heapify(heap)
    adjacency = tree.adjacency
    while heap:
        d, lab, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        out[u] = lab
        for v, w in adjacency[u]:
            if not settled[v]:
                heapq.heappush(heap, (d + w, lab, v))
    return out
