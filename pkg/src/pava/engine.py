"""End-to-end clustering: density, tree, and one-cluster-at-a-time extraction.

Each round picks the densest unlabeled object as a generalized center,
computes minmax distances from it over the (adjusted) spanning tree, reads a
radius off the first valley of the distance histogram, and claims every
unlabeled object strictly inside that radius. Rounds repeat until nearly
everything is labeled; the remainder is assigned along the tree. The number
of clusters is never an input: it is however many rounds the data demands.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import DissimilarityMatrix, PointSet
from .mstgraph import SpanningTree, adjust_weights, build_mst, minmax_from_center, propagate_labels
from .neighbors import DensityProfile, default_k, k_distance_all
from .valley import (
    DEFAULT_BINS,
    DEFAULT_SMOOTH_WINDOW,
    DEFAULT_TRIM_PERCENTILE,
    DegenerateHistogramError,
    DistanceHistogram,
    build_histogram,
    cap_percentile,
    first_valley_radius,
    smooth_profile,
)


@dataclass
class PavaConfig:
    """Tunable knobs; the defaults run the whole pipeline hands-free."""

    k: int | None = None
    use_adjusted: bool = True
    stop_fraction: float = 0.10
    bins: int = DEFAULT_BINS
    smooth_window: int = DEFAULT_SMOOTH_WINDOW
    trim_percentile: float = DEFAULT_TRIM_PERCENTILE
    min_unlabeled: int = 20
    mst_mode: str = "exact"

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")
        if not 0.0 < self.stop_fraction < 1.0:
            raise ValueError("stop_fraction must be in (0, 1)")
        if self.bins < 3:
            raise ValueError("bins must be >= 3")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be odd")
        if not 0.0 < self.trim_percentile <= 100.0:
            raise ValueError("trim_percentile must be in (0, 100]")
        if self.min_unlabeled < 1:
            raise ValueError("min_unlabeled must be >= 1")
        if self.mst_mode not in ("exact", "approximate"):
            raise ValueError("mst_mode must be 'exact' or 'approximate'")


@dataclass
class ClusterRound:
    """One extraction round: its center, radius, and the objects it claimed."""

    center: int
    radius: float
    claimed: np.ndarray
    duration: float

    @property
    def claimed_count(self) -> int:
        return int(self.claimed.size)


@dataclass
class ClusterModel:
    labels: np.ndarray
    m: int
    rounds: list[ClusterRound]
    timings: dict[str, float]
    histograms: list[DistanceHistogram] | None = field(default=None, repr=False)


def select_center(density: DensityProfile, labeled: np.ndarray) -> int:
    """Unlabeled object with the minimum k-distance; ties pick the smallest index."""
    if labeled.all():
        raise ValueError("no unlabeled objects remain")
    masked = np.where(labeled, np.inf, density.kdist)
    return int(np.argmin(masked))


def _round_radius(tree: SpanningTree, center: int, cfg: PavaConfig):
    mm = minmax_from_center(tree, center)
    retained = cap_percentile(mm.dist, cfg.trim_percentile)
    try:
        hist = smooth_profile(build_histogram(retained, cfg.bins), cfg.smooth_window)
        radius = first_valley_radius(hist)
        degenerate = False
    except DegenerateHistogramError:
        hist = None
        radius = float(mm.dist.max()) * (1.0 + 1e-9)
        degenerate = True
    return mm, radius, hist, degenerate


def extract_cluster(tree: SpanningTree, center: int, cfg: PavaConfig, labeled: np.ndarray):
    """Claim every unlabeled object whose minmax distance to center is < radius.

    The radius comes from the valley pipeline over the distances to all N
    objects. A degenerate histogram (all distances equal) claims everything
    still unlabeled. Returns (claimed indices, radius).
    """
    if labeled[center]:
        raise ValueError(f"center {center} is already labeled")
    mm, radius, _, degenerate = _round_radius(tree, center, cfg)
    if degenerate:
        claimed = np.flatnonzero(~labeled)
    else:
        claimed = np.flatnonzero(~labeled & (mm.dist < radius))
    return claimed, radius


def run(src, cfg: PavaConfig | None = None, keep_histograms: bool = False) -> ClusterModel:
    """Cluster a PointSet or DissimilarityMatrix; deterministic for fixed inputs."""
    if cfg is None:
        cfg = PavaConfig()
    if not isinstance(src, (PointSet, DissimilarityMatrix)):
        raise TypeError(f"unsupported source type {type(src).__name__}")
    n = src.n
    if n < 2:
        raise ValueError("need at least 2 objects")
    k = cfg.k if cfg.k is not None else default_k(n)
    if k >= n:
        raise ValueError(f"k must be < N (k={k}, N={n})")

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    density = k_distance_all(src, k)
    t1 = time.perf_counter()
    timings["density_s"] = t1 - t0
    tree = build_mst(src, cfg.mst_mode)
    if cfg.use_adjusted:
        tree = adjust_weights(tree, density)
    t2 = time.perf_counter()
    timings["mst_s"] = t2 - t1

    labels = np.zeros(n, dtype=np.int64)
    rounds: list[ClusterRound] = []
    histograms: list[DistanceHistogram] = []
    target_labeled = (1.0 - cfg.stop_fraction) * n
    while True:
        round_start = time.perf_counter()
        labeled = labels > 0
        center = select_center(density, labeled)
        mm, radius, hist, degenerate = _round_radius(tree, center, cfg)
        if degenerate:
            claimed = np.flatnonzero(~labeled)
        else:
            claimed = np.flatnonzero(~labeled & (mm.dist < radius))
        m = len(rounds) + 1
        labels[claimed] = m
        rounds.append(ClusterRound(center, radius, claimed, time.perf_counter() - round_start))
        if keep_histograms and hist is not None:
            histograms.append(hist)
        labeled_count = int(np.count_nonzero(labels))
        if labeled_count >= target_labeled or n - labeled_count < cfg.min_unlabeled:
            break
    t3 = time.perf_counter()
    timings["extraction_s"] = t3 - t2

    if np.any(labels == 0):
        labels = propagate_labels(tree, labels)
    timings["propagation_s"] = time.perf_counter() - t3
    timings["total_s"] = time.perf_counter() - t0

    return ClusterModel(
        labels=labels,
        m=len(rounds),
        rounds=rounds,
        timings=timings,
        histograms=histograms if keep_histograms else None,
    )
