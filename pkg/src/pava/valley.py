"""Cluster radius from the first valley of a smoothed distance histogram.

A center's distances to all objects approximate a density of distances; the
first local minimum of that curve marks where the current cluster ends. The
pipeline is: trim the far tail at a percentile, bin into equal-width bins,
subtract one from every count (so empty bins drop to -1 and sparse
between-cluster stretches register as deep valleys), smooth with a shrinking
moving average, and scan for the first interior valley.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

DEFAULT_BINS = 200
DEFAULT_SMOOTH_WINDOW = 21
DEFAULT_TRIM_PERCENTILE = 99.0
# Fallback radius multiplier when the profile has no interior valley: slightly
# above the largest retained distance, so one last cluster engulfs everything.
ENGULF_MARGIN = 1e-9


class DegenerateHistogramError(ValueError):
    """All retained distances are identical; no histogram can be formed."""


@dataclass(frozen=True, eq=False)
class DistanceHistogram:
    bin_edges: np.ndarray
    bin_centers: np.ndarray
    raw_freq: np.ndarray
    shifted_freq: np.ndarray
    smoothed_freq: np.ndarray | None = None
    smooth_window: int | None = None

    @property
    def bins(self) -> int:
        return self.raw_freq.size

    @property
    def max_distance(self) -> float:
        return float(self.bin_edges[-1])


def cap_percentile(values, p: float = DEFAULT_TRIM_PERCENTILE) -> np.ndarray:
    """Keep distances up to the p-th percentile; the tail above it is dropped.

    Linear-interpolation percentile. p = 100 keeps everything, and a constant
    vector passes through untouched.
    """
    if not 0.0 < p <= 100.0:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty distance vector")
    threshold = np.percentile(values, p)
    return values[values <= threshold]


def build_histogram(dists, bins: int = DEFAULT_BINS) -> DistanceHistogram:
    """Equal-width histogram over [min, max] of the retained distances.

    Bins are half-open with the last one closed. shifted_freq is raw_freq - 1,
    so empty bins carry -1.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    dists = np.asarray(dists, dtype=np.float64)
    lo = float(dists.min())
    hi = float(dists.max())
    if lo == hi:
        raise DegenerateHistogramError("all distances identical")
    raw, edges = np.histogram(dists, bins=bins, range=(lo, hi))
    centers = (edges[:-1] + edges[1:]) / 2.0
    return DistanceHistogram(edges, centers, raw, raw.astype(np.int64) - 1)


def smooth_profile(h: DistanceHistogram, window: int = DEFAULT_SMOOTH_WINDOW) -> DistanceHistogram:
    """Centered moving average with symmetrically shrinking end windows.

    The first and last bins pass through unsmoothed, the second and
    second-to-last average 3 points, and so on up to the full window.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd count, got {window}")
    y = h.shifted_freq.astype(np.float64)
    b = y.size
    idx = np.arange(b)
    half = np.minimum(np.minimum(idx, b - 1 - idx), (window - 1) // 2)
    cum = np.concatenate([[0.0], np.cumsum(y)])
    lo = idx - half
    hi = idx + half + 1
    smoothed = (cum[hi] - cum[lo]) / (hi - lo)
    return replace(h, smoothed_freq=smoothed, smooth_window=window)


def first_valley_radius(h: DistanceHistogram) -> float:
    """Distance at the first interior valley of the smoothed profile.

    The count shift pushes sparse bins below zero, so cluster boundaries
    show up as sustained sub-zero stretches of the smoothed profile. When the
    profile has sparse bins at all, the valley is the first sub-zero run at
    least half a smoothing window long that has dense mass (a positive
    smoothed bin) on both sides; the radius sits at the run's last truly
    empty bin, so the claim takes the current mound together with its
    straggler skirt and stops before the next mound's first object. Brief
    dips inside a spiky mound are shorter than the window, the empty lead
    before the first mound has no mass before it, and the straggler tail
    after the last mound has no mass after it, so none of them cut a
    cluster short. Profiles with no sparse bins
    fall back to the plain first-local-minimum scan, where a valley bin i
    satisfies smoothed[i] <= min(smoothed[i-1], smoothed[i+1]) and plateaus
    qualify. When no bin qualifies, the radius engulfs every retained
    distance.
    """
    if h.smoothed_freq is None:
        raise ValueError("histogram has not been smoothed")
    sm = h.smoothed_freq
    if np.any(sm < 0):
        min_run = (h.smooth_window + 1) // 2 if h.smooth_window else 1
        neg = sm < 0
        bounds = np.flatnonzero(np.diff(np.concatenate([[False], neg, [False]])))
        positive = np.flatnonzero(sm > 0)
        for start, stop in zip(bounds[::2], bounds[1::2]):  # runs are [start, stop)
            if stop - start < min_run:
                continue
            if positive.size and positive[0] < start and positive[-1] >= stop:
                empty = np.flatnonzero(h.raw_freq[start:stop] == 0)
                cut = start + empty[-1] if empty.size else stop - 1
                return float(h.bin_centers[cut])
        return h.max_distance * (1.0 + ENGULF_MARGIN)
    is_valley = sm[1:-1] <= np.minimum(sm[:-2], sm[2:])
    hits = np.flatnonzero(is_valley)
    if hits.size:
        return float(h.bin_centers[hits[0] + 1])
    return h.max_distance * (1.0 + ENGULF_MARGIN)
