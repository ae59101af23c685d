"""Detection of kinks and cusps in sampled curves from second-difference spikes.

One detector serves both the entanglement scans E(h) and the rate function
lambda(t). A sample is flagged when |second difference| is a local maximum
and exceeds ``factor`` times the median |second difference|. The comparison
median is the larger of the global one and a running median over
``local_window`` samples on each side, so a stretch of smooth but strongly
curved data does not fire on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import median_filter


@dataclass(frozen=True)
class Feature:
    """A detected non-analytic point.

    position is in x units; index is the sample of the largest spike;
    strength is that spike divided by the global median; span is the x-range
    of the merged cluster of flagged samples.
    """

    position: float
    index: int
    strength: float
    span: tuple[float, float]


def second_difference(y) -> np.ndarray:
    """|y[i-1] - 2 y[i] + y[i+1]| for the interior samples (length n - 2)."""
    y = np.asarray(y, dtype=float)
    return np.abs(y[:-2] - 2.0 * y[1:-1] + y[2:])


def _flag(d2, factor, local_window, floor=0.0):
    finite = np.isfinite(d2)
    if not finite.any():
        return np.array([], dtype=int), floor
    # rounding noise alone must not count as a spike on near-linear curves
    med = max(float(np.median(d2[finite])), floor)
    filled = np.where(finite, d2, med)
    if local_window:
        loc = median_filter(filled, size=2 * local_window + 1, mode="nearest")
        base = np.maximum(med, loc)
    else:
        base = np.full_like(filled, med)
    thr = factor * base
    idx = []
    for i in range(1, len(d2) - 1):
        if not finite[i]:
            continue
        if d2[i] > thr[i] and d2[i] >= filled[i - 1] and d2[i] >= filled[i + 1]:
            idx.append(i + 1)
    return np.array(idx, dtype=int), med


def _clusters(indices, x, merge_gap):
    out = []
    for i in indices:
        if out and x[i] - x[out[-1][-1]] <= merge_gap:
            out[-1].append(i)
        else:
            out.append([i])
    return out


def _apex(x, y, first, last, span, pad):
    """Intersect quadratic fits to the two flanks outside [first, last]."""
    lo = first - pad
    hi = last + pad
    left = slice(max(first - span, 0), max(lo, 0))
    right = slice(min(hi + 1, len(x)), min(last + span + 1, len(x)))
    xl, yl = x[left], y[left]
    xr, yr = x[right], y[right]
    if len(xl) < 5 or len(xr) < 5 or not (np.all(np.isfinite(yl)) and np.all(np.isfinite(yr))):
        return None
    pl = np.polyfit(xl, yl, 2)
    pr = np.polyfit(xr, yr, 2)
    roots = np.roots(pl - pr)
    roots = roots[np.abs(roots.imag) < 1e-12].real
    if len(roots) == 0:
        return None
    mid = 0.5 * (x[first] + x[last])
    return float(roots[np.argmin(np.abs(roots - mid))])


def detect_features(x, y, factor: float = 10.0, local_window: int = 25,
                    merge_gap: float | None = None, refine: str = "peak",
                    fit_span: int = 40, fit_pad: int = 2) -> list[Feature]:
    """Locate kinks or cusps of a sampled curve.

    Parameters
    ----------
    x, y : array_like
        Uniformly spaced abscissae and the curve. Non-finite y samples
        (e.g. a +inf rate function where the echo vanishes exactly) are
        reported as features directly.
    factor : float
        Spike threshold relative to the median |second difference|.
    local_window : int
        Half width of the running median; 0 uses the global median only.
    merge_gap : float, optional
        Flagged samples closer than this (x units) merge into one feature.
        Defaults to two sample spacings.
    refine : {"peak", "apex"}
        "peak" reports the sample with the largest spike. "apex" intersects
        quadratic fits of the curve on both flanks of the cluster, which
        locates a cusp between samples and is less sensitive to small
        oscillations riding on the curve.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    if len(x) < 5:
        return []
    if merge_gap is None:
        merge_gap = 2.0 * (x[1] - x[0]) + 1e-12
    d2 = second_difference(np.where(np.isfinite(y), y, np.nan))
    fin = np.isfinite(y)
    floor = 64 * np.finfo(float).eps * (float(np.max(np.abs(y[fin]))) if fin.any() else 0.0)
    idx, med = _flag(d2, factor, local_window, floor)
    bad = np.flatnonzero(~np.isfinite(y))
    idx = np.union1d(idx, bad).astype(int)
    out = []
    for cl in _clusters(idx, x, merge_gap):
        inf_hits = [i for i in cl if not np.isfinite(y[i])]
        if inf_hits:
            k = inf_hits[0]
            out.append(Feature(float(x[k]), int(k), float("inf"), (float(x[cl[0]]), float(x[cl[-1]]))))
            continue
        vals = d2[np.array(cl) - 1]
        k = cl[int(np.argmax(vals))]
        pos = float(x[k])
        if refine == "apex":
            a = _apex(x, y, cl[0], cl[-1], fit_span, fit_pad)
            if a is not None:
                pos = a
        elif refine != "peak":
            raise ValueError(f"unknown refine mode {refine!r}")
        strength = float(np.max(vals) / med) if med > 0 else float("inf")
        out.append(Feature(pos, int(k), strength, (float(x[cl[0]]), float(x[cl[-1]]))))
    return out
