"""Depth-noise handling: pepper inpainting, frame-margin exclusion, and
edge-pixel exclusion, combined into a per-segment ignore mask.

Depth sensors drop readings (zeros), are unreliable near the frame
borders, and flicker on depth discontinuities. Zeros get inpainted;
margins and dilated edges are excluded from all segmentation math.
"""

import numpy as np

from ._kernels import (
    binary_dilate,
    hysteresis,
    median_inpaint,
    nms_gradient,
    preprocess_cube,
)
from .exceptions import ConfigError

DEFAULT_MEDIAN_RADIUS = 10
DEFAULT_CANNY_SIGMA = 1.4
DEFAULT_CANNY_LOW = 0.1
DEFAULT_CANNY_HIGH = 0.25
# Sized so the band of pixels whose inpainting can flip across a depth
# cliff (roughly a third of the median window radius, measured on noisy
# phantoms) stays inside the ignore mask.
DEFAULT_DILATE_RADIUS = 4


def default_margin(width):
    """Margin in pixels for a given frame width (50 px at width 640,
    scaled proportionally)."""
    return int(round(50 * width / 640))


def inpaint_pepper(frame, radius=DEFAULT_MEDIAN_RADIUS):
    """Fill each zero pixel with the median of the non-zero values in its
    (2*radius+1)^2 window, computed on the original frame (no cascading).

    Non-zero pixels pass through untouched; a zero pixel whose window has
    no non-zero value stays zero.
    """
    if radius < 1:
        raise ConfigError("median radius must be >= 1, got %r" % (radius,))
    frame = np.ascontiguousarray(frame, dtype=np.float64)
    return median_inpaint(frame, int(radius))


def margin_mask(width, height, margin):
    """Ignore mask that is true on a border band of the given thickness."""
    if margin < 0:
        raise ConfigError("margin must be >= 0, got %r" % (margin,))
    if margin and 2 * margin >= min(width, height):
        raise ConfigError(
            "margin %d leaves no interior in a %dx%d frame" % (margin, width, height))
    mask = np.ones((height, width), dtype=bool)
    if margin == 0:
        return ~mask
    mask[margin:height - margin, margin:width - margin] = False
    return mask


def _gaussian_taps(sigma):
    radius = int(3.0 * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return taps / taps.sum(), radius


def _correlate_sep(img, taps, radius):
    """Separable correlation with reflect padding."""
    out = np.pad(img, ((radius, radius), (0, 0)), mode="reflect")
    out = sum(taps[k] * out[k:k + img.shape[0], :] for k in range(taps.size))
    out = np.pad(out, ((0, 0), (radius, radius)), mode="reflect")
    return sum(taps[k] * out[:, k:k + img.shape[1]] for k in range(taps.size))


def _correlate3(img, kernel):
    padded = np.pad(img, 1, mode="reflect")
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.float64)
    for di in range(3):
        for dj in range(3):
            kv = kernel[di, dj]
            if kv:
                out += kv * padded[di:di + h, dj:dj + w]
    return out


_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = np.array([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]])


def canny_edges(frame, low_frac=DEFAULT_CANNY_LOW, high_frac=DEFAULT_CANNY_HIGH,
                sigma=DEFAULT_CANNY_SIGMA):
    """Canny edge map: Gaussian smooth, Sobel gradient, non-maximum
    suppression, double threshold, hysteresis.

    Thresholds are fractions of the suppressed gradient-magnitude
    maximum, so results are invariant to a linear rescale of the frame.
    """
    if not 0.0 <= low_frac <= high_frac:
        raise ConfigError(
            "need 0 <= low <= high, got low=%r high=%r" % (low_frac, high_frac))
    frame = np.asarray(frame, dtype=np.float64)
    taps, radius = _gaussian_taps(sigma)
    smooth = _correlate_sep(frame, taps, radius)
    gx = _correlate3(smooth, _SOBEL_X)
    gy = _correlate3(smooth, _SOBEL_Y)
    mag = np.hypot(gx, gy)
    nms = nms_gradient(mag, gx, gy)
    peak = float(nms.max())
    # Cancellation dust on a flat frame leaves gradients ~1e-16 of the
    # pixel scale; anything below 1e-12 of it is orders of magnitude
    # smaller than a one-quantum depth step and counts as "no gradient".
    if peak <= 1e-12 * float(np.abs(smooth).max()):
        return np.zeros(frame.shape, dtype=bool)
    strong = nms >= high_frac * peak
    weak = nms >= low_frac * peak
    if high_frac == 0.0:
        strong &= nms > 0
        weak &= nms > 0
    return hysteresis(strong, weak)


def dilate(mask, radius):
    """Square-element binary dilation (Chebyshev distance <= radius)."""
    if radius < 0:
        raise ConfigError("dilation radius must be >= 0, got %r" % (radius,))
    return binary_dilate(np.asarray(mask, dtype=bool), int(radius))


def preprocess_frames(frames, max_distance_mm=3000.0,
                      median_radius=DEFAULT_MEDIAN_RADIUS,
                      out_dtype=np.float32):
    """Normalize and inpaint raw depth frames into a (l, h, w) float cube —
    the representation every downstream stage works on.

    Equivalent to inpaint_pepper(normalize_frame(f)) per frame, fused for
    speed.
    """
    if max_distance_mm <= 0:
        raise ConfigError("max_distance_mm must be > 0, got %r" % (max_distance_mm,))
    if median_radius < 1:
        raise ConfigError("median radius must be >= 1, got %r" % (median_radius,))
    frames = np.ascontiguousarray(frames)
    n, h, w = frames.shape
    cube = np.empty((n, h, w), dtype=out_dtype)
    preprocess_cube(frames, float(max_distance_mm), int(median_radius), cube)
    return cube


def build_ignore_mask(reference, margin, low_frac=DEFAULT_CANNY_LOW,
                      high_frac=DEFAULT_CANNY_HIGH,
                      dilate_radius=DEFAULT_DILATE_RADIUS,
                      sigma=DEFAULT_CANNY_SIGMA):
    """Pixels to exclude: the frame margin plus the dilated Canny edges of
    a reference frame (typically the segment's temporal median)."""
    h, w = reference.shape
    edges = canny_edges(reference, low_frac, high_frac, sigma)
    return margin_mask(w, h, margin) | dilate(edges, dilate_radius)
