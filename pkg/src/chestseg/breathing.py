"""Breathing-signal extraction from a segmented region, plus ROI quality
metrics for comparing automatic and hand-drawn regions.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import masked_mean_inpainted
from .exceptions import PipelineError
from .spectral import band_bins, pixel_spectrum

_CHUNK_FRAMES = 128


@dataclass
class BreathingSignal:
    """Per-frame mean inpainted normalized depth over the ROI."""

    samples: np.ndarray
    fps: float


@dataclass
class RoiReport:
    """Spectral quality of one ROI's breathing signal.

    spectral_snr = in-band peak magnitude / median out-of-band magnitude
    (DC excluded from both sides).
    """

    dominant_freq_hz: float
    in_band_peak_amplitude: float
    spectral_snr: float
    mask_area: int


def extract_breathing_signal(sequence, mask, max_distance_mm=3000.0,
                             median_radius=10):
    """Mean inpainted normalized depth over the mask, one sample per frame.

    Inpainting a dropout pixel only reads original (non-inpainted)
    neighbors, so filling just the masked pixels gives the same samples
    as preprocessing whole frames.
    """
    mask = np.ascontiguousarray(mask, dtype=bool)
    if not mask.any():
        raise PipelineError("cannot extract a signal from an empty mask")
    if mask.shape != sequence.frames.shape[1:]:
        raise PipelineError("mask shape %r does not match frames %r"
                            % (mask.shape, sequence.frames.shape[1:]))
    if max_distance_mm <= 0:
        raise PipelineError("max_distance_mm must be positive")
    if median_radius < 1:
        raise PipelineError("median_radius must be at least 1")
    n = len(sequence)
    samples = np.empty(n, dtype=np.float64)
    for start in range(0, n, _CHUNK_FRAMES):
        stop = min(n, start + _CHUNK_FRAMES)
        cube = sequence.frames[start:stop] / float(max_distance_mm)
        cube[cube > 1.0] = 0.0
        cube = np.ascontiguousarray(cube, dtype=np.float32)
        samples[start:stop] = masked_mean_inpainted(cube, mask, median_radius)
    return BreathingSignal(samples=samples, fps=sequence.fps)


def analyze_roi(sequence, mask, cfg=None):
    """Spectral report for the breathing signal of one ROI.

    Uses the configured breathing band for the dominant-frequency search;
    SNR compares the in-band peak against the median magnitude of all
    other non-DC bins.
    """
    from .config import PipelineConfig

    if cfg is None:
        cfg = PipelineConfig()
    sig = extract_breathing_signal(sequence, mask, cfg.max_distance_mm,
                                   cfg.median_radius)
    freqs, mags = pixel_spectrum(sig.samples, sig.fps)
    k_lo, k_hi = band_bins(sig.samples.size, sig.fps,
                           cfg.band_low_hz, cfg.band_high_hz)
    band = mags[k_lo:k_hi + 1]
    k_peak = k_lo + int(np.argmax(band))
    out_of_band = np.concatenate([mags[1:k_lo], mags[k_hi + 1:]])
    floor = float(np.median(out_of_band)) if out_of_band.size else 0.0
    peak = float(band.max())
    if floor > 0.0:
        snr = peak / floor
    else:
        snr = float("inf") if peak > 0.0 else 0.0
    return RoiReport(dominant_freq_hz=float(freqs[k_peak]),
                     in_band_peak_amplitude=peak,
                     spectral_snr=snr,
                     mask_area=int(mask.sum()))


def manual_rectangle_mask(width, height, rect):
    """Mask of a hand-picked rectangle rect = (x, y, w, h), all in pixels."""
    x, y, w, h = (int(v) for v in rect)
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise PipelineError(
            "rectangle (%d, %d, %d, %d) out of bounds for %dx%d frame"
            % (x, y, w, h, width, height))
    mask = np.zeros((height, width), dtype=bool)
    mask[y:y + h, x:x + w] = True
    return mask


def centered_rectangle_mask(reference_mask, area_scale=4.0):
    """A rough rectangular ROI around a reference region.

    The rectangle is centered on the reference centroid, matches the
    aspect ratio of its bounding box, covers area_scale times its area,
    and is clipped to the frame. Stands in for the rectangle a human
    would sketch around the chest.
    """
    ref = np.asarray(reference_mask, dtype=bool)
    if not ref.any():
        raise PipelineError("reference mask is empty")
    height, width = ref.shape
    ys, xs = np.nonzero(ref)
    cy = float(ys.mean())
    cx = float(xs.mean())
    bw = xs.max() - xs.min() + 1
    bh = ys.max() - ys.min() + 1
    area = area_scale * ref.sum()
    ideal_w = (area * bw / bh) ** 0.5
    rw = max(1, min(width, int(round(ideal_w))))
    rh = max(1, min(height, int(round(area / ideal_w))))
    x = int(round(cx - rw / 2.0))
    y = int(round(cy - rh / 2.0))
    x = min(max(x, 0), width - rw)
    y = min(max(y, 0), height - rh)
    return manual_rectangle_mask(width, height, (x, y, rw, rh))
