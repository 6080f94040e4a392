"""Per-pixel temporal spectral analysis over time segments.

A recording is cut into fixed-length windows of frames. Within each
window, every pixel's time series is mean-removed and transformed with
the DFT; the maximal magnitude over the bins inside the breathing band
forms an amplitude image, and a fraction-of-max threshold turns that
into a candidate chest mask for the segment.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._kernels import band_magnitude_max
from .exceptions import ConfigError, PipelineError

DEFAULT_BAND_LOW_HZ = 0.2
DEFAULT_BAND_HIGH_HZ = 0.33
DEFAULT_AMP_FRAC = 0.3
DEFAULT_SEGMENT_SECONDS = 30.0

WINDOW_KINDS = ("rect", "hann")


@dataclass
class SegmentConfig:
    """Per-segment analysis parameters (lengths in frames)."""

    segment_len: int
    segment_stride: int
    band_low_hz: float = DEFAULT_BAND_LOW_HZ
    band_high_hz: float = DEFAULT_BAND_HIGH_HZ
    amp_threshold_frac: float = DEFAULT_AMP_FRAC
    window: str = "rect"

    def validate(self, fps):
        if self.segment_len < 2:
            raise ConfigError("segment_len must be >= 2 frames")
        if not 1 <= self.segment_stride <= self.segment_len:
            raise ConfigError("segment_stride must be in [1, segment_len]")
        if not 0.0 < self.band_low_hz < self.band_high_hz < fps / 2.0:
            raise ConfigError(
                "need 0 < band_low < band_high < fps/2; got [%g, %g] Hz at %g fps"
                % (self.band_low_hz, self.band_high_hz, fps))
        if not 0.0 < self.amp_threshold_frac < 1.0:
            raise ConfigError("amp_threshold_frac must be in (0, 1)")
        if self.window not in WINDOW_KINDS:
            raise ConfigError("window must be one of %s" % (WINDOW_KINDS,))
        band_bins(self.segment_len, fps, self.band_low_hz, self.band_high_hz)


def segment_frames(fps, seconds):
    """Frame count for a window of the given duration."""
    n = int(round(seconds * fps))
    if n < 2:
        raise ConfigError("segment of %g s is under 2 frames at %g fps" % (seconds, fps))
    return n


def band_bins(length, fps, low_hz, high_hz):
    """DFT bin range [k_lo, k_hi] whose frequencies k*fps/length fall in
    [low_hz, high_hz]; the DC bin is never included."""
    k_lo = max(1, int(math.ceil(low_hz * length / fps - 1e-9)))
    k_hi = min(length // 2, int(math.floor(high_hz * length / fps + 1e-9)))
    if k_lo > k_hi:
        raise ConfigError(
            "band [%g, %g] Hz holds no DFT bin for %d-frame segments at %g fps"
            % (low_hz, high_hz, length, fps))
    return k_lo, k_hi


def window_weights(length, kind):
    if kind == "rect":
        return np.ones(length, dtype=np.float64)
    if kind == "hann":
        return np.hanning(length)
    raise ConfigError("window must be one of %s" % (WINDOW_KINDS,))


def pixel_spectrum(signal, fps):
    """One-sided DFT of a single pixel's time series.

    Returns (freqs_hz, magnitudes) for bins k = 0..L//2 at k*fps/L;
    magnitudes are |X_k| of the unnormalized forward DFT of the
    mean-removed signal (so the DC magnitude is always ~0).
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("signal must be 1-D with at least 2 samples")
    x = x - x.mean()
    mags = np.abs(np.fft.rfft(x))
    freqs = np.arange(mags.size) * (fps / x.size)
    return freqs, mags


def band_limited_amplitude(segment, ignore, cfg, fps):
    """Per-pixel maximal in-band DFT magnitude for one segment.

    segment: (L, h, w) inpainted normalized frames with L ==
    cfg.segment_len; ignored pixels come back as 0.
    """
    segment = np.ascontiguousarray(segment)
    L = segment.shape[0]
    if L != cfg.segment_len:
        raise PipelineError(
            "segment holds %d frames, config says %d" % (L, cfg.segment_len))
    k_lo, k_hi = band_bins(L, fps, cfg.band_low_hz, cfg.band_high_hz)
    window = window_weights(L, cfg.window)
    ignore = np.ascontiguousarray(ignore, dtype=bool)
    return band_magnitude_max(segment, k_lo, k_hi, window, ignore)


def threshold_amplitude(amp, cfg, ignore=None):
    """Candidate chest pixels: amplitude >= frac * (max over the image).

    All-false when the image is all zero. Ignored pixels carry amplitude
    0 so they can never pass the (positive) threshold.
    """
    peak = float(amp.max()) if amp.size else 0.0
    if peak <= 0.0:
        return np.zeros(amp.shape, dtype=bool)
    mask = amp >= cfg.amp_threshold_frac * peak
    if ignore is not None:
        mask &= ~np.asarray(ignore, dtype=bool)
    return mask


def iter_segments(frames, cfg):
    """Yield (start_frame, window) with starts 0, stride, 2*stride, ...;
    a final partial window is dropped."""
    n = frames.shape[0]
    if n < cfg.segment_len:
        raise PipelineError(
            "sequence of %d frames is shorter than one segment (%d frames)"
            % (n, cfg.segment_len))
    for start in range(0, n - cfg.segment_len + 1, cfg.segment_stride):
        yield start, frames[start:start + cfg.segment_len]
