"""Sequence-level aggregation of per-segment masks.

Each analyzed segment votes for the pixels it flagged; votes become a
histogram, the histogram normalizes to a confidence map, and a final
threshold keeps only the most consistently detected pixels. Segments
containing large frame-to-frame motion (posture changes) are excluded
from both the votes and the denominator.
"""

import numpy as np

from .exceptions import PipelineError

DEFAULT_CONF_THRESHOLD = 0.5
DEFAULT_MOTION_THRESHOLD = 0.01


def accumulate(masks):
    """Per-pixel count of how many masks are true there."""
    it = iter(masks)
    try:
        first = next(it)
    except StopIteration:
        raise PipelineError("accumulate needs at least one mask")
    hist = np.asarray(first, dtype=np.int64).copy()
    for i, mask in enumerate(it, start=1):
        mask = np.asarray(mask)
        if mask.shape != hist.shape:
            raise PipelineError(
                "mask %d has shape %r, expected %r" % (i, mask.shape, hist.shape))
        hist += mask
    return hist


def to_confidence(hist, total_segments):
    """Normalize vote counts to [0, 1] by the number of segments."""
    hist = np.asarray(hist)
    if total_segments < int(hist.max(initial=0)):
        raise PipelineError(
            "histogram peak %d exceeds total_segments %d"
            % (int(hist.max()), total_segments))
    if total_segments <= 0:
        raise PipelineError("total_segments must be >= 1")
    return hist / float(total_segments)


def threshold_confidence(conf, c):
    """Final segmentation: confidence >= c."""
    if not 0.0 < c <= 1.0:
        raise PipelineError("confidence threshold must be in (0, 1], got %r" % (c,))
    return np.asarray(conf) >= c


def motion_transition_flags(frames, motion_threshold=DEFAULT_MOTION_THRESHOLD):
    """Flag frame transitions with large global change.

    frames: (l, h, w) inpainted normalized cube; entry t is true when the
    mean absolute difference between frames t and t+1 exceeds the
    threshold (length l-1). Breathing moves a few mm over a small patch,
    orders of magnitude below a posture change.
    """
    frames = np.asarray(frames)
    if frames.shape[0] < 2:
        return np.zeros(0, dtype=bool)
    flags = np.empty(frames.shape[0] - 1, dtype=bool)
    for t in range(flags.size):
        diff = np.abs(np.subtract(frames[t + 1], frames[t], dtype=np.float64))
        flags[t] = diff.mean() > motion_threshold
    return flags


def segment_has_motion(start, length, transition_flags):
    """True when any flagged transition falls inside [start, start+length)."""
    stop = min(start + length - 1, transition_flags.size)
    return bool(transition_flags[start:stop].any())
