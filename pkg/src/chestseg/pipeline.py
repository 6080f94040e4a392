"""End-to-end segmentation: normalize, inpaint, build per-segment ignore
masks, threshold in-band spectral amplitude, refine, and aggregate the
per-segment votes into a confidence map and final mask.

Assumes the recording shows a single sleeping patient: a mostly static
scene where the only sustained periodic motion is breathing. Segments
overlapping a detected posture change are dropped from the vote.

Segments are scheduled over a thread pool; kernels release the GIL. The
worker count comes from the CHESTSEG_WORKERS environment variable
(default 1) and never affects results, only wall time.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os

import numpy as np

from .config import PipelineConfig
from .exceptions import ChestsegError, PipelineError
from .noise import build_ignore_mask, default_margin, preprocess_frames
from .spectral import (
    SegmentConfig,
    band_limited_amplitude,
    iter_segments,
    segment_frames,
    threshold_amplitude,
)
from .morph import refine_segment_mask
from .temporal import (
    accumulate,
    motion_transition_flags,
    segment_has_motion,
    threshold_confidence,
    to_confidence,
)


@dataclass
class SegmentResult:
    """Everything computed for one time segment."""

    start: int
    ignore: np.ndarray
    amplitude: np.ndarray
    raw_mask: np.ndarray
    refined_mask: np.ndarray
    has_motion: bool


@dataclass
class PipelineResult:
    """Sequence-level output of segment_sequence."""

    confidence: np.ndarray
    mask: np.ndarray
    segments: tuple
    valid_segments: int
    ignore_union: np.ndarray


def worker_count():
    """Thread count from CHESTSEG_WORKERS (default 1)."""
    raw = os.environ.get("CHESTSEG_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise PipelineError("CHESTSEG_WORKERS must be an integer, got %r" % raw)
    if n < 1:
        raise PipelineError("CHESTSEG_WORKERS must be >= 1, got %d" % n)
    return n


def build_segment_config(cfg, fps):
    """Turn second-based config values into a frame-based SegmentConfig."""
    length = segment_frames(fps, cfg.segment_seconds)
    if cfg.stride_seconds is None:
        stride = length
    else:
        stride = max(1, int(round(cfg.stride_seconds * fps)))
    seg_cfg = SegmentConfig(segment_len=length, segment_stride=stride,
                            band_low_hz=cfg.band_low_hz,
                            band_high_hz=cfg.band_high_hz,
                            amp_threshold_frac=cfg.amp_threshold_frac,
                            window=cfg.window)
    seg_cfg.validate(fps)
    return seg_cfg


def _analyze_segment(start, window, seg_cfg, cfg, margin, min_area, fps,
                     transition_flags):
    reference = np.median(window, axis=0).astype(np.float64)
    ignore = build_ignore_mask(reference, margin, cfg.canny_low, cfg.canny_high,
                               cfg.dilate_radius, cfg.canny_sigma)
    amplitude = band_limited_amplitude(window, ignore, seg_cfg, fps)
    raw_mask = threshold_amplitude(amplitude, seg_cfg, ignore)
    refined = refine_segment_mask(raw_mask, cfg.open_radius, cfg.close_radius,
                                  min_area, ignore=ignore)
    motion = segment_has_motion(start, seg_cfg.segment_len, transition_flags)
    return SegmentResult(start=start, ignore=ignore, amplitude=amplitude,
                         raw_mask=raw_mask, refined_mask=refined,
                         has_motion=motion)


def segment_sequence(sequence, cfg=None, workers=None):
    """Segment the breathing-influenced region of a depth recording.

    Returns a PipelineResult; deterministic for fixed (sequence, cfg)
    regardless of worker count. Raises PipelineError when the recording
    is shorter than one segment or no segment is free of posture motion.
    """
    if cfg is None:
        cfg = PipelineConfig()
    cfg.validate()
    fps = sequence.fps
    seg_cfg = build_segment_config(cfg, fps)
    h, w = sequence.frames.shape[1:]
    margin = default_margin(w) if cfg.margin is None else cfg.margin
    min_area = int(round(cfg.min_area_frac * h * w))
    if workers is None:
        workers = worker_count()

    cube = preprocess_frames(sequence.frames, cfg.max_distance_mm,
                             cfg.median_radius)
    transition_flags = motion_transition_flags(cube, cfg.motion_threshold)

    jobs = list(iter_segments(cube, seg_cfg))

    def run(job):
        start, window = job
        try:
            return _analyze_segment(start, window, seg_cfg, cfg, margin,
                                    min_area, fps, transition_flags)
        except ChestsegError as exc:
            raise PipelineError(
                "segment starting at frame %d: %s" % (start, exc)) from exc

    if workers == 1 or len(jobs) == 1:
        segments = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            segments = list(pool.map(run, jobs))

    valid = [s for s in segments if not s.has_motion]
    if not valid:
        raise PipelineError(
            "every segment overlaps posture motion; nothing to accumulate")
    hist = accumulate([s.refined_mask for s in valid])
    confidence = to_confidence(hist, len(valid))
    ignore_union = np.zeros((h, w), dtype=bool)
    for s in valid:
        ignore_union |= s.ignore
    mask = threshold_confidence(confidence, cfg.conf_threshold) & ~ignore_union
    return PipelineResult(confidence=confidence, mask=mask,
                          segments=tuple(segments), valid_segments=len(valid),
                          ignore_union=ignore_union)
