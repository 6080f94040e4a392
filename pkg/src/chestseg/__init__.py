"""chestseg: chest-region segmentation and breathing-signal extraction
from depth video, via per-pixel temporal spectral analysis.

Typical use::

    from chestseg import default_phantom_spec, generate_phantom
    from chestseg import PipelineConfig, segment_sequence, analyze_roi

    seq, truth = generate_phantom(default_phantom_spec(), seed=7)
    result = segment_sequence(seq, PipelineConfig())
    report = analyze_roi(seq, result.mask, PipelineConfig())
"""

__version__ = "0.1.0"

from .exceptions import (
    ChestsegError,
    ConfigError,
    ManifestError,
    PgmError,
    PipelineError,
)
from .depth_io import (
    DepthSequence,
    SequenceManifest,
    load_sequence,
    normalize_frame,
    read_pgm16,
    save_gray_image,
    write_pgm16,
)
from .phantom import (
    GroundTruth,
    PhantomSpec,
    apply_posture_events,
    default_phantom_spec,
    generate_phantom,
)
from .config import PipelineConfig
from .pipeline import PipelineResult, segment_sequence
from .breathing import (
    BreathingSignal,
    RoiReport,
    analyze_roi,
    centered_rectangle_mask,
    extract_breathing_signal,
    manual_rectangle_mask,
)

__all__ = [
    "ChestsegError",
    "ConfigError",
    "ManifestError",
    "PgmError",
    "PipelineError",
    "DepthSequence",
    "SequenceManifest",
    "load_sequence",
    "normalize_frame",
    "read_pgm16",
    "save_gray_image",
    "write_pgm16",
    "GroundTruth",
    "PhantomSpec",
    "apply_posture_events",
    "default_phantom_spec",
    "generate_phantom",
    "PipelineConfig",
    "PipelineResult",
    "segment_sequence",
    "BreathingSignal",
    "RoiReport",
    "analyze_roi",
    "centered_rectangle_mask",
    "extract_breathing_signal",
    "manual_rectangle_mask",
    "__version__",
]
