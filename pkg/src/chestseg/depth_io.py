"""Depth-frame I/O: 16-bit PGM frames, sequence manifests, normalization.

A recording is stored as one binary PGM (P5, maxval 65535, big-endian
samples) per frame plus a small text manifest:

    # comment lines and blanks are ignored
    fps: 10
    width: 320
    height: 240
    ground_truth_mask: truth_mask.pgm
    ground_truth_freq_hz: 0.25
    frames:
    frame_000000.pgm
    frame_000001.pgm

(ground_truth_* keys are optional.)

Frame paths are resolved relative to the manifest's directory. Depth
values are unsigned millimeters; 0 means "no reading".
"""

from dataclasses import dataclass, field
import os

import numpy as np

from .exceptions import ManifestError, PgmError
from .kvfile import format_kv, get_scalar, read_kv_file

PGM_MAXVAL = 65535


def write_pgm16(path, frame):
    """Write a 2-D uint16 array as a binary 16-bit PGM (big-endian)."""
    frame = np.asarray(frame)
    if frame.ndim != 2:
        raise PgmError("expected a 2-D frame, got shape %r" % (frame.shape,))
    if frame.dtype != np.uint16:
        if np.issubdtype(frame.dtype, np.integer) and frame.min() >= 0 and frame.max() <= PGM_MAXVAL:
            frame = frame.astype(np.uint16)
        else:
            raise PgmError("frame dtype %s not storable as 16-bit PGM" % frame.dtype)
    h, w = frame.shape
    header = b"P5\n%d %d\n%d\n" % (w, h, PGM_MAXVAL)
    with open(path, "wb") as f:
        f.write(header)
        f.write(frame.astype(">u2").tobytes())


def _read_pgm_tokens(data, count, path):
    """Pull `count` whitespace-separated header tokens (with # comments)
    out of the byte string; return (tokens, offset just past the single
    whitespace byte that terminates the header)."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        if i == start:
            raise PgmError("%s: truncated PGM header" % path)
        tokens.append(data[start:i])
    if i >= n or not data[i : i + 1].isspace():
        raise PgmError("%s: malformed PGM header" % path)
    return tokens, i + 1


def read_pgm16(path):
    """Read a binary 16-bit PGM written by write_pgm16 (or any P5 file
    with maxval 65535) into a uint16 array."""
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise PgmError("%s: not a binary PGM (missing P5 magic)" % path)
    tokens, offset = _read_pgm_tokens(data[2:], 3, path)
    offset += 2
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError:
        raise PgmError("%s: non-numeric PGM header field" % path)
    if w <= 0 or h <= 0:
        raise PgmError("%s: bad PGM dimensions %dx%d" % (path, w, h))
    if maxval != PGM_MAXVAL:
        raise PgmError("%s: expected 16-bit PGM (maxval 65535), got %d" % (path, maxval))
    need = w * h * 2
    payload = data[offset : offset + need]
    if len(payload) != need:
        raise PgmError("%s: PGM payload truncated (%d of %d bytes)" % (path, len(payload), need))
    return np.frombuffer(payload, dtype=">u2").reshape(h, w).astype(np.uint16)


def save_gray_image(path, grid):
    """Render a per-pixel scalar grid to a grayscale PGM for inspection.

    bool grids write 0/255 (8-bit); uint16 grids write raw 16-bit values;
    other real grids are scaled linearly so min maps to 0 and max to 255,
    rounding half away from the lower level via np.rint.
    """
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise PgmError("expected a 2-D image, got shape %r" % (grid.shape,))
    if grid.dtype == bool:
        img8 = np.where(grid, 255, 0).astype(np.uint8)
    elif grid.dtype == np.uint16:
        write_pgm16(path, grid)
        return
    else:
        g = grid.astype(np.float64)
        if not np.all(np.isfinite(g)):
            raise PgmError("non-finite values in image for %s" % path)
        lo = g.min()
        hi = g.max()
        span = hi - lo if hi > lo else 1.0
        img8 = np.rint((g - lo) / span * 255.0).astype(np.uint8)
    h, w = img8.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img8.tobytes())


def read_gray_image(path):
    """Read back an 8-bit PGM written by save_gray_image (uint8 array)."""
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise PgmError("%s: not a binary PGM (missing P5 magic)" % path)
    tokens, offset = _read_pgm_tokens(data[2:], 3, path)
    offset += 2
    w, h, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise PgmError("%s: expected 8-bit PGM (maxval 255), got %d" % (path, maxval))
    need = w * h
    payload = data[offset : offset + need]
    if len(payload) != need:
        raise PgmError("%s: PGM payload truncated" % path)
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w).copy()


@dataclass
class DepthSequence:
    """An in-memory depth recording: frames is (l, h, w) uint16, fps > 0."""

    frames: np.ndarray
    fps: float

    def __post_init__(self):
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 3:
            raise ValueError("frames must be (l, h, w), got shape %r" % (self.frames.shape,))
        if self.frames.dtype != np.uint16:
            raise ValueError("frames must be uint16, got %s" % self.frames.dtype)
        if not self.fps > 0:
            raise ValueError("fps must be > 0, got %r" % (self.fps,))

    def __len__(self):
        return self.frames.shape[0]

    @property
    def height(self):
        return self.frames.shape[1]

    @property
    def width(self):
        return self.frames.shape[2]


@dataclass
class SequenceManifest:
    """Parsed manifest: metadata plus ordered frame paths (relative to
    the manifest file's directory)."""

    fps: float
    width: int
    height: int
    frame_paths: list = field(default_factory=list)
    ground_truth_mask: str | None = None
    ground_truth_freq_hz: float | None = None

    @classmethod
    def load(cls, path):
        kv, paths = read_kv_file(path)
        fps = get_scalar(kv, "fps", float, path)
        width = get_scalar(kv, "width", int, path)
        height = get_scalar(kv, "height", int, path)
        gt_mask = get_scalar(kv, "ground_truth_mask", str, path, required=False)
        gt_freq = get_scalar(kv, "ground_truth_freq_hz", float, path, required=False)
        if fps <= 0:
            raise ManifestError("%s: fps must be > 0, got %g" % (path, fps))
        if width <= 0 or height <= 0:
            raise ManifestError("%s: bad dimensions %dx%d" % (path, width, height))
        if not paths:
            raise ManifestError("%s: manifest lists no frames" % path)
        return cls(fps=fps, width=width, height=height, frame_paths=list(paths),
                   ground_truth_mask=gt_mask, ground_truth_freq_hz=gt_freq)

    def save(self, path):
        pairs = [("fps", self.fps), ("width", self.width), ("height", self.height)]
        if self.ground_truth_mask is not None:
            pairs.append(("ground_truth_mask", self.ground_truth_mask))
        if self.ground_truth_freq_hz is not None:
            pairs.append(("ground_truth_freq_hz", self.ground_truth_freq_hz))
        with open(path, "w") as f:
            f.write(format_kv(pairs, self.frame_paths))


def load_sequence(manifest_path):
    """Load a depth sequence from a manifest file.

    Frames are loaded in manifest order; raw values are untouched.
    Missing files and dimension mismatches are reported with the frame
    index and file name.
    """
    manifest = SequenceManifest.load(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    frames = np.empty((len(manifest.frame_paths), manifest.height, manifest.width),
                      dtype=np.uint16)
    for idx, rel in enumerate(manifest.frame_paths):
        fpath = os.path.join(base, rel)
        if not os.path.exists(fpath):
            raise ManifestError("%s: frame %d: file not found: %s"
                                % (manifest_path, idx, rel))
        frame = read_pgm16(fpath)
        if frame.shape != (manifest.height, manifest.width):
            raise ManifestError(
                "%s: frame %d (%s): dimension mismatch, got %dx%d, manifest says %dx%d"
                % (manifest_path, idx, rel, frame.shape[1], frame.shape[0],
                   manifest.width, manifest.height))
        frames[idx] = frame
    return DepthSequence(frames=frames, fps=manifest.fps)


def normalize_frame(frame, max_distance_mm=3000.0):
    """Map raw depth to [0, 1]: values above max_distance_mm become 0
    (invalid, same as sensor dropouts), the rest scale linearly."""
    if not max_distance_mm > 0:
        raise ValueError("max_distance_mm must be > 0, got %r" % (max_distance_mm,))
    out = np.asarray(frame, dtype=np.float64) / float(max_distance_mm)
    out[out > 1.0] = 0.0
    return out
