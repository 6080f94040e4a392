"""Synthetic sleeping-patient depth scenes with known ground truth.

A phantom is a flat bed plane with an elliptical body lying on it and a
smaller elliptical chest patch whose depth oscillates sinusoidally at a
known breathing frequency. Optional noise terms mimic depth-sensor
behaviour: Gaussian noise growing with distance from the image center,
depth flicker on the body silhouette, and random dropout ("pepper")
pixels. Optional posture events translate the body partway through the
recording.

Everything is deterministic given (spec, seed): frame t draws from
np.random.default_rng([seed, t]).
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .depth_io import DepthSequence
from .exceptions import ConfigError
from .kvfile import format_kv, get_scalar, read_kv_file
from ._kernels import binary_dilate, binary_erode


@dataclass
class PhantomSpec:
    """Full description of a synthetic scene.

    Centers/axes are in pixels, (x, y) order; depths in millimeters.
    posture_events is a sequence of (time_s, (dx, dy)) translations that
    accumulate from their event time onward.
    """

    width: int = 320
    height: int = 240
    fps: float = 10.0
    duration_s: float = 120.0
    bed_depth_mm: float = 2800.0
    body_center: tuple = (160.0, 120.0)
    body_axes: tuple = (90.0, 55.0)
    body_depth_mm: float = 2300.0
    chest_center: tuple = (120.0, 115.0)
    chest_axes: tuple = (32.0, 30.0)
    breathing_amplitude_mm: float = 5.0
    breathing_freq_hz: float = 0.25
    second_harmonic_frac: float = 0.0
    pepper_prob: float = 0.05
    radial_noise_gain_mm: float = 10.0
    edge_flicker_mm: float = 20.0
    posture_events: tuple = field(default_factory=tuple)

    @property
    def n_frames(self):
        return int(round(self.duration_s * self.fps))

    def validate(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("phantom dimensions must be positive")
        if self.fps <= 0 or self.duration_s <= 0:
            raise ConfigError("fps and duration_s must be positive")
        if not 0.0 < self.breathing_freq_hz < self.fps / 2.0:
            raise ConfigError(
                "breathing_freq_hz must lie in (0, fps/2), got %g at fps %g"
                % (self.breathing_freq_hz, self.fps))
        if not 0.0 <= self.pepper_prob <= 1.0:
            raise ConfigError("pepper_prob must be in [0, 1]")
        if self.breathing_amplitude_mm < 0:
            raise ConfigError("breathing_amplitude_mm must be >= 0")
        if not 0.0 < self.body_depth_mm < self.bed_depth_mm:
            raise ConfigError("body must sit closer to the camera than the bed")
        body = ellipse_mask(self.height, self.width, self.body_center, self.body_axes)
        chest = ellipse_mask(self.height, self.width, self.chest_center, self.chest_axes)
        if not body.any():
            raise ConfigError("body ellipse covers no pixels")
        if not chest.any():
            raise ConfigError("chest ellipse covers no pixels")
        if (chest & ~body).any():
            raise ConfigError("chest region must lie inside the body region")
        for time_s, (dx, dy) in self.posture_events:
            if time_s < 0:
                raise ConfigError("posture event times must be >= 0")
        for _ in self._epochs():
            pass  # raises if a translation pushes the body out of frame


    def _epochs(self):
        """Yield (start_frame, body_mask, chest_mask) per posture epoch."""
        events = sorted(self.posture_events, key=lambda e: e[0])
        offsets = [(0, 0.0, 0.0)]
        ox = oy = 0.0
        for time_s, (dx, dy) in events:
            start = int(round(time_s * self.fps))
            ox += dx
            oy += dy
            if start <= offsets[-1][0]:
                offsets[-1] = (offsets[-1][0], ox, oy)
            else:
                offsets.append((start, ox, oy))
        for start, ox, oy in offsets:
            bc = (self.body_center[0] + ox, self.body_center[1] + oy)
            cc = (self.chest_center[0] + ox, self.chest_center[1] + oy)
            if (bc[0] - self.body_axes[0] < 0 or bc[0] + self.body_axes[0] > self.width - 1
                    or bc[1] - self.body_axes[1] < 0
                    or bc[1] + self.body_axes[1] > self.height - 1):
                raise ConfigError(
                    "posture translation pushes the body out of frame at frame %d" % start)
            body = ellipse_mask(self.height, self.width, bc, self.body_axes)
            chest = ellipse_mask(self.height, self.width, cc, self.chest_axes)
            yield start, body, chest


def ellipse_mask(height, width, center, axes):
    """Boolean mask of the filled ellipse ((x-cx)/a)^2 + ((y-cy)/b)^2 <= 1."""
    cx, cy = center
    a, b = axes
    y, x = np.mgrid[0:height, 0:width]
    return ((x - cx) / a) ** 2 + ((y - cy) / b) ** 2 <= 1.0


def chest_depth_mm(spec, t):
    """Noise-free chest depth (float, mm) at frame index t.

    depth = body_depth - A * (sin(2*pi*f*t/fps) + h2 * sin(4*pi*f*t/fps))
    where h2 is the optional second-harmonic fraction.
    """
    phase = 2.0 * math.pi * spec.breathing_freq_hz * t / spec.fps
    motion = math.sin(phase)
    if spec.second_harmonic_frac:
        motion += spec.second_harmonic_frac * math.sin(2.0 * phase)
    return spec.body_depth_mm - spec.breathing_amplitude_mm * motion


@dataclass
class GroundTruth:
    """Known answers for a generated phantom.

    chest_mask is the breathing-modulated region at frame 0; epochs maps
    the whole recording as ((start_frame, chest_mask), ...) when posture
    events move the body (a single epoch otherwise).
    """

    chest_mask: np.ndarray
    breathing_freq_hz: float
    epochs: tuple = ()

    def mask_at(self, t):
        """Chest mask in force at frame index t."""
        current = self.chest_mask
        for start, mask in self.epochs:
            if start <= t:
                current = mask
            else:
                break
        return current


def generate_phantom(spec, seed):
    """Render the phantom as a uint16 depth sequence plus ground truth.

    Per frame, in order: ideal geometry (bed plane, body ellipse, chest
    oscillation), Gaussian noise with stddev = radial_noise_gain_mm *
    (distance from frame center / half-diagonal), uniform +/-
    edge_flicker_mm on the one-pixel band around the body silhouette,
    dropout to 0 with probability pepper_prob, then rounding to integer
    millimeters. Identical (spec, seed) gives bit-identical output.
    """
    spec.validate()
    h, w = spec.height, spec.width
    n = spec.n_frames
    epochs = list(spec._epochs())

    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w]
    half_diag = math.hypot(cx, cy)
    sigma = spec.radial_noise_gain_mm * np.hypot(xx - cx, yy - cy) / half_diag

    frames = np.empty((n, h, w), dtype=np.uint16)
    ei = 0
    base = edge_band = chest = None
    for t in range(n):
        while ei < len(epochs) and epochs[ei][0] <= t:
            _, body, chest = epochs[ei]
            base = np.full((h, w), spec.bed_depth_mm, dtype=np.float64)
            base[body] = spec.body_depth_mm
            edge_band = binary_dilate(body, 1) & ~binary_erode(body, 1)
            ei += 1
        frame = base.copy()
        frame[chest] = chest_depth_mm(spec, t)
        rng = np.random.default_rng([seed, t])
        if spec.radial_noise_gain_mm > 0:
            frame += rng.standard_normal((h, w)) * sigma
        if spec.edge_flicker_mm > 0:
            k = int(edge_band.sum())
            frame[edge_band] += rng.uniform(-spec.edge_flicker_mm,
                                            spec.edge_flicker_mm, k)
        if spec.pepper_prob > 0:
            frame[rng.random((h, w)) < spec.pepper_prob] = 0.0
        frames[t] = np.clip(np.rint(frame), 0, 65535).astype(np.uint16)

    truth_epochs = tuple((start, chest) for start, _, chest in epochs)
    truth = GroundTruth(chest_mask=truth_epochs[0][1],
                        breathing_freq_hz=spec.breathing_freq_hz,
                        epochs=truth_epochs)
    return DepthSequence(frames=frames, fps=spec.fps), truth


def default_phantom_spec():
    """The stock 320x240, 10 fps, 120 s scene used throughout the tests."""
    return PhantomSpec()


def apply_posture_events(sequence, events):
    """Translate frame content from each event time onward.

    events: sequence of (time_s, (dx, dy)); translations accumulate.
    Vacated bands are filled by replicating the frame edge. Use
    PhantomSpec.posture_events instead when exact per-epoch ground truth
    matters; this operation works on arbitrary recordings and cannot
    distinguish body from background.
    """
    frames = sequence.frames
    n, h, w = frames.shape
    out = frames.copy()
    ox = oy = 0
    steps = sorted(((int(round(ts * sequence.fps)), int(dx), int(dy))
                    for ts, (dx, dy) in events), key=lambda s: s[0])
    cum = []
    for start, dx, dy in steps:
        ox += dx
        oy += dy
        if abs(ox) >= w or abs(oy) >= h:
            raise ConfigError("posture translation out of bounds at frame %d" % start)
        cum.append((start, ox, oy))
    for i, (start, ox, oy) in enumerate(cum):
        if start >= n or (ox == 0 and oy == 0):
            continue
        stop = cum[i + 1][0] if i + 1 < len(cum) else n
        stop = min(stop, n)
        if stop <= start:
            continue
        chunk = frames[max(start, 0):stop]
        pads = ((0, 0),
                (max(oy, 0), max(-oy, 0)),
                (max(ox, 0), max(-ox, 0)))
        padded = np.pad(chunk, pads, mode="edge")
        out[max(start, 0):stop] = padded[:,
                                         max(-oy, 0):max(-oy, 0) + h,
                                         max(-ox, 0):max(-ox, 0) + w]
    return DepthSequence(frames=out, fps=sequence.fps)


_SPEC_KEYS = {
    "width": int, "height": int, "fps": float, "duration_s": float,
    "bed_depth_mm": float, "body_depth_mm": float,
    "breathing_amplitude_mm": float, "breathing_freq_hz": float,
    "second_harmonic_frac": float, "pepper_prob": float,
    "radial_noise_gain_mm": float, "edge_flicker_mm": float,
}


def load_phantom_spec(path):
    """Read a phantom spec file (same key/value grammar as manifests).

    Pair keys: body_center_x/y, body_axis_x/y, chest_center_x/y,
    chest_axis_x/y. Repeatable key: posture_event: "<time_s> <dx> <dy>".
    Unknown keys are rejected. Missing keys keep their defaults.
    """
    kv, extra_paths = read_kv_file(path)
    if extra_paths:
        raise ConfigError("%s: phantom specs take no frame list" % path)
    spec = PhantomSpec()
    pair_keys = {"body_center": "body_center", "body_axis": "body_axes",
                 "chest_center": "chest_center", "chest_axis": "chest_axes"}
    known = set(_SPEC_KEYS) | {"posture_event"}
    known |= {k + "_" + c for k in pair_keys for c in "xy"}
    for key in kv:
        if key not in known:
            raise ConfigError("%s: unknown phantom key %r" % (path, key))
    updates = {}
    for key, conv in _SPEC_KEYS.items():
        val = get_scalar(kv, key, conv, path, required=False)
        if val is not None:
            updates[key] = val
    for file_key, attr in pair_keys.items():
        x = get_scalar(kv, file_key + "_x", float, path, required=False)
        y = get_scalar(kv, file_key + "_y", float, path, required=False)
        cur = getattr(spec, attr)
        if x is not None or y is not None:
            updates[attr] = (cur[0] if x is None else x, cur[1] if y is None else y)
    events = kv.get("posture_event", [])
    if isinstance(events, str):
        events = [events]
    parsed = []
    for ev in events:
        parts = ev.split()
        if len(parts) != 3:
            raise ConfigError(
                "%s: posture_event wants '<time_s> <dx> <dy>', got %r" % (path, ev))
        try:
            ts, dx, dy = float(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError("%s: bad posture_event %r" % (path, ev))
        parsed.append((ts, (dx, dy)))
    if parsed:
        updates["posture_events"] = tuple(parsed)
    spec = replace(spec, **updates)
    spec.validate()
    return spec


def save_phantom_spec(spec, path):
    """Write a spec file that load_phantom_spec reads back equivalently."""
    pairs = [(k, getattr(spec, k)) for k in _SPEC_KEYS]
    for file_key, attr in (("body_center", "body_center"), ("body_axis", "body_axes"),
                           ("chest_center", "chest_center"), ("chest_axis", "chest_axes")):
        val = getattr(spec, attr)
        pairs.append((file_key + "_x", val[0]))
        pairs.append((file_key + "_y", val[1]))
    for ts, (dx, dy) in spec.posture_events:
        pairs.append(("posture_event", "%g %d %d" % (ts, dx, dy)))
    with open(path, "w") as f:
        f.write(format_kv(pairs))
