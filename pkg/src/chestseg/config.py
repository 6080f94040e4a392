"""Pipeline configuration: one dataclass holding every tunable, with a
key/value file representation (same grammar as manifests).

Example config file::

    max_distance_mm: 3000
    margin: auto
    segment_seconds: 30
    band_low_hz: 0.2
    band_high_hz: 0.33
    conf_threshold: 0.5

Unknown keys are rejected; missing keys keep their defaults. CLI flags
override file values.
"""

from dataclasses import dataclass, fields, replace

from .exceptions import ConfigError
from .kvfile import format_kv, read_kv_file
from .spectral import WINDOW_KINDS


@dataclass
class PipelineConfig:
    """Every knob of the segmentation pipeline.

    margin=None means "auto": 50 px at frame width 640, scaled by
    width/640 otherwise. stride_seconds=None means non-overlapping
    segments (stride = segment length).
    """

    max_distance_mm: float = 3000.0
    median_radius: int = 10
    margin: int | None = None
    canny_low: float = 0.1
    canny_high: float = 0.25
    canny_sigma: float = 1.4
    dilate_radius: int = 4
    segment_seconds: float = 30.0
    stride_seconds: float | None = None
    band_low_hz: float = 0.2
    band_high_hz: float = 0.33
    amp_threshold_frac: float = 0.3
    window: str = "rect"
    open_radius: int = 1
    close_radius: int = 2
    min_area_frac: float = 0.0005
    conf_threshold: float = 0.5
    motion_threshold: float = 0.01

    def validate(self):
        if self.max_distance_mm <= 0:
            raise ConfigError("max_distance_mm must be > 0")
        if self.median_radius < 1:
            raise ConfigError("median_radius must be >= 1")
        if self.margin is not None and self.margin < 0:
            raise ConfigError("margin must be >= 0 (or auto)")
        if not 0.0 <= self.canny_low <= self.canny_high:
            raise ConfigError("need 0 <= canny_low <= canny_high")
        if self.canny_sigma <= 0:
            raise ConfigError("canny_sigma must be > 0")
        if self.dilate_radius < 0 or self.open_radius < 0 or self.close_radius < 0:
            raise ConfigError("radii must be >= 0")
        if self.segment_seconds <= 0:
            raise ConfigError("segment_seconds must be > 0")
        if self.stride_seconds is not None and not 0 < self.stride_seconds <= self.segment_seconds:
            raise ConfigError("stride_seconds must be in (0, segment_seconds]")
        if not 0.0 < self.band_low_hz < self.band_high_hz:
            raise ConfigError("need 0 < band_low_hz < band_high_hz")
        if not 0.0 < self.amp_threshold_frac < 1.0:
            raise ConfigError("amp_threshold_frac must be in (0, 1)")
        if self.window not in WINDOW_KINDS:
            raise ConfigError("window must be one of %s" % (WINDOW_KINDS,))
        if not 0.0 <= self.min_area_frac < 1.0:
            raise ConfigError("min_area_frac must be in [0, 1)")
        if not 0.0 < self.conf_threshold <= 1.0:
            raise ConfigError("conf_threshold must be in (0, 1]")
        if self.motion_threshold < 0:
            raise ConfigError("motion_threshold must be >= 0")
        return self

    @classmethod
    def from_file(cls, path):
        kv, extra_paths = read_kv_file(path)
        if extra_paths:
            raise ConfigError("%s: config files take no frame list" % path)
        valid = {f.name: f for f in fields(cls)}
        updates = {}
        for key, raw in kv.items():
            if key not in valid:
                raise ConfigError("%s: unknown config key %r" % (path, key))
            if isinstance(raw, list):
                raise ConfigError("%s: duplicate config key %r" % (path, key))
            updates[key] = _parse_value(key, raw, path)
        cfg = replace(cls(), **updates)
        cfg.validate()
        return cfg

    def to_file(self, path):
        pairs = []
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                val = "auto" if f.name == "margin" else "none"
            pairs.append((f.name, val))
        with open(path, "w") as fh:
            fh.write(format_kv(pairs))


_INT_KEYS = {"median_radius", "margin", "dilate_radius", "open_radius",
             "close_radius"}
_STR_KEYS = {"window"}


def _parse_value(key, raw, path):
    if key == "margin" and raw == "auto":
        return None
    if key == "stride_seconds" and raw == "none":
        return None
    try:
        if key in _STR_KEYS:
            return raw
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError("%s: bad value %r for config key %r" % (path, raw, key))
