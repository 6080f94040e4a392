"""Line-oriented key/value file grammar shared by manifests, phantom specs
and pipeline config files.

Grammar (one record per line):

    # comment (full-line only)
    <key>: <value...>         key = first token; the trailing colon is
                              optional ("fps: 10" and "fps 10" both parse)
    frames:                   optional section marker; every following
    <path>                    non-empty line is taken verbatim as a path

Blank lines are ignored. Keys may repeat; repeated keys collect into a list.
"""

from .exceptions import ConfigError


def parse_kv_text(text, path="<string>"):
    """Parse key/value lines. Returns (dict of key -> str or [str, ...], paths list).

    The paths list is empty unless a ``frames:`` marker line is present.
    """
    kv = {}
    paths = []
    in_paths = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_paths:
            paths.append(line)
            continue
        if line == "frames:":
            in_paths = True
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'key: value', got {line!r}")
        key, value = parts[0].rstrip(":"), parts[1].strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key in {line!r}")
        if key in kv:
            prev = kv[key]
            if isinstance(prev, list):
                prev.append(value)
            else:
                kv[key] = [prev, value]
        else:
            kv[key] = value
    return kv, paths


def read_kv_file(path):
    """Read and parse a key/value file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_kv_text(text, path=str(path))


def format_kv(pairs, paths=None):
    """Render (key, value) pairs and an optional path list back to file text.

    ``pairs`` is an iterable of (key, value); values are converted with str().
    Repeated keys are written as repeated lines.
    """
    lines = [f"{key}: {value}" for key, value in pairs]
    if paths:
        lines.append("frames:")
        lines.extend(str(p) for p in paths)
    return "\n".join(lines) + "\n"


def get_scalar(kv, key, convert, path, required=True, default=None):
    """Fetch a single typed value from a parsed kv dict."""
    if key not in kv:
        if required:
            raise ConfigError(f"{path}: missing required key {key!r}")
        return default
    value = kv[key]
    if isinstance(value, list):
        raise ConfigError(f"{path}: key {key!r} given more than once")
    try:
        return convert(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad value for {key!r}: {value!r}") from exc
