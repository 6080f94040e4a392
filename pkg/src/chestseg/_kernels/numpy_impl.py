"""Pure-numpy implementations of the hot per-pixel kernels.

Every function here has a numba twin in ``numba_impl`` with identical
semantics; ``chestseg._kernels`` picks one of the two at import time.
"""

import numpy as np


def _window_medians(frame, zi, zj, radius):
    """Median of non-zero window values around each (zi, zj); 0 where a
    window holds none."""
    size = 2 * radius + 1
    padded = np.pad(frame, radius, mode="constant", constant_values=0)
    di = np.repeat(np.arange(size), size)
    dj = np.tile(np.arange(size), size)
    # windows: one row of (2r+1)^2 samples per target pixel
    wins = padded[zi[:, None] + di[None, :], zj[:, None] + dj[None, :]]
    counts = np.count_nonzero(wins, axis=1)
    wins = np.where(wins > 0, wins, np.inf)
    wins.sort(axis=1)
    rows = np.arange(zi.size)
    safe = np.maximum(counts, 1)
    lo = wins[rows, (safe - 1) // 2]
    hi = wins[rows, safe // 2]
    med = (lo + hi) / 2.0
    return np.where(counts > 0, med, 0.0)


def median_inpaint(frame, radius):
    """Replace zero pixels by the median of non-zero values in their
    (2*radius+1)^2 window, taken on the original frame.

    Non-zero pixels pass through; a zero pixel whose window holds no
    non-zero value stays zero.
    """
    out = frame.copy()
    zi, zj = np.nonzero(frame == 0)
    if zi.size == 0:
        return out
    out[zi, zj] = _window_medians(frame, zi, zj, radius).astype(out.dtype)
    return out


def preprocess_cube(frames, max_distance_mm, radius, out):
    """Normalize each frame to [0, 1] (values beyond max_distance_mm
    become 0/invalid) and median-inpaint the zeros, writing into out."""
    for t in range(frames.shape[0]):
        norm = frames[t] / float(max_distance_mm)
        norm[norm > 1.0] = 0.0
        out[t] = median_inpaint(norm.astype(np.float32), radius)


def _slide_or(mask, radius, axis):
    if radius <= 0:
        return mask.copy()
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(mask, pad, mode="constant", constant_values=False)
    n = mask.shape[axis]
    out = np.zeros_like(mask)
    for k in range(2 * radius + 1):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(k, k + n)
        out |= padded[tuple(sl)]
    return out


def _slide_and(mask, radius, axis):
    if radius <= 0:
        return mask.copy()
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(mask, pad, mode="constant", constant_values=False)
    n = mask.shape[axis]
    out = np.ones_like(mask)
    for k in range(2 * radius + 1):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(k, k + n)
        out &= padded[tuple(sl)]
    return out


def binary_dilate(mask, radius):
    """Dilation with a square structuring element of Chebyshev radius
    ``radius``; pixels outside the frame count as False."""
    return _slide_or(_slide_or(mask, radius, 0), radius, 1)


def binary_erode(mask, radius):
    """Erosion with the same square element; outside-of-frame is False, so
    the result shrinks at borders."""
    return _slide_and(_slide_and(mask, radius, 0), radius, 1)


def label_components(mask):
    """8-connected component labels, int32, background 0.

    Components are numbered 1..n in raster order of their first pixel.
    """
    h, w = mask.shape
    labels = np.where(mask, np.arange(1, h * w + 1, dtype=np.int64).reshape(h, w), 0)
    # iterative min-label propagation until fixpoint
    big = np.int64(h * w + 2)
    cur = np.where(mask, labels, big)
    while True:
        padded = np.pad(cur, 1, mode="constant", constant_values=big)
        neigh = cur.copy()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                view = padded[1 + di : 1 + di + h, 1 + dj : 1 + dj + w]
                neigh = np.minimum(neigh, view)
        nxt = np.where(mask, np.minimum(cur, neigh), big)
        if np.array_equal(nxt, cur):
            break
        cur = nxt
    flat = np.where(mask, cur, 0)
    # compress to 1..n preserving min-id (raster first-pixel) order
    ids = np.unique(flat)
    ids = ids[ids > 0]
    remap = np.zeros(int(flat.max()) + 1 if ids.size else 1, dtype=np.int32)
    remap[ids] = np.arange(1, ids.size + 1, dtype=np.int32)
    return remap[flat]


def flood_from_border(open_mask):
    """Pixels of ``open_mask`` reachable (4-connected) from any border pixel
    of ``open_mask``."""
    h, w = open_mask.shape
    reach = np.zeros_like(open_mask)
    reach[0, :] = open_mask[0, :]
    reach[-1, :] = open_mask[-1, :]
    reach[:, 0] = open_mask[:, 0]
    reach[:, -1] = open_mask[:, -1]
    while True:
        grown = reach.copy()
        grown[1:, :] |= reach[:-1, :]
        grown[:-1, :] |= reach[1:, :]
        grown[:, 1:] |= reach[:, :-1]
        grown[:, :-1] |= reach[:, 1:]
        grown &= open_mask
        if np.array_equal(grown, reach):
            return reach
        reach = grown


def nms_gradient(mag, gx, gy):
    """Non-maximum suppression of gradient magnitude along the quantized
    gradient direction (4 sectors). The outer one-pixel ring is zeroed."""
    h, w = mag.shape
    out = np.zeros_like(mag)
    if h < 3 or w < 3:
        return out
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    core = (slice(1, h - 1), slice(1, w - 1))
    m = mag[core]
    a = angle[core]
    east = mag[1:-1, 2:]
    west = mag[1:-1, :-2]
    north = mag[:-2, 1:-1]
    south = mag[2:, 1:-1]
    ne = mag[:-2, 2:]
    sw = mag[2:, :-2]
    nw = mag[:-2, :-2]
    se = mag[2:, 2:]
    sector0 = (a < 22.5) | (a >= 157.5)
    sector1 = (a >= 22.5) & (a < 67.5)
    sector2 = (a >= 67.5) & (a < 112.5)
    n1 = np.where(sector0, east, np.where(sector1, ne, np.where(sector2, north, nw)))
    n2 = np.where(sector0, west, np.where(sector1, sw, np.where(sector2, south, se)))
    keep = (m > 0) & (m >= n1) & (m >= n2)
    out[core] = np.where(keep, m, 0.0)
    return out


def hysteresis(strong, weak):
    """Keep strong pixels plus weak pixels 8-connected to a strong pixel
    through weak pixels."""
    final = strong & weak | strong
    while True:
        grown = binary_dilate(final, 1) & weak | final
        if np.array_equal(grown, final):
            return grown
        final = grown


def band_magnitude_max(seg, k_lo, k_hi, window, skip):
    """Per-pixel max DFT magnitude over bins k_lo..k_hi of the mean-removed,
    windowed time series. ``skip`` pixels come back as 0.

    seg: (L, h, w) real cube; window: (L,) weights (all ones = rectangular).
    """
    L, h, w = seg.shape
    out = np.zeros((h, w), dtype=np.float64)
    rect = bool(np.all(window == 1.0))
    # row blocks keep the rfft workspace small
    block = max(1, int(4_000_000 // (L * max(w, 1))))
    for r0 in range(0, h, block):
        r1 = min(h, r0 + block)
        x = seg[:, r0:r1, :].astype(np.float64)
        x -= x.mean(axis=0)
        if not rect:
            x *= window[:, None, None]
        spec = np.fft.rfft(x, axis=0)[k_lo : k_hi + 1]
        out[r0:r1, :] = np.abs(spec).max(axis=0)
    # a constant series has no spectrum; clearing it here keeps float
    # dust from feeding the relative threshold downstream
    out[seg.min(axis=0) == seg.max(axis=0)] = 0.0
    out[skip] = 0.0
    return out


def masked_mean_inpainted(cube, mask, radius):
    """Per-frame mean over mask pixels of a normalized cube, median-
    inpainting zero pixels on the fly (only where the mask needs them)."""
    ys, xs = np.nonzero(mask)
    out = np.empty(cube.shape[0], dtype=np.float64)
    for t in range(cube.shape[0]):
        frame = cube[t]
        vals = frame[ys, xs].astype(np.float64)
        zsel = vals == 0.0
        if zsel.any():
            vals[zsel] = _window_medians(frame, ys[zsel], xs[zsel], radius)
        out[t] = vals.sum() / vals.size
    return out
