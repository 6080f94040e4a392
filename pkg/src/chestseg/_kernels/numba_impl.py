"""Numba-jitted twins of the kernels in ``numpy_impl``.

Same signatures, same results; only the execution strategy differs.
Compiled lazily on first call, with on-disk caching.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _kth_smallest(buf, n, k):
    """k-th order statistic (0-based) of buf[:n]; permutes buf in place."""
    lo = 0
    hi = n - 1
    while lo < hi:
        pivot = buf[(lo + hi) >> 1]
        i = lo
        j = hi
        while i <= j:
            while buf[i] < pivot:
                i += 1
            while buf[j] > pivot:
                j -= 1
            if i <= j:
                buf[i], buf[j] = buf[j], buf[i]
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return buf[k]
    return buf[lo]


@njit(cache=True, nogil=True)
def _window_median(frame, i, j, radius, buf):
    """Median of the non-zero values in the window around (i, j); 0.0
    when the window holds none. Scratch buffer buf is overwritten."""
    h, w = frame.shape
    i0 = max(0, i - radius)
    i1 = min(h, i + radius + 1)
    j0 = max(0, j - radius)
    j1 = min(w, j + radius + 1)
    width = j1 - j0
    m = 0
    for ii in range(i0, i1):
        buf[m:m + width] = frame[ii, j0:j1]
        m += width
    n = 0
    for q in range(m):
        v = buf[q]
        if v > 0:
            buf[n] = v
            n += 1
    if n == 0:
        return 0.0
    k = (n - 1) // 2
    lo_med = _kth_smallest(buf, n, k)
    if n % 2:
        return lo_med
    # selection leaves buf[k+1:] >= lo_med, so the next order statistic
    # is their minimum
    hi_med = buf[k + 1]
    for q in range(k + 2, n):
        if buf[q] < hi_med:
            hi_med = buf[q]
    return (lo_med + hi_med) / 2.0


@njit(cache=True, nogil=True)
def median_inpaint(frame, radius):
    h, w = frame.shape
    out = frame.copy()
    size = 2 * radius + 1
    buf = np.empty(size * size, dtype=frame.dtype)
    for i in range(h):
        for j in range(w):
            if frame[i, j] == 0:
                out[i, j] = _window_median(frame, i, j, radius, buf)
    return out


@njit(cache=True, nogil=True)
def preprocess_cube(frames, max_distance_mm, radius, out):
    """Normalize each frame to [0, 1] (values beyond max_distance_mm
    become 0/invalid) and median-inpaint the zeros, writing into out."""
    n, h, w = frames.shape
    norm = np.empty((h, w), dtype=np.float32)
    for t in range(n):
        for i in range(h):
            for j in range(w):
                v = frames[t, i, j] / max_distance_mm
                norm[i, j] = 0.0 if v > 1.0 else v
        filled = median_inpaint(norm, radius)
        for i in range(h):
            for j in range(w):
                out[t, i, j] = filled[i, j]


@njit(cache=True, nogil=True)
def _slide_or_rows(mask, radius):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                lo = max(0, i - radius)
                hi = min(h, i + radius + 1)
                for ii in range(lo, hi):
                    out[ii, j] = True
    return out


@njit(cache=True, nogil=True)
def _slide_or_cols(mask, radius):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                lo = max(0, j - radius)
                hi = min(w, j + radius + 1)
                for jj in range(lo, hi):
                    out[i, jj] = True
    return out


@njit(cache=True, nogil=True)
def binary_dilate(mask, radius):
    if radius <= 0:
        return mask.copy()
    return _slide_or_cols(_slide_or_rows(mask, radius), radius)


@njit(cache=True, nogil=True)
def binary_erode(mask, radius):
    if radius <= 0:
        return mask.copy()
    h, w = mask.shape
    tmp = np.zeros((h, w), dtype=np.bool_)
    for i in range(h):
        for j in range(w):
            if i - radius < 0 or i + radius >= h:
                continue
            ok = True
            for ii in range(i - radius, i + radius + 1):
                if not mask[ii, j]:
                    ok = False
                    break
            tmp[i, j] = ok
    out = np.zeros((h, w), dtype=np.bool_)
    for i in range(h):
        for j in range(w):
            if j - radius < 0 or j + radius >= w:
                continue
            ok = True
            for jj in range(j - radius, j + radius + 1):
                if not tmp[i, jj]:
                    ok = False
                    break
            out[i, j] = ok
    return out


@njit(cache=True, nogil=True)
def label_components(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack = np.empty(h * w, dtype=np.int64)
    next_label = 0
    for si in range(h):
        for sj in range(w):
            if not mask[si, sj] or labels[si, sj] != 0:
                continue
            next_label += 1
            top = 0
            stack[top] = si * w + sj
            top += 1
            labels[si, sj] = next_label
            while top > 0:
                top -= 1
                idx = stack[top]
                ci = idx // w
                cj = idx % w
                for di in range(-1, 2):
                    for dj in range(-1, 2):
                        if di == 0 and dj == 0:
                            continue
                        ni = ci + di
                        nj = cj + dj
                        if 0 <= ni < h and 0 <= nj < w:
                            if mask[ni, nj] and labels[ni, nj] == 0:
                                labels[ni, nj] = next_label
                                stack[top] = ni * w + nj
                                top += 1
    return labels


@njit(cache=True, nogil=True)
def flood_from_border(open_mask):
    h, w = open_mask.shape
    reach = np.zeros((h, w), dtype=np.bool_)
    stack = np.empty(h * w, dtype=np.int64)
    top = 0
    for j in range(w):
        for i in (0, h - 1):
            if open_mask[i, j] and not reach[i, j]:
                reach[i, j] = True
                stack[top] = i * w + j
                top += 1
    for i in range(h):
        for j in (0, w - 1):
            if open_mask[i, j] and not reach[i, j]:
                reach[i, j] = True
                stack[top] = i * w + j
                top += 1
    while top > 0:
        top -= 1
        idx = stack[top]
        ci = idx // w
        cj = idx % w
        for k in range(4):
            ni = ci + (1 if k == 0 else -1 if k == 1 else 0)
            nj = cj + (1 if k == 2 else -1 if k == 3 else 0)
            if 0 <= ni < h and 0 <= nj < w:
                if open_mask[ni, nj] and not reach[ni, nj]:
                    reach[ni, nj] = True
                    stack[top] = ni * w + nj
                    top += 1
    return reach


@njit(cache=True, nogil=True)
def nms_gradient(mag, gx, gy):
    h, w = mag.shape
    out = np.zeros_like(mag)
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            m = mag[i, j]
            if m <= 0:
                continue
            a = math.degrees(math.atan2(gy[i, j], gx[i, j])) % 180.0
            if a < 22.5 or a >= 157.5:
                n1 = mag[i, j + 1]
                n2 = mag[i, j - 1]
            elif a < 67.5:
                n1 = mag[i - 1, j + 1]
                n2 = mag[i + 1, j - 1]
            elif a < 112.5:
                n1 = mag[i - 1, j]
                n2 = mag[i + 1, j]
            else:
                n1 = mag[i - 1, j - 1]
                n2 = mag[i + 1, j + 1]
            if m >= n1 and m >= n2:
                out[i, j] = m
    return out


@njit(cache=True, nogil=True)
def hysteresis(strong, weak):
    h, w = strong.shape
    final = np.zeros((h, w), dtype=np.bool_)
    stack = np.empty(h * w, dtype=np.int64)
    top = 0
    for i in range(h):
        for j in range(w):
            if strong[i, j]:
                final[i, j] = True
                stack[top] = i * w + j
                top += 1
    while top > 0:
        top -= 1
        idx = stack[top]
        ci = idx // w
        cj = idx % w
        for di in range(-1, 2):
            for dj in range(-1, 2):
                if di == 0 and dj == 0:
                    continue
                ni = ci + di
                nj = cj + dj
                if 0 <= ni < h and 0 <= nj < w:
                    if weak[ni, nj] and not final[ni, nj]:
                        final[ni, nj] = True
                        stack[top] = ni * w + nj
                        top += 1
    return final


@njit(cache=True, nogil=True)
def band_magnitude_max(seg, k_lo, k_hi, window, skip):
    L, h, w = seg.shape
    nb = k_hi - k_lo + 1
    cos_tab = np.empty((nb, L), dtype=np.float64)
    sin_tab = np.empty((nb, L), dtype=np.float64)
    for b in range(nb):
        k = k_lo + b
        for t in range(L):
            ang = -2.0 * math.pi * k * t / L
            cos_tab[b, t] = math.cos(ang)
            sin_tab[b, t] = math.sin(ang)
    mean = np.zeros((h, w), dtype=np.float64)
    lo = seg[0].astype(np.float64)
    hi = seg[0].astype(np.float64)
    for t in range(L):
        for i in range(h):
            for j in range(w):
                v = seg[t, i, j]
                mean[i, j] += v
                if v < lo[i, j]:
                    lo[i, j] = v
                elif v > hi[i, j]:
                    hi[i, j] = v
    inv = 1.0 / L
    for i in range(h):
        for j in range(w):
            mean[i, j] *= inv
    acc_re = np.zeros((nb, h, w), dtype=np.float64)
    acc_im = np.zeros((nb, h, w), dtype=np.float64)
    for t in range(L):
        wt = window[t]
        for i in range(h):
            for j in range(w):
                if skip[i, j]:
                    continue
                v = (seg[t, i, j] - mean[i, j]) * wt
                for b in range(nb):
                    acc_re[b, i, j] += v * cos_tab[b, t]
                    acc_im[b, i, j] += v * sin_tab[b, t]
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(h):
        for j in range(w):
            # a constant series has no spectrum; skipping it here keeps
            # float dust from feeding the relative threshold downstream
            if skip[i, j] or lo[i, j] == hi[i, j]:
                continue
            best = 0.0
            for b in range(nb):
                m = math.hypot(acc_re[b, i, j], acc_im[b, i, j])
                if m > best:
                    best = m
            out[i, j] = best
    return out


@njit(cache=True, nogil=True)
def masked_mean_inpainted(cube, mask, radius):
    """Per-frame mean over mask pixels of a normalized cube, median-
    inpainting zero pixels on the fly (only where the mask needs them)."""
    L, h, w = cube.shape
    total = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                total += 1
    ys = np.empty(total, dtype=np.int64)
    xs = np.empty(total, dtype=np.int64)
    p = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                ys[p] = i
                xs[p] = j
                p += 1
    size = 2 * radius + 1
    buf = np.empty(size * size, dtype=cube.dtype)
    out = np.empty(L, dtype=np.float64)
    for t in range(L):
        frame = cube[t]
        acc = 0.0
        for q in range(total):
            v = float(frame[ys[q], xs[q]])
            if v == 0.0:
                v = _window_median(frame, ys[q], xs[q], radius, buf)
            acc += v
        out[t] = acc / total
    return out
