"""Per-pixel temporal DFT, in-band amplitude images, and thresholding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chestseg.exceptions import ConfigError, PipelineError
from chestseg.spectral import (
    SegmentConfig,
    band_bins,
    band_limited_amplitude,
    iter_segments,
    pixel_spectrum,
    segment_frames,
    threshold_amplitude,
    window_weights,
)


def dft_oracle(signal):
    """Direct O(L^2) one-sided DFT magnitudes of the mean-removed signal."""
    x = np.asarray(signal, dtype=np.float64)
    x = x - x.mean()
    L = x.size
    k = np.arange(L // 2 + 1)
    basis = np.exp(-2j * np.pi * np.outer(k, np.arange(L)) / L)
    return np.abs(basis @ x)


def seg_cfg(**kw):
    base = dict(segment_len=100, segment_stride=100)
    base.update(kw)
    return SegmentConfig(**base)


def test_segment_frames_counts():
    assert segment_frames(10.0, 30.0) == 300
    assert segment_frames(5.0, 30.0) == 150
    with pytest.raises(ConfigError):
        segment_frames(10.0, 0.1)


def test_band_bins_default_band():
    assert band_bins(300, 10.0, 0.2, 0.33) == (6, 9)
    assert band_bins(200, 10.0, 0.2, 0.33) == (4, 6)  # 0.2 Hz lands on a bin


def test_band_bins_never_includes_dc():
    k_lo, _ = band_bins(10, 10.0, 0.01, 4.0)
    assert k_lo >= 1


def test_band_bins_empty_band_rejected():
    with pytest.raises(ConfigError, match="no DFT bin"):
        band_bins(16, 10.0, 0.2, 0.33)


def test_window_weights():
    assert (window_weights(8, "rect") == 1.0).all()
    hann = window_weights(8, "hann")
    assert hann[0] == 0.0 and hann[-1] == 0.0
    np.testing.assert_allclose(hann, hann[::-1])
    with pytest.raises(ConfigError):
        window_weights(8, "blackman")


def test_pixel_spectrum_constant_signal_is_silent():
    freqs, mags = pixel_spectrum(np.full(64, 3.7), 10.0)
    assert mags.max() < 1e-9  # mean removal leaves at most float dust
    assert freqs[0] == 0.0


def test_pixel_spectrum_integer_period_cosine():
    fps, L = 10.0, 200
    t = np.arange(L)
    freqs, mags = pixel_spectrum(np.cos(2 * np.pi * 0.25 * t / fps), fps)
    k = int(np.argmax(mags))
    assert k == 5
    assert abs(freqs[k] - 0.25) < 1e-12
    assert abs(mags[k] - L / 2) < 1e-9
    others = np.delete(mags, k)
    assert others.max() < 1e-9


def test_pixel_spectrum_two_cosines():
    fps, L = 10.0, 200
    t = np.arange(L)
    x = np.cos(2 * np.pi * 0.25 * t / fps) + np.cos(2 * np.pi * 1.5 * t / fps)
    _, mags = pixel_spectrum(x, fps)
    assert abs(mags[5] - L / 2) < 1e-9
    assert abs(mags[30] - L / 2) < 1e-9


def test_pixel_spectrum_matches_direct_dft():
    rng = np.random.default_rng(0)
    for L in (16, 50, 128, 300):
        x = rng.standard_normal(L)
        _, mags = pixel_spectrum(x, 10.0)
        ref = dft_oracle(x)
        assert np.abs(mags - ref).max() <= 1e-9 * max(ref.max(), 1.0)


def test_pixel_spectrum_rejects_short_signal():
    with pytest.raises(ValueError):
        pixel_spectrum(np.ones(1), 10.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e4, 1e4), st.sampled_from([16, 50, 128]))
def test_pixel_spectrum_dc_invariance(seed, dc, L):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(L)
    _, base = pixel_spectrum(x, 10.0)
    _, shifted = pixel_spectrum(x + dc, 10.0)
    assert np.abs(base - shifted).max() <= 1e-9 * max(base.max(), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([16, 50, 128]))
def test_pixel_spectrum_parseval(seed, L):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(L)
    _, mags = pixel_spectrum(x, 10.0)
    # one-sided spectrum: interior bins appear twice in the full transform
    weights = np.full(mags.size, 2.0)
    weights[0] = 1.0
    if L % 2 == 0:
        weights[-1] = 1.0
    lhs = ((x - x.mean()) ** 2).sum()
    rhs = (weights * mags**2).sum() / L
    assert abs(lhs - rhs) <= 1e-9 * max(lhs, 1.0)


def test_pixel_spectrum_scaling_is_linear():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(100)
    _, base = pixel_spectrum(x, 10.0)
    _, doubled = pixel_spectrum(2.0 * x, 10.0)
    np.testing.assert_array_equal(doubled, 2.0 * base)
    _, scaled = pixel_spectrum(1.7 * x, 10.0)
    np.testing.assert_allclose(scaled, 1.7 * base, rtol=1e-12, atol=1e-12)


def test_inband_argmax_matches_round():
    fps = 10.0
    L = 300
    t = np.arange(L)
    for f in (0.2, 0.2333333333333, 0.3):
        k_true = round(f * L / fps)
        x = np.sin(2 * np.pi * k_true / L * t)
        _, mags = pixel_spectrum(x, fps)
        k_lo, k_hi = band_bins(L, fps, 0.2, 0.33)
        k = k_lo + int(np.argmax(mags[k_lo:k_hi + 1]))
        assert k == k_true


def _cube_from_map(amp_map, freq_hz, fps, L, phase=0.0):
    t = np.arange(L)
    wave = np.cos(2 * np.pi * freq_hz * t / fps + phase)
    return 0.5 + amp_map[None, :, :] * wave[:, None, None]


def test_band_amplitude_constant_cube_is_zero():
    cfg = seg_cfg(segment_len=100)
    cube = np.full((100, 6, 7), 0.4)
    ignore = np.zeros((6, 7), dtype=bool)
    amp = band_limited_amplitude(cube, ignore, cfg, fps=10.0)
    assert amp.shape == (6, 7)
    assert amp.max() == 0.0


def test_band_amplitude_recovers_per_pixel_amplitude():
    fps, L = 10.0, 200
    rng = np.random.default_rng(2)
    amp_map = rng.random((5, 8)) * 0.01
    cube = _cube_from_map(amp_map, 0.25, fps, L)
    cfg = seg_cfg(segment_len=L)
    ignore = np.zeros((5, 8), dtype=bool)
    amp = band_limited_amplitude(cube, ignore, cfg, fps)
    np.testing.assert_allclose(amp, amp_map * (L / 2), rtol=1e-9, atol=1e-12)


def test_band_amplitude_out_of_band_pixel_is_silent():
    fps, L = 10.0, 200
    amp_map = np.zeros((4, 4))
    amp_map[1, 1] = 0.01
    cube = _cube_from_map(amp_map, 1.0, fps, L)  # 1 Hz: outside the band
    cfg = seg_cfg(segment_len=L)
    amp = band_limited_amplitude(cube, np.zeros((4, 4), dtype=bool), cfg, fps)
    assert amp[1, 1] <= 1e-9 * L


def test_band_amplitude_zeroes_ignored_pixels():
    fps, L = 10.0, 200
    amp_map = np.full((4, 4), 0.01)
    cube = _cube_from_map(amp_map, 0.25, fps, L)
    ignore = np.zeros((4, 4), dtype=bool)
    ignore[2, 3] = True
    amp = band_limited_amplitude(cube, ignore, seg_cfg(segment_len=L), fps)
    assert amp[2, 3] == 0.0
    assert (amp[~ignore] > 0).all()


def test_band_amplitude_rejects_wrong_length():
    cube = np.zeros((50, 3, 3))
    with pytest.raises(PipelineError, match="50 frames"):
        band_limited_amplitude(cube, np.zeros((3, 3), dtype=bool),
                               seg_cfg(segment_len=100), fps=10.0)


def test_band_amplitude_hann_window_still_finds_tone():
    fps, L = 10.0, 200
    amp_map = np.full((3, 3), 0.01)
    cube = _cube_from_map(amp_map, 0.25, fps, L)
    cfg = seg_cfg(segment_len=L, window="hann")
    amp = band_limited_amplitude(cube, np.zeros((3, 3), dtype=bool), cfg, fps)
    assert (amp > 0.3 * amp_map * L / 2).all()  # Hann halves the peak


def test_threshold_amplitude_examples():
    cfg = seg_cfg(amp_threshold_frac=0.3)
    amp = np.array([[10.0, 4.0, 2.0]])
    np.testing.assert_array_equal(threshold_amplitude(amp, cfg),
                                  [[True, True, False]])
    lone = np.zeros((3, 3))
    lone[1, 1] = 10.0
    got = threshold_amplitude(lone, cfg)
    assert got[1, 1] and got.sum() == 1
    assert not threshold_amplitude(np.zeros((3, 3)), cfg).any()


def test_threshold_amplitude_clears_ignored():
    cfg = seg_cfg(amp_threshold_frac=0.3)
    amp = np.array([[10.0, 9.0, 0.0]])
    ignore = np.array([[False, True, False]])
    np.testing.assert_array_equal(threshold_amplitude(amp, cfg, ignore),
                                  [[True, False, False]])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_threshold_amplitude_frac_antitone(seed, frac):
    rng = np.random.default_rng(seed)
    amp = rng.random((6, 6))
    loose = threshold_amplitude(amp, seg_cfg(amp_threshold_frac=frac))
    tight = threshold_amplitude(
        amp, seg_cfg(amp_threshold_frac=min(frac * 1.5, 0.99)))
    assert (tight <= loose).all()


def test_iter_segments_windows():
    frames = np.arange(100 * 2 * 2, dtype=np.float32).reshape(100, 2, 2)
    cfg = seg_cfg(segment_len=50, segment_stride=50)
    got = [(s, w.shape[0], w[0, 0, 0]) for s, w in iter_segments(frames, cfg)]
    assert got == [(0, 50, 0.0), (50, 50, 200.0)]

    got = [s for s, _ in iter_segments(frames[:99], cfg)]
    assert got == [0]

    cfg = seg_cfg(segment_len=50, segment_stride=25)
    got = [s for s, _ in iter_segments(frames, cfg)]
    assert got == [0, 25, 50]


def test_iter_segments_too_short():
    frames = np.zeros((10, 2, 2), dtype=np.float32)
    with pytest.raises(PipelineError, match="shorter than one segment"):
        list(iter_segments(frames, seg_cfg(segment_len=50, segment_stride=50)))


def test_segment_config_validation():
    seg_cfg().validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(segment_len=1).validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(segment_stride=200).validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(band_low_hz=0.4, band_high_hz=0.3).validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(band_high_hz=6.0).validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(amp_threshold_frac=1.5).validate(10.0)
    with pytest.raises(ConfigError):
        seg_cfg(window="boxcar").validate(10.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5.0, 5.0))
def test_segment_mask_invariant_to_depth_shift(seed, dc):
    """Shifting the whole scene toward/away from the camera by a constant
    leaves the per-segment candidate mask unchanged."""
    fps, L = 10.0, 50
    rng = np.random.default_rng(seed)
    cube = rng.random((L, 5, 6))
    ignore = rng.random((5, 6)) < 0.2
    cfg = seg_cfg(segment_len=L)
    amp = band_limited_amplitude(cube, ignore, cfg, fps)
    amp_dc = band_limited_amplitude(cube + dc, ignore, cfg, fps)
    np.testing.assert_allclose(amp_dc, amp, rtol=0, atol=1e-9)
    np.testing.assert_array_equal(threshold_amplitude(amp_dc, cfg, ignore),
                                  threshold_amplitude(amp, cfg, ignore))
