"""Binary morphology: dilate/erode, open/close, hole filling, components."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chestseg.morph import (
    close_mask,
    component_areas,
    dilate,
    erode,
    fill_holes,
    open_mask,
    refine_segment_mask,
    remove_small_components,
)
from chestseg._kernels import label_components


def random_mask(seed, shape=(14, 17), density=0.35, clear_border=0):
    rng = np.random.default_rng(seed)
    mask = rng.random(shape) < density
    if clear_border:
        b = clear_border
        inner = np.zeros(shape, dtype=bool)
        inner[b:-b, b:-b] = True
        mask &= inner
    return mask


def label_oracle(mask):
    """Independent 8-connected labeling by BFS, labels in raster order."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    nxt = 0
    for si in range(h):
        for sj in range(w):
            if not mask[si, sj] or labels[si, sj]:
                continue
            nxt += 1
            queue = [(si, sj)]
            labels[si, sj] = nxt
            while queue:
                ci, cj = queue.pop()
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        ni, nj = ci + di, cj + dj
                        if (0 <= ni < h and 0 <= nj < w and mask[ni, nj]
                                and not labels[ni, nj]):
                            labels[ni, nj] = nxt
                            queue.append((ni, nj))
    return labels


def test_erode_shrinks_square():
    mask = np.zeros((9, 9), dtype=bool)
    mask[2:7, 2:7] = True
    out = erode(mask, 1)
    expected = np.zeros((9, 9), dtype=bool)
    expected[3:6, 3:6] = True
    np.testing.assert_array_equal(out, expected)


def test_erode_treats_outside_as_false():
    mask = np.ones((5, 5), dtype=bool)
    out = erode(mask, 1)
    assert out[1:4, 1:4].all()
    assert not out[0].any() and not out[:, 0].any()


def test_erode_dilate_reject_negative_radius():
    mask = np.zeros((3, 3), dtype=bool)
    with pytest.raises(ValueError):
        erode(mask, -1)
    with pytest.raises(ValueError):
        dilate(mask, -1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_duality_away_from_border(seed, r):
    """Erosion is the complement-dilation, once border effects are out of
    reach (both operators treat outside-of-frame as false)."""
    mask = random_mask(seed)
    a = erode(mask, r)
    b = ~dilate(~mask, r)
    np.testing.assert_array_equal(a[r:-r, r:-r], b[r:-r, r:-r])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_open_close_idempotent(seed, r):
    mask = random_mask(seed, shape=(16, 18), clear_border=2 * r + 1)
    opened = open_mask(mask, r)
    np.testing.assert_array_equal(open_mask(opened, r), opened)
    closed = close_mask(mask, r)
    np.testing.assert_array_equal(close_mask(closed, r), closed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_open_and_close_bracket_the_mask(seed, r):
    mask = random_mask(seed, shape=(16, 18), clear_border=2 * r + 1)
    assert (open_mask(mask, r) <= mask).all()
    assert (mask <= close_mask(mask, r)).all()


def test_open_drops_thin_features():
    mask = np.zeros((9, 9), dtype=bool)
    mask[4, :] = True  # a 1-px line
    assert not open_mask(mask, 1).any()
    blob = np.zeros((9, 9), dtype=bool)
    blob[2:7, 2:7] = True
    np.testing.assert_array_equal(open_mask(blob, 1), blob)


def test_close_bridges_narrow_gap():
    mask = np.zeros((9, 12), dtype=bool)
    mask[3:6, 2:5] = True
    mask[3:6, 6:9] = True  # 1-px gap between the blobs
    closed = close_mask(mask, 1)
    assert closed[3:6, 5].all()


def test_fill_holes_ring():
    mask = np.zeros((9, 9), dtype=bool)
    mask[2:7, 2:7] = True
    mask[4, 4] = False
    filled = fill_holes(mask)
    assert filled[4, 4]
    np.testing.assert_array_equal(filled[~mask], filled[~mask])
    assert filled.sum() == 25


def test_fill_holes_leaves_border_connected_background():
    mask = np.zeros((9, 9), dtype=bool)
    mask[2:7, 2:7] = True
    mask[4, 4:6] = False  # cavity walled in on every side
    filled = fill_holes(mask)
    assert filled[4, 4] and filled[4, 5]
    channel = np.zeros((9, 9), dtype=bool)
    channel[2:7, 2:7] = True
    channel[4, 4:9] = False  # channel reaching the border stays open
    filled = fill_holes(channel)
    assert not filled[4, 4] and not filled[4, 5]


def test_fill_holes_diagonal_gap_counts_as_closed():
    # 4-connected hole reachability: a diagonal "leak" does not drain it
    mask = np.array([
        [1, 1, 1, 0],
        [1, 0, 1, 1],
        [1, 1, 1, 1],
    ], dtype=bool)
    assert fill_holes(mask)[1, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fill_holes_extensive_and_idempotent(seed):
    mask = random_mask(seed)
    filled = fill_holes(mask)
    assert (mask <= filled).all()
    np.testing.assert_array_equal(fill_holes(filled), filled)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_label_components_matches_oracle(seed):
    mask = random_mask(seed, density=0.45)
    np.testing.assert_array_equal(label_components(mask), label_oracle(mask))


def test_component_areas_counts():
    mask = np.zeros((8, 8), dtype=bool)
    mask[0:2, 0:2] = True          # area 4
    mask[5:8, 5:8] = True          # area 9
    labels = label_components(mask)
    areas = component_areas(labels)
    assert sorted(areas[1:].tolist()) == [4, 9]
    assert areas[0] == 64 - 13


def test_remove_small_components():
    mask = np.zeros((10, 10), dtype=bool)
    mask[1, 1] = True              # area 1
    mask[4:6, 4:6] = True          # area 4
    mask[7:10, 0:3] = True         # area 9
    out = remove_small_components(mask, 4)
    assert not out[1, 1]
    assert out[4:6, 4:6].all()
    assert out[7:10, 0:3].all()
    np.testing.assert_array_equal(remove_small_components(mask, 1), mask)
    assert not remove_small_components(mask, 100).any()
    with pytest.raises(ValueError):
        remove_small_components(mask, -1)


def test_remove_small_uses_8_connectivity():
    mask = np.zeros((6, 6), dtype=bool)
    mask[1, 1] = True
    mask[2, 2] = True  # diagonal neighbor: one component of area 2
    out = remove_small_components(mask, 2)
    assert out.sum() == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_remove_small_keeps_only_large(seed, min_area):
    mask = random_mask(seed, density=0.3)
    out = remove_small_components(mask, min_area)
    labels = label_oracle(mask)
    areas = np.bincount(labels.ravel())
    expected = np.zeros_like(mask)
    for lab in range(1, areas.size):
        if areas[lab] >= min_area:
            expected |= labels == lab
    np.testing.assert_array_equal(out, expected)


def test_refine_composition_matches_stages():
    mask = random_mask(3, shape=(20, 24), density=0.4)
    ignore = random_mask(4, shape=(20, 24), density=0.15)
    got = refine_segment_mask(mask, open_radius=1, close_radius=2,
                              min_area=5, ignore=ignore)
    staged = remove_small_components(
        fill_holes(close_mask(open_mask(mask, 1), 2)), 5) & ~ignore
    np.testing.assert_array_equal(got, staged)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_refine_never_touches_ignore(seed):
    mask = random_mask(seed, shape=(18, 18), density=0.5)
    ignore = random_mask(seed + 1, shape=(18, 18), density=0.25)
    out = refine_segment_mask(mask, ignore=ignore)
    assert not (out & ignore).any()
