"""Binary-mask refinement: remove speckle, close holes, keep plausible
chest components.

All structuring elements are squares of Chebyshev radius r; pixels
outside the frame count as False, so erosion shrinks at borders (the
erode/dilate duality therefore holds only away from them).
Connectivity: 8-connected for components, 4-connected for hole
reachability.
"""

import numpy as np

from ._kernels import (
    binary_dilate,
    binary_erode,
    flood_from_border,
    label_components,
)


def _as_mask(mask):
    mask = np.asarray(mask)
    if mask.dtype != bool:
        mask = mask.astype(bool)
    return mask


def dilate(mask, radius):
    """True where any pixel of the square radius-r neighborhood is true."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return binary_dilate(_as_mask(mask), int(radius))


def erode(mask, radius):
    """True where the full square radius-r neighborhood is true."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return binary_erode(_as_mask(mask), int(radius))


def open_mask(mask, radius):
    """Erosion then dilation: drops features thinner than the element."""
    return dilate(erode(mask, radius), radius)


def close_mask(mask, radius):
    """Dilation then erosion: fills gaps narrower than the element."""
    return erode(dilate(mask, radius), radius)


def fill_holes(mask):
    """Set every false region that is not 4-connected to the border true."""
    mask = _as_mask(mask)
    outside = flood_from_border(~mask)
    return ~outside


def component_areas(labels):
    """Pixel count per label id (index 0 = background)."""
    return np.bincount(labels.ravel())


def remove_small_components(mask, min_area):
    """Drop 8-connected components with fewer than min_area pixels."""
    if min_area < 0:
        raise ValueError("min_area must be >= 0")
    mask = _as_mask(mask)
    if min_area <= 1 or not mask.any():
        return mask.copy()
    labels = label_components(mask)
    areas = component_areas(labels)
    keep = areas >= min_area
    keep[0] = False
    return keep[labels]


def refine_segment_mask(mask, open_radius=1, close_radius=2, min_area=0,
                        ignore=None):
    """Clean a raw per-segment detection mask.

    Pipeline: open(open_radius) -> close(close_radius) -> fill_holes ->
    remove_small_components(min_area). When an ignore mask is given its
    pixels are cleared at the end, since closing and hole filling can
    otherwise re-introduce them.
    """
    out = open_mask(mask, open_radius)
    out = close_mask(out, close_radius)
    out = fill_holes(out)
    out = remove_small_components(out, min_area)
    if ignore is not None:
        out &= ~_as_mask(ignore)
    return out
