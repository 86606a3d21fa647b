"""Image primitives: channel extraction, binarization, and binary morphology.

Grayscale images are 2-D uint8 arrays (row-major, values 0..255); binary
masks are 2-D bool arrays of the same shape. Out-of-bounds pixels count as
background for every morphological operation, so a border pixel can never
survive erosion.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import ndimage as ndi

LUMINANCE_WEIGHTS = (0.299, 0.587, 0.114)


class Channel(Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    LUMINANCE = "luminance"


class StructuringElement(Enum):
    """3x3 neighborhood shape; the anchor is always the center pixel."""

    SQUARE3 = "square3"
    CROSS3 = "cross3"

    def footprint(self) -> np.ndarray:
        if self is StructuringElement.SQUARE3:
            return np.ones((3, 3), bool)
        fp = np.zeros((3, 3), bool)
        fp[1, :] = True
        fp[:, 1] = True
        return fp


def validate_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"grayscale image must be 2-D, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"grayscale image must be uint8, got {img.dtype}")
    return img


def validate_mask(mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    if mask.dtype != np.bool_:
        raise ValueError(f"mask must be bool, got {mask.dtype}")
    return mask


def extract_channel(image: np.ndarray, channel: Channel) -> np.ndarray:
    """Reduce an RGB(A) raster to a single uint8 channel.

    LUMINANCE is the rounded weighted sum 0.299 R + 0.587 G + 0.114 B;
    the other members select their channel directly.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] < 3:
        raise ValueError(f"expected an H x W x 3 (or 4) raster, got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {image.shape}")
    if channel is Channel.LUMINANCE:
        rw, gw, bw = LUMINANCE_WEIGHTS
        lum = rw * image[:, :, 0] + gw * image[:, :, 1] + bw * image[:, :, 2]
        return np.rint(lum).astype(np.uint8)
    index = {Channel.RED: 0, Channel.GREEN: 1, Channel.BLUE: 2}[channel]
    return np.ascontiguousarray(image[:, :, index], dtype=np.uint8)


def binarize(img: np.ndarray, threshold: int) -> np.ndarray:
    """Foreground iff intensity >= threshold (threshold 0 selects everything)."""
    return validate_gray(img) >= threshold


def _shifted_views(padded: np.ndarray, shape: tuple[int, int], se: StructuringElement):
    h, w = shape
    fp = se.footprint()
    for dy in range(-1, 2):
        for dx in range(-1, 2):
            if fp[dy + 1, dx + 1]:
                yield padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]


def erode(mask: np.ndarray, se: StructuringElement = StructuringElement.SQUARE3) -> np.ndarray:
    """Foreground iff every neighbor under the element is foreground."""
    mask = validate_mask(mask)
    padded = np.pad(mask, 1, constant_values=False)
    out = np.ones_like(mask)
    for view in _shifted_views(padded, mask.shape, se):
        out &= view
    return out


def dilate(mask: np.ndarray, se: StructuringElement = StructuringElement.SQUARE3) -> np.ndarray:
    """Foreground iff any neighbor under the element is foreground."""
    mask = validate_mask(mask)
    padded = np.pad(mask, 1, constant_values=False)
    out = np.zeros_like(mask)
    for view in _shifted_views(padded, mask.shape, se):
        out |= view
    return out


def opening(
    mask: np.ndarray,
    se: StructuringElement = StructuringElement.SQUARE3,
    iterations: int = 1,
) -> np.ndarray:
    """`iterations` erosions followed by `iterations` dilations (0 = identity)."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    out = validate_mask(mask).copy()
    for _ in range(iterations):
        out = erode(out, se)
    for _ in range(iterations):
        out = dilate(out, se)
    return out


def closing(
    mask: np.ndarray,
    se: StructuringElement = StructuringElement.SQUARE3,
    iterations: int = 1,
) -> np.ndarray:
    """`iterations` dilations followed by `iterations` erosions (0 = identity)."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    out = validate_mask(mask).copy()
    for _ in range(iterations):
        out = dilate(out, se)
    for _ in range(iterations):
        out = erode(out, se)
    return out


def open_close_intensity_map(
    img: np.ndarray,
    opening_iters: int,
    closing_iters: int,
    se: StructuringElement = StructuringElement.SQUARE3,
) -> np.ndarray:
    """Grayscale counterpart of opening-then-closing, as an int16 value map.

    For every threshold t in 0..255,

        (result >= t)  ==  closing(opening(img >= t, se, opening_iters),
                                   se, closing_iters)

    exactly, because min/max filters commute with thresholding for flat
    elements. Out-of-bounds pixels are padded with -1 so they behave as
    background at every threshold; -1 entries in the result are pixels that
    are never foreground. Computing the map once replaces one full binary
    morphology pass per threshold.
    """
    img = validate_gray(img)
    if opening_iters < 0 or closing_iters < 0:
        raise ValueError("iteration counts must be >= 0")
    values = img.astype(np.int16)
    erosions_first = opening_iters
    dilations = opening_iters + closing_iters
    erosions_last = closing_iters
    if se is StructuringElement.SQUARE3:
        # k iterated 3x3 passes with constant padding equal one (2k+1)-sized pass
        if erosions_first:
            values = ndi.minimum_filter(
                values, size=2 * erosions_first + 1, mode="constant", cval=-1
            )
        if dilations:
            values = ndi.maximum_filter(values, size=2 * dilations + 1, mode="constant", cval=-1)
        if erosions_last:
            values = ndi.minimum_filter(
                values, size=2 * erosions_last + 1, mode="constant", cval=-1
            )
    else:
        fp = se.footprint()
        for _ in range(erosions_first):
            values = ndi.minimum_filter(values, footprint=fp, mode="constant", cval=-1)
        for _ in range(dilations):
            values = ndi.maximum_filter(values, footprint=fp, mode="constant", cval=-1)
        for _ in range(erosions_last):
            values = ndi.minimum_filter(values, footprint=fp, mode="constant", cval=-1)
    return values
