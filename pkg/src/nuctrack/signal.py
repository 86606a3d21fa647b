"""Nucleus/cytoplasm mask construction and signal measurement.

The cytoplasm is approximated by a ring: the nucleus mask dilated a few
times, minus the nucleus itself, minus every other foreground pixel in the
frame so a neighboring nucleus never leaks into the ring. The signal value
is the mean nucleus intensity minus the mean ring intensity on the
measurement channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nuctrack.imgproc import StructuringElement, dilate, validate_gray, validate_mask
from nuctrack.regions import Region

DEFAULT_DILATION_ITERS = 5


class EmptyMaskError(ValueError):
    """Raised when a measurement mask has no pixels (e.g. ring fully clipped)."""


@dataclass(frozen=True)
class CellMasks:
    """Masks over the padded crop `crop_bbox` (inclusive frame coordinates)."""

    crop_bbox: tuple[int, int, int, int]
    nucleus_mask: np.ndarray
    cytoplasm_mask: np.ndarray


@dataclass(frozen=True)
class SignalRecord:
    track_id: int
    frame_index: int
    nucleus_mean: float
    cytoplasm_mean: float
    signal_ratio: float


def build_masks(
    label_map: np.ndarray,
    region: Region,
    dilation_iters: int = DEFAULT_DILATION_ITERS,
    pad: int | None = None,
    global_foreground: np.ndarray | None = None,
    se: StructuringElement = StructuringElement.SQUARE3,
) -> CellMasks:
    """Build nucleus and cytoplasm-ring masks for one labeled region.

    pad defaults to dilation_iters + 2 and must be >= dilation_iters so the
    ring is not clipped by the crop (it may still be clipped by the frame
    border). global_foreground defaults to all labeled pixels.
    """
    if dilation_iters < 1:
        raise ValueError("dilation_iters must be >= 1")
    if pad is None:
        pad = dilation_iters + 2
    if pad < dilation_iters:
        raise ValueError(f"pad ({pad}) must be >= dilation_iters ({dilation_iters})")
    if global_foreground is None:
        global_foreground = label_map > 0
    else:
        global_foreground = validate_mask(global_foreground)

    height, width = label_map.shape
    x0, y0, x1, y1 = region.bbox
    cx0 = max(x0 - pad, 0)
    cy0 = max(y0 - pad, 0)
    cx1 = min(x1 + pad, width - 1)
    cy1 = min(y1 + pad, height - 1)

    crop_labels = label_map[cy0 : cy1 + 1, cx0 : cx1 + 1]
    nucleus = crop_labels == region.label
    if not nucleus.any():
        raise ValueError(f"region label {region.label} not present in label map")

    ring = nucleus
    for _ in range(dilation_iters):
        ring = dilate(ring, se)
    ring = ring & ~nucleus
    cytoplasm = ring & ~global_foreground[cy0 : cy1 + 1, cx0 : cx1 + 1]
    return CellMasks(crop_bbox=(cx0, cy0, cx1, cy1), nucleus_mask=nucleus, cytoplasm_mask=cytoplasm)


def measure(green: np.ndarray, masks: CellMasks) -> tuple[float, float, float]:
    """Mean intensities under both masks and their difference.

    Returns (nucleus_mean, cytoplasm_mean, signal_ratio) where signal_ratio
    is exactly nucleus_mean - cytoplasm_mean. Raises EmptyMaskError when
    either mask is empty.
    """
    green = validate_gray(green)
    x0, y0, x1, y1 = masks.crop_bbox
    crop = green[y0 : y1 + 1, x0 : x1 + 1]
    if crop.shape != masks.nucleus_mask.shape:
        raise ValueError(
            f"green frame crop {crop.shape} does not match mask shape {masks.nucleus_mask.shape}"
        )
    if not masks.nucleus_mask.any():
        raise EmptyMaskError("nucleus mask is empty")
    if not masks.cytoplasm_mask.any():
        raise EmptyMaskError("cytoplasm mask is empty")
    nucleus_mean = float(crop[masks.nucleus_mask].mean())
    cytoplasm_mean = float(crop[masks.cytoplasm_mask].mean())
    return nucleus_mean, cytoplasm_mean, nucleus_mean - cytoplasm_mean
