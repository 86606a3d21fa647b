"""Connected-component labeling and per-component geometry.

Labels are assigned in raster-scan order of each component's first pixel,
starting at 1, so repeated runs produce byte-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage as ndi

from nuctrack.imgproc import validate_mask


class Connectivity(Enum):
    FOUR = 4
    EIGHT = 8


@dataclass(frozen=True)
class Region:
    """One labeled component: centroid is the mean pixel coordinate (x, y),
    bbox is the inclusive (min_x, min_y, max_x, max_y) pixel hull."""

    label: int
    area: int
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]


def _connectivity_structure(connectivity: Connectivity) -> np.ndarray:
    if connectivity is Connectivity.EIGHT:
        return np.ones((3, 3), bool)
    return ndi.generate_binary_structure(2, 1)


def label_components(
    mask: np.ndarray, connectivity: Connectivity = Connectivity.EIGHT
) -> tuple[np.ndarray, list[Region]]:
    """Partition foreground into maximal connected components.

    Returns the int32 label map (0 = background) and one Region per label,
    ordered by label.
    """
    mask = validate_mask(mask)
    labels, count = ndi.label(mask, structure=_connectivity_structure(connectivity))
    if count == 0:
        return labels.astype(np.int32), []

    flat = labels.ravel()
    # force raster-scan first-occurrence ordering regardless of scipy internals
    seen, first_index = np.unique(flat, return_index=True)
    if seen[0] == 0:
        seen, first_index = seen[1:], first_index[1:]
    order = np.argsort(first_index, kind="stable")
    remap = np.zeros(count + 1, np.int32)
    remap[seen[order]] = np.arange(1, count + 1, dtype=np.int32)
    labels = remap[labels]

    areas = np.bincount(labels.ravel(), minlength=count + 1)
    height, width = mask.shape
    col_ix = np.tile(np.arange(width, dtype=np.float64), height)
    row_ix = np.repeat(np.arange(height, dtype=np.float64), width)
    sum_x = np.bincount(labels.ravel(), weights=col_ix, minlength=count + 1)
    sum_y = np.bincount(labels.ravel(), weights=row_ix, minlength=count + 1)
    slices = ndi.find_objects(labels)

    regions = []
    for lab in range(1, count + 1):
        area = int(areas[lab])
        sy, sx = slices[lab - 1]
        regions.append(
            Region(
                label=lab,
                area=area,
                centroid=(sum_x[lab] / area, sum_y[lab] / area),
                bbox=(int(sx.start), int(sy.start), int(sx.stop) - 1, int(sy.stop) - 1),
            )
        )
    return labels, regions


def filter_regions(regions: list[Region], min_area: int) -> list[Region]:
    """Keep regions with area >= min_area, preserving order."""
    if min_area < 0:
        raise ValueError("min_area must be >= 0")
    return [r for r in regions if r.area >= min_area]
