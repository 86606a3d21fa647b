"""Per-frame threshold selection.

The selector binarizes the frame at every threshold from 255 down to 0,
counts connected components before morphology (raw) and after the
opening/closing pass with a minimum-area filter (clean), and derives the
removed-noise count from their difference. The chosen threshold is the
floor-average of two landmarks: the threshold just before the first sharp
rise of the noise count, and the threshold detecting the most clean
components.

The scan does not binarize 256 times. It thresholds the opening/closing
intensity map once per frame and feeds it to a union-find sweep that yields
all 256 component counts in one pass; the result is pixel-exact against the
per-threshold binary route.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nuctrack._levelcount import counts_by_threshold
from nuctrack.imgproc import StructuringElement, open_close_intensity_map, validate_gray

DEFAULT_MIN_AREA = 20
DEFAULT_JUMP_FACTOR = 2.0
DEFAULT_MIN_JUMP = 10

SCAN_CSV_COLUMNS = ("threshold", "raw_components", "clean_components", "noise_count")


@dataclass(frozen=True)
class ThresholdScanRow:
    threshold: int
    raw_components: int
    clean_components: int
    noise_count: int


@dataclass(frozen=True)
class ThresholdDecision:
    knee_threshold: int
    max_nuclei_threshold: int
    selected: int


def scan_thresholds_from_map(
    img: np.ndarray, cleaned_map: np.ndarray, min_area: int = DEFAULT_MIN_AREA
) -> list[ThresholdScanRow]:
    """Scan using a precomputed opening/closing intensity map for the frame."""
    img = validate_gray(img)
    if min_area < 0:
        raise ValueError("min_area must be >= 0")
    raw_comp, _ = counts_by_threshold(img.astype(np.int16), min_area)
    _, clean_big = counts_by_threshold(cleaned_map, min_area)
    rows = []
    for t in range(255, -1, -1):
        raw = int(raw_comp[t])
        clean = int(clean_big[t])
        rows.append(ThresholdScanRow(t, raw, clean, max(raw - clean, 0)))
    return rows


def scan_thresholds(
    img: np.ndarray,
    opening_iters: int,
    closing_iters: int,
    se: StructuringElement = StructuringElement.SQUARE3,
    min_area: int = DEFAULT_MIN_AREA,
) -> list[ThresholdScanRow]:
    """One row per threshold, ordered 255 down to 0.

    raw_components counts components of the plain binarization (no area
    filter); clean_components counts post-morphology components with
    area >= min_area; noise_count = max(raw - clean, 0).
    """
    cleaned = open_close_intensity_map(img, opening_iters, closing_iters, se)
    return scan_thresholds_from_map(img, cleaned, min_area)


def find_max_nuclei_threshold(rows: list[ThresholdScanRow]) -> int:
    """Threshold with the most clean components; ties go to the higher threshold."""
    if not rows:
        raise ValueError("threshold scan is empty")
    best = max(rows, key=lambda row: (row.clean_components, row.threshold))
    return best.threshold


def find_noise_knee(
    rows: list[ThresholdScanRow],
    jump_factor: float = DEFAULT_JUMP_FACTOR,
    min_jump: int = DEFAULT_MIN_JUMP,
) -> int:
    """Threshold of the row just before the first sharp noise increase.

    Walking from high to low threshold, a jump qualifies when the noise
    increment is >= min_jump and >= jump_factor x max(previous noise, 1).
    Without a qualifying jump the max-nuclei threshold is returned so that
    degenerate frames still produce a decision.
    """
    if not rows:
        raise ValueError("threshold scan is empty")
    if jump_factor <= 1.0:
        raise ValueError("jump_factor must be > 1")
    if min_jump < 1:
        raise ValueError("min_jump must be >= 1")
    for prev, cur in zip(rows, rows[1:]):
        jump = cur.noise_count - prev.noise_count
        if jump >= min_jump and jump >= jump_factor * max(prev.noise_count, 1):
            return prev.threshold
    return find_max_nuclei_threshold(rows)


def decision_from_rows(
    rows: list[ThresholdScanRow],
    jump_factor: float = DEFAULT_JUMP_FACTOR,
    min_jump: int = DEFAULT_MIN_JUMP,
) -> ThresholdDecision:
    knee = find_noise_knee(rows, jump_factor, min_jump)
    max_nuclei = find_max_nuclei_threshold(rows)
    return ThresholdDecision(knee, max_nuclei, (knee + max_nuclei) // 2)


def select_threshold(
    img: np.ndarray,
    opening_iters: int,
    closing_iters: int,
    se: StructuringElement = StructuringElement.SQUARE3,
    min_area: int = DEFAULT_MIN_AREA,
    jump_factor: float = DEFAULT_JUMP_FACTOR,
    min_jump: int = DEFAULT_MIN_JUMP,
) -> ThresholdDecision:
    """Scan all thresholds and floor-average the noise knee with the
    max-nuclei threshold."""
    rows = scan_thresholds(img, opening_iters, closing_iters, se, min_area)
    return decision_from_rows(rows, jump_factor, min_jump)


def write_scan_csv(rows: list[ThresholdScanRow], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCAN_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [row.threshold, row.raw_components, row.clean_components, row.noise_count]
            )
