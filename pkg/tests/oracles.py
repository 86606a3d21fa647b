"""Independent brute-force references used to check the fast implementations.

Everything here is written with plain per-pixel loops and breadth-first
search, deliberately sharing no code with the package.
"""

from __future__ import annotations

from collections import deque

import numpy as np

SQUARE_OFFSETS = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]
CROSS_OFFSETS = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)]


def bf_erode(mask: np.ndarray, offsets=SQUARE_OFFSETS) -> np.ndarray:
    height, width = mask.shape
    out = np.zeros_like(mask)
    for y in range(height):
        for x in range(width):
            keep = True
            for dy, dx in offsets:
                ny, nx = y + dy, x + dx
                if not (0 <= ny < height and 0 <= nx < width) or not mask[ny, nx]:
                    keep = False
                    break
            out[y, x] = keep
    return out


def bf_dilate(mask: np.ndarray, offsets=SQUARE_OFFSETS) -> np.ndarray:
    height, width = mask.shape
    out = np.zeros_like(mask)
    for y in range(height):
        for x in range(width):
            hit = False
            for dy, dx in offsets:
                ny, nx = y + dy, x + dx
                if 0 <= ny < height and 0 <= nx < width and mask[ny, nx]:
                    hit = True
                    break
            out[y, x] = hit
    return out


def bf_opening(mask: np.ndarray, iterations: int, offsets=SQUARE_OFFSETS) -> np.ndarray:
    out = mask.copy()
    for _ in range(iterations):
        out = bf_erode(out, offsets)
    for _ in range(iterations):
        out = bf_dilate(out, offsets)
    return out


def bf_closing(mask: np.ndarray, iterations: int, offsets=SQUARE_OFFSETS) -> np.ndarray:
    out = mask.copy()
    for _ in range(iterations):
        out = bf_dilate(out, offsets)
    for _ in range(iterations):
        out = bf_erode(out, offsets)
    return out


def flood_fill_regions(mask: np.ndarray, eight_connected: bool = True):
    """BFS labeling; returns a list of dicts with area/centroid/bbox in
    raster-scan order of each component's first pixel."""
    height, width = mask.shape
    if eight_connected:
        neighbors = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    else:
        neighbors = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    seen = np.zeros_like(mask, dtype=bool)
    found = []
    for y in range(height):
        for x in range(width):
            if not mask[y, x] or seen[y, x]:
                continue
            queue = deque([(y, x)])
            seen[y, x] = True
            pixels = []
            while queue:
                cy, cx = queue.popleft()
                pixels.append((cy, cx))
                for dy, dx in neighbors:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < height and 0 <= nx < width and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
            ys = [p[0] for p in pixels]
            xs = [p[1] for p in pixels]
            found.append(
                {
                    "area": len(pixels),
                    "centroid": (sum(xs) / len(xs), sum(ys) / len(ys)),
                    "bbox": (min(xs), min(ys), max(xs), max(ys)),
                    "pixels": set(pixels),
                }
            )
    return found


def bf_scan(img: np.ndarray, opening_iters: int, closing_iters: int, min_area: int):
    """Per-threshold (raw, clean, noise) counts via direct binarize +
    morphology + flood fill at every threshold from 255 down to 0."""
    rows = []
    for threshold in range(255, -1, -1):
        binary = img >= threshold
        raw = len(flood_fill_regions(binary))
        cleaned = bf_closing(bf_opening(binary, opening_iters), closing_iters)
        clean = sum(1 for r in flood_fill_regions(cleaned) if r["area"] >= min_area)
        rows.append((threshold, raw, clean, max(raw - clean, 0)))
    return rows
