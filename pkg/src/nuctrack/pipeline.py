"""End-to-end batch pipeline and the opening/closing sweep.

Per frame: pick a binarization threshold (automatic, frozen, or overridden),
binarize the detection channel, apply opening then closing, label and
area-filter the components, associate them with the previous frame, and
measure every live track on the measurement channel. Outputs are
deterministic for a fixed configuration regardless of worker count.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from nuctrack.autothresh import (
    DEFAULT_JUMP_FACTOR,
    DEFAULT_MIN_JUMP,
    ThresholdDecision,
    ThresholdScanRow,
    decision_from_rows,
    scan_thresholds_from_map,
    write_scan_csv,
)
from nuctrack.imgproc import Channel, StructuringElement, extract_channel, open_close_intensity_map
from nuctrack.regions import Connectivity, Region, filter_regions, label_components
from nuctrack.signal import EmptyMaskError, SignalRecord, build_masks, measure
from nuctrack.tracker import (
    Track,
    TrackStatus,
    associate_frame,
    live_tracks,
    update_tracks,
)

logger = logging.getLogger("nuctrack")

FRAME_SUFFIXES = {".png", ".tif", ".tiff"}

TRACKS_CSV_COLUMNS = (
    "frame",
    "track_id",
    "centroid_x",
    "centroid_y",
    "bbox_min_x",
    "bbox_min_y",
    "bbox_max_x",
    "bbox_max_y",
    "area",
    "nucleus_mean",
    "cytoplasm_mean",
    "signal_ratio",
)

LIVE_COLOR = (0, 255, 0)
EXCLUDED_COLOR = (255, 64, 64)
CAPTION_COLOR = (255, 255, 0)


@dataclass
class RunConfig:
    """Configuration for one analysis run (and the base for sweeps)."""

    red_dir: Path
    green_dir: Path
    out_csv: Path | None = None
    overlay_dir: Path | None = None
    scan_dump_dir: Path | None = None
    opening_iters: int = 2
    closing_iters: int = 0
    min_area: int = 20
    dilation_iters: int = 5
    jump_factor: float = DEFAULT_JUMP_FACTOR
    min_jump: int = DEFAULT_MIN_JUMP
    threshold_override: int | None = None
    freeze_threshold: bool = False
    se: StructuringElement = StructuringElement.SQUARE3
    jobs: int = 1


@dataclass(frozen=True)
class SweepResult:
    """Tracked-to-final-frame counts per (opening_iters, closing_iters)."""

    opening_values: tuple[int, ...]
    closing_values: tuple[int, ...]
    grid: dict[tuple[int, int], int]


@dataclass
class FrameDetection:
    threshold: int
    decision: ThresholdDecision | None
    scan_rows: list[ThresholdScanRow] | None
    label_map: np.ndarray
    regions: list[Region]
    foreground: np.ndarray
    skipped_measurements: int = 0


def _rescale_to_uint8(arr: np.ndarray) -> np.ndarray:
    # 16-bit sources map the dtype range linearly onto 0..255
    scaled = np.rint(arr.astype(np.float64) * (255.0 / 65535.0))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def _frame_to_gray(img, channel: Channel, path: Path) -> np.ndarray:
    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8)
    if img.mode in ("I", "I;16", "I;16B", "I;16L"):
        return _rescale_to_uint8(np.asarray(img))
    if img.mode in ("RGB", "RGBA"):
        return extract_channel(np.asarray(img)[:, :, :3], channel)
    converted = img.convert("RGB")
    return extract_channel(np.asarray(converted), channel)


def ingest_sequence(directory: Path | str, channel: Channel) -> list[np.ndarray]:
    """Load a frame sequence (PNG/TIFF, lexicographic filename order) as
    8-bit grayscale. Single-channel files are used as-is; RGB files are
    reduced to `channel`."""
    from PIL import Image, UnidentifiedImageError

    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in FRAME_SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no PNG/TIFF frames found in {directory}")
    frames = []
    for path in files:
        try:
            with Image.open(path) as img:
                img.load()
                frame = _frame_to_gray(img, channel, path)
        except (UnidentifiedImageError, OSError) as exc:
            raise OSError(f"could not read image file {path}: {exc}") from exc
        if frames and frame.shape != frames[0].shape:
            raise ValueError(
                f"frame dimension mismatch: {files[0].name} is "
                f"{frames[0].shape[1]}x{frames[0].shape[0]} but {path.name} is "
                f"{frame.shape[1]}x{frame.shape[0]}"
            )
        frames.append(frame)
    return frames


def _detect_frame(red: np.ndarray, config: RunConfig, fixed_threshold: int | None) -> FrameDetection:
    cleaned = open_close_intensity_map(red, config.opening_iters, config.closing_iters, config.se)
    decision = None
    rows = None
    if fixed_threshold is not None:
        threshold = fixed_threshold
        degenerate = False
    else:
        rows = scan_thresholds_from_map(red, cleaned, config.min_area)
        decision = decision_from_rows(rows, config.jump_factor, config.min_jump)
        threshold = decision.selected
        # an automatic threshold of 0 means no intensity separation exists
        # (blank frame); treat it as "nothing detected" rather than
        # foregrounding the whole frame
        degenerate = threshold == 0
    if degenerate:
        foreground = np.zeros(red.shape, bool)
    else:
        foreground = cleaned >= threshold
    label_map, regions = label_components(foreground, Connectivity.EIGHT)
    regions = filter_regions(regions, config.min_area)
    return FrameDetection(
        threshold=threshold,
        decision=decision,
        scan_rows=rows,
        label_map=label_map,
        regions=regions,
        foreground=foreground,
    )


def _detect_all(reds: list[np.ndarray], config: RunConfig) -> list[FrameDetection]:
    n = len(reds)
    detections: list[FrameDetection | None] = [None] * n
    if config.threshold_override is not None:
        fixed: list[int | None] = [config.threshold_override] * n
    elif config.freeze_threshold:
        detections[0] = _detect_frame(reds[0], config, None)
        fixed = [detections[0].threshold] * n
    else:
        fixed = [None] * n
    pending = [i for i in range(n) if detections[i] is None]
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = pool.map(lambda i: _detect_frame(reds[i], config, fixed[i]), pending)
            for i, det in zip(pending, results):
                detections[i] = det
    else:
        for i in pending:
            detections[i] = _detect_frame(reds[i], config, fixed[i])
    return detections  # type: ignore[return-value]


def _run_frames(
    reds: list[np.ndarray], greens: list[np.ndarray], config: RunConfig
) -> tuple[list[Track], list[SignalRecord]]:
    detections = _detect_all(reds, config)
    if config.scan_dump_dir is not None:
        dump_dir = Path(config.scan_dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        for i, det in enumerate(detections):
            if det.scan_rows is not None:
                write_scan_csv(det.scan_rows, dump_dir / f"scan_frame_{i:04d}.csv")
    if config.overlay_dir is not None:
        Path(config.overlay_dir).mkdir(parents=True, exist_ok=True)

    tracks: list[Track] = []
    records: list[SignalRecord] = []
    prev_regions: list[Region] = []
    total_skipped = 0
    pad = config.dilation_iters + 2
    for index, det in enumerate(detections):
        if index == 0:
            update_tracks(tracks, None, det.regions, 0)
        else:
            association = associate_frame(prev_regions, det.regions)
            update_tracks(tracks, association, det.regions, index)
        live = live_tracks(tracks)
        skipped = 0
        for track in live:
            masks = build_masks(
                det.label_map,
                track.last_region,
                dilation_iters=config.dilation_iters,
                pad=pad,
                global_foreground=det.foreground,
                se=config.se,
            )
            try:
                nucleus_mean, cytoplasm_mean, ratio = measure(greens[index], masks)
            except EmptyMaskError as exc:
                skipped += 1
                logger.warning("frame %d track %d: measurement skipped (%s)", index, track.id, exc)
                continue
            records.append(
                SignalRecord(
                    track_id=track.id,
                    frame_index=index,
                    nucleus_mean=nucleus_mean,
                    cytoplasm_mean=cytoplasm_mean,
                    signal_ratio=ratio,
                )
            )
        det.skipped_measurements = skipped
        total_skipped += skipped
        if config.overlay_dir is not None:
            overlay = render_overlay(reds[index], det.regions, tracks, index)
            _write_png(overlay, Path(config.overlay_dir) / f"frame_{index:04d}.png")
        if det.decision is not None:
            threshold_note = (
                f"threshold={det.threshold} (knee={det.decision.knee_threshold}, "
                f"max-nuclei={det.decision.max_nuclei_threshold})"
            )
        else:
            threshold_note = f"threshold={det.threshold} (fixed)"
        logger.info(
            "frame %03d: %s regions=%d live=%d skipped_measurements=%d",
            index,
            threshold_note,
            len(det.regions),
            len(live),
            skipped,
        )
        prev_regions = det.regions
    if total_skipped:
        logger.warning("%d measurement(s) skipped due to empty masks", total_skipped)
    return tracks, records


def _load_pair(config: RunConfig) -> tuple[list[np.ndarray], list[np.ndarray]]:
    reds = ingest_sequence(config.red_dir, Channel.RED)
    greens = ingest_sequence(config.green_dir, Channel.GREEN)
    if len(reds) != len(greens):
        raise ValueError(
            f"sequence length mismatch: {len(reds)} detection frames vs "
            f"{len(greens)} measurement frames"
        )
    if reds[0].shape != greens[0].shape:
        raise ValueError(
            f"channel dimension mismatch: detection {reds[0].shape[1]}x{reds[0].shape[0]} vs "
            f"measurement {greens[0].shape[1]}x{greens[0].shape[0]}"
        )
    return reds, greens


def run(config: RunConfig) -> tuple[list[Track], list[SignalRecord]]:
    """Run detection, tracking, and measurement over the configured
    sequences; write the tracks CSV when configured."""
    reds, greens = _load_pair(config)
    tracks, records = _run_frames(reds, greens, config)
    if config.out_csv is not None:
        write_tracks_csv(records, tracks, config.out_csv)
    return tracks, records


def write_tracks_csv(
    records: list[SignalRecord], tracks: list[Track], path: Path | str
) -> None:
    """Emit one row per measurement, sorted by (frame, track_id), with the
    matching track geometry; floats use 4 decimal places."""
    geometry: dict[tuple[int, int], Region] = {}
    for track in tracks:
        for frame, region in track.history:
            geometry[(track.id, frame)] = region
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACKS_CSV_COLUMNS)
        for rec in sorted(records, key=lambda r: (r.frame_index, r.track_id)):
            region = geometry.get((rec.track_id, rec.frame_index))
            if region is None:
                raise ValueError(
                    f"record for track {rec.track_id} frame {rec.frame_index} has no track geometry"
                )
            writer.writerow(
                [
                    rec.frame_index,
                    rec.track_id,
                    f"{region.centroid[0]:.4f}",
                    f"{region.centroid[1]:.4f}",
                    region.bbox[0],
                    region.bbox[1],
                    region.bbox[2],
                    region.bbox[3],
                    region.area,
                    f"{rec.nucleus_mean:.4f}",
                    f"{rec.cytoplasm_mean:.4f}",
                    f"{rec.signal_ratio:.4f}",
                ]
            )


def render_overlay(
    red_frame: np.ndarray, regions: list[Region], tracks: list[Track], frame_index: int
) -> np.ndarray:
    """Detection-channel frame with region rectangles, centroid markers,
    track ids, and a frame caption baked in. Returns an RGB array."""
    from PIL import Image, ImageDraw

    image = Image.fromarray(red_frame, mode="L").convert("RGB")
    draw = ImageDraw.Draw(image)
    owner: dict[int, int] = {}
    for track in tracks:
        if track.status is TrackStatus.LIVE and track.history and track.last_frame == frame_index:
            owner[track.last_region.label] = track.id
    for region in regions:
        track_id = owner.get(region.label)
        color = LIVE_COLOR if track_id is not None else EXCLUDED_COLOR
        x0, y0, x1, y1 = region.bbox
        draw.rectangle([x0, y0, x1, y1], outline=color)
        cx, cy = int(round(region.centroid[0])), int(round(region.centroid[1]))
        draw.line([cx - 2, cy, cx + 2, cy], fill=color)
        draw.line([cx, cy - 2, cx, cy + 2], fill=color)
        if track_id is not None:
            draw.text((x0, max(y0 - 11, 0)), str(track_id), fill=color)
    draw.text((2, 2), f"frame {frame_index}", fill=CAPTION_COLOR)
    return np.asarray(image)


def _write_png(rgb: np.ndarray, path: Path) -> None:
    from PIL import Image

    Image.fromarray(rgb, mode="RGB").save(path)


def sweep(config: RunConfig, max_opening: int = 5, max_closing: int = 5) -> SweepResult:
    """Run the full pipeline once per (opening, closing) pair and count the
    tracks still live at the final frame; write the grid CSV when
    configured."""
    if max_opening < 0 or max_closing < 0:
        raise ValueError("sweep ranges must be >= 0")
    reds, greens = _load_pair(config)
    grid: dict[tuple[int, int], int] = {}
    for opening_iters in range(max_opening + 1):
        for closing_iters in range(max_closing + 1):
            cell = replace(
                config,
                opening_iters=opening_iters,
                closing_iters=closing_iters,
                out_csv=None,
                overlay_dir=None,
                scan_dump_dir=None,
            )
            tracks, _ = _run_frames(reds, greens, cell)
            count = len(live_tracks(tracks))
            grid[(opening_iters, closing_iters)] = count
            logger.info(
                "sweep opening=%d closing=%d: tracked to final frame=%d",
                opening_iters,
                closing_iters,
                count,
            )
    result = SweepResult(
        opening_values=tuple(range(max_opening + 1)),
        closing_values=tuple(range(max_closing + 1)),
        grid=grid,
    )
    if config.out_csv is not None:
        write_sweep_csv(result, config.out_csv)
    return result


def write_sweep_csv(result: SweepResult, path: Path | str) -> None:
    """Grid CSV: one row per closing count, one column per opening count."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["closing/opening", *result.opening_values])
        for closing_iters in result.closing_values:
            writer.writerow(
                [closing_iters]
                + [result.grid[(opening_iters, closing_iters)] for opening_iters in result.opening_values]
            )
