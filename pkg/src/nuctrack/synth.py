"""Synthetic two-channel sequences with exact ground truth.

Each blob is a filled disc: a pixel belongs to the disc iff its center lies
within `radius` (inclusive) of the blob center. The detection channel draws
the disc at the blob's nucleus intensity plus optional speckle noise; the
measurement channel draws the disc at the nucleus level surrounded by an
annulus at the cytoplasm level, so the true signal value of every blob is
known by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nuctrack.tracker import Track

DEFAULT_CYTOPLASM_WIDTH = 9


@dataclass(frozen=True)
class BlobSpec:
    id: int
    trajectory: tuple[tuple[float, float], ...]
    radius: int
    nucleus_intensity: int
    green_nucleus_level: int
    green_cytoplasm_level: int


@dataclass(frozen=True)
class TrueBlob:
    id: int
    centroid: tuple[float, float]
    radius: int


@dataclass
class GroundTruth:
    width: int
    height: int
    frames: list[list[TrueBlob]]
    ratios: dict[int, float]

    def mask_for(self, frame_index: int, blob_id: int) -> np.ndarray:
        for blob in self.frames[frame_index]:
            if blob.id == blob_id:
                mask = np.zeros((self.height, self.width), bool)
                _stamp_disc(mask, blob.centroid[0], blob.centroid[1], blob.radius, True)
                return mask
        raise KeyError(f"blob {blob_id} not present in frame {frame_index}")


@dataclass(frozen=True)
class TrackingScore:
    survival: float
    purity: float
    pure_tracks: int
    total_tracks: int


def _stamp_disc(canvas: np.ndarray, cx: float, cy: float, radius: float, value) -> None:
    height, width = canvas.shape
    x0 = max(int(math.floor(cx - radius)), 0)
    x1 = min(int(math.ceil(cx + radius)), width - 1)
    y0 = max(int(math.floor(cy - radius)), 0)
    y1 = min(int(math.ceil(cy + radius)), height - 1)
    yy, xx = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    inside = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    patch = canvas[y0 : y1 + 1, x0 : x1 + 1]
    patch[inside] = value


def _validate_specs(specs: list[BlobSpec], frames: int, width: int, height: int) -> None:
    seen = set()
    for spec in specs:
        if spec.id in seen:
            raise ValueError(f"duplicate blob id {spec.id}")
        seen.add(spec.id)
        if spec.radius < 2:
            raise ValueError(f"blob {spec.id}: radius must be >= 2")
        for level in (spec.nucleus_intensity, spec.green_nucleus_level, spec.green_cytoplasm_level):
            if not 0 <= level <= 255:
                raise ValueError(f"blob {spec.id}: intensity {level} outside [0, 255]")
        if len(spec.trajectory) != frames:
            raise ValueError(
                f"blob {spec.id}: trajectory has {len(spec.trajectory)} points for {frames} frames"
            )
        for cx, cy in spec.trajectory:
            if cx - spec.radius < 0 or cx + spec.radius > width - 1:
                raise ValueError(f"blob {spec.id} out of bounds at x={cx}")
            if cy - spec.radius < 0 or cy + spec.radius > height - 1:
                raise ValueError(f"blob {spec.id} out of bounds at y={cy}")


def generate(
    specs: list[BlobSpec],
    frames: int,
    width: int,
    height: int,
    noise_density: float = 0.0,
    noise_amplitude: int = 0,
    seed: int = 0,
    cytoplasm_width: int = DEFAULT_CYTOPLASM_WIDTH,
    background: int = 0,
) -> tuple[list[np.ndarray], list[np.ndarray], GroundTruth]:
    """Render the detection and measurement channels plus ground truth.

    Speckle noise activates each detection-channel pixel independently with
    probability noise_density and adds noise_amplitude (clipped at 255);
    the measurement channel stays noise-free. Output is deterministic for a
    fixed seed.
    """
    _validate_specs(specs, frames, width, height)
    if not 0.0 <= noise_density <= 1.0:
        raise ValueError("noise_density must be in [0, 1]")
    if not 0 <= noise_amplitude <= 255:
        raise ValueError("noise_amplitude must be in [0, 255]")
    rng = np.random.default_rng(seed)

    reds: list[np.ndarray] = []
    greens: list[np.ndarray] = []
    truth_frames: list[list[TrueBlob]] = []
    for frame in range(frames):
        red = np.full((height, width), background, np.uint8)
        green = np.zeros((height, width), np.uint8)
        for spec in specs:
            cx, cy = spec.trajectory[frame]
            _stamp_disc(green, cx, cy, spec.radius + cytoplasm_width, spec.green_cytoplasm_level)
        blobs = []
        for spec in specs:
            cx, cy = spec.trajectory[frame]
            _stamp_disc(red, cx, cy, spec.radius, spec.nucleus_intensity)
            _stamp_disc(green, cx, cy, spec.radius, spec.green_nucleus_level)
            blobs.append(TrueBlob(spec.id, (cx, cy), spec.radius))
        if noise_density > 0.0 and noise_amplitude > 0:
            active = rng.random((height, width)) < noise_density
            red = np.where(
                active, np.minimum(red.astype(np.int32) + noise_amplitude, 255), red
            ).astype(np.uint8)
        reds.append(red)
        greens.append(green)
        truth_frames.append(blobs)

    ratios = {
        spec.id: float(spec.green_nucleus_level - spec.green_cytoplasm_level) for spec in specs
    }
    return reds, greens, GroundTruth(width, height, truth_frames, ratios)


def score_tracking(tracks: list[Track], truth: GroundTruth, tol: float = 2.0) -> TrackingScore:
    """Purity and survival of a track set against ground truth.

    A track is pure when one blob id stays within `tol` pixels of every
    centroid in the track's history; survival is the fraction of blobs that
    own a pure track whose history reaches the final frame.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    per_frame = [{blob.id: blob.centroid for blob in blobs} for blobs in truth.frames]
    final_frame = len(truth.frames) - 1

    def matches(track: Track, blob_id: int) -> bool:
        for frame, region in track.history:
            center = per_frame[frame].get(blob_id)
            if center is None:
                return False
            dx = region.centroid[0] - center[0]
            dy = region.centroid[1] - center[1]
            if dx * dx + dy * dy > tol * tol:
                return False
        return True

    blob_ids = sorted(truth.ratios)
    surviving: set[int] = set()
    pure_count = 0
    for track in tracks:
        first_frame, first_region = track.history[0]
        candidates = [
            blob_id
            for blob_id, center in per_frame[first_frame].items()
            if (first_region.centroid[0] - center[0]) ** 2
            + (first_region.centroid[1] - center[1]) ** 2
            <= tol * tol
        ]
        pure_ids = [blob_id for blob_id in candidates if matches(track, blob_id)]
        if pure_ids:
            pure_count += 1
            if track.history[-1][0] == final_frame:
                surviving.update(pure_ids)

    total = len(tracks)
    purity = pure_count / total if total else 1.0
    survival = len(surviving & set(blob_ids)) / len(blob_ids) if blob_ids else 0.0
    return TrackingScore(survival=survival, purity=purity, pure_tracks=pure_count, total_tracks=total)


def random_drift_specs(
    seed: int,
    n_blobs: int,
    frames: int,
    width: int,
    height: int,
    radius_min: int = 6,
    radius_max: int = 10,
    step_fraction: float = 0.5,
    separation_factor: float = 4.0,
    nucleus_intensity: int = 180,
    green_nucleus_level: int = 200,
    green_cytoplasm_level: int = 50,
    cytoplasm_width: int = DEFAULT_CYTOPLASM_WIDTH,
) -> list[BlobSpec]:
    """Well-separated random-walking blobs.

    Per-frame displacement stays <= step_fraction x radius and pairwise
    center distance stays >= separation_factor x the larger radius; steps
    violating either constraint are rejected (the blob stays put).
    """
    rng = np.random.default_rng(seed)
    margin = radius_max + cytoplasm_width + 2
    radii = rng.integers(radius_min, radius_max + 1, size=n_blobs)

    def separated(positions: list[tuple[float, float]], candidate, radius, skip=None) -> bool:
        for j, (px, py) in enumerate(positions):
            if j == skip:
                continue
            need = separation_factor * max(radius, radii[j])
            if (candidate[0] - px) ** 2 + (candidate[1] - py) ** 2 < need * need:
                return False
        return True

    positions: list[tuple[float, float]] = []
    for i in range(n_blobs):
        for _ in range(10_000):
            cand = (
                float(rng.uniform(margin, width - 1 - margin)),
                float(rng.uniform(margin, height - 1 - margin)),
            )
            if separated(positions, cand, radii[i]):
                positions.append(cand)
                break
        else:
            raise ValueError(f"could not place {n_blobs} separated blobs in {width}x{height}")

    paths: list[list[tuple[float, float]]] = [[p] for p in positions]
    current = list(positions)
    for _ in range(1, frames):
        for i in range(n_blobs):
            max_step = step_fraction * radii[i]
            step = rng.uniform(-max_step, max_step, size=2)
            if step[0] * step[0] + step[1] * step[1] > max_step * max_step:
                step *= max_step / math.hypot(step[0], step[1])
            cand = (current[i][0] + float(step[0]), current[i][1] + float(step[1]))
            in_bounds = (
                margin <= cand[0] <= width - 1 - margin and margin <= cand[1] <= height - 1 - margin
            )
            if in_bounds and separated(current, cand, radii[i], skip=i):
                current[i] = cand
            paths[i].append(current[i])

    return [
        BlobSpec(
            id=i + 1,
            trajectory=tuple(paths[i]),
            radius=int(radii[i]),
            nucleus_intensity=nucleus_intensity,
            green_nucleus_level=green_nucleus_level,
            green_cytoplasm_level=green_cytoplasm_level,
        )
        for i in range(n_blobs)
    ]


@dataclass(frozen=True)
class BenchmarkSequence:
    specs: list[BlobSpec]
    frames: int
    width: int
    height: int
    noise_density: float
    noise_amplitude: int
    seed: int


def sweep_benchmark(seed: int = 1701) -> BenchmarkSequence:
    """Seeded 20-blob noisy benchmark for the opening/closing sweep.

    The field mixes bright solo blobs, bright blob pairs that drift toward
    each other (so growing closing counts merge them mid-sequence), and dim
    blobs whose low intensity drags the selected threshold below the speckle
    level - without an opening pass the speckle then floods detection.
    """
    width, height, frames = 1920, 1080, 24
    rng = np.random.default_rng(seed)
    margin = 40.0
    specs: list[BlobSpec] = []
    placed: list[tuple[float, float, float]] = []  # x, y, keep-out radius

    def place(keep_out: float) -> tuple[float, float]:
        for _ in range(10_000):
            x = float(rng.uniform(margin, width - 1 - margin))
            y = float(rng.uniform(margin, height - 1 - margin))
            if all((x - px) ** 2 + (y - py) ** 2 >= (keep_out + pk) ** 2 for px, py, pk in placed):
                placed.append((x, y, keep_out))
                return x, y
        raise ValueError("could not place benchmark blobs")

    def jitter_path(x: float, y: float, amplitude: float = 1.0) -> list[tuple[float, float]]:
        path = [(x, y)]
        for _ in range(1, frames):
            x = min(max(x + float(rng.uniform(-amplitude, amplitude)), margin), width - 1 - margin)
            y = min(max(y + float(rng.uniform(-amplitude, amplitude)), margin), height - 1 - margin)
            path.append((x, y))
        return path

    blob_id = 1
    # five bright pairs closing from an 18 px gap to 2/4/6/8/10 px
    for pair_index, final_gap in enumerate((2.0, 4.0, 6.0, 8.0, 10.0)):
        radius = 6 + (pair_index % 3)
        cx, cy = place(keep_out=90.0)
        angle = float(rng.uniform(0.0, math.pi))
        ux, uy = math.cos(angle), math.sin(angle)
        start_gap = 18.0
        intensity = int(rng.integers(160, 221))
        trajectories: tuple[list, list] = ([], [])
        for frame in range(frames):
            gap = start_gap + (final_gap - start_gap) * frame / (frames - 1)
            half = (gap + 2 * radius) / 2.0
            trajectories[0].append((cx - ux * half, cy - uy * half))
            trajectories[1].append((cx + ux * half, cy + uy * half))
        for traj in trajectories:
            specs.append(
                BlobSpec(
                    id=blob_id,
                    trajectory=tuple(traj),
                    radius=radius,
                    nucleus_intensity=intensity,
                    green_nucleus_level=200,
                    green_cytoplasm_level=50,
                )
            )
            blob_id += 1
    # five bright solos
    for _ in range(5):
        x, y = place(keep_out=80.0)
        specs.append(
            BlobSpec(
                id=blob_id,
                trajectory=tuple(jitter_path(x, y)),
                radius=int(rng.integers(7, 11)),
                nucleus_intensity=int(rng.integers(160, 221)),
                green_nucleus_level=200,
                green_cytoplasm_level=50,
            )
        )
        blob_id += 1
    # five dim solos: detectable only at low thresholds, pulling the
    # max-nuclei landmark (and thus the selected threshold) below the
    # speckle intensity
    for _ in range(5):
        x, y = place(keep_out=80.0)
        specs.append(
            BlobSpec(
                id=blob_id,
                trajectory=tuple(jitter_path(x, y)),
                radius=int(rng.integers(6, 10)),
                nucleus_intensity=int(rng.integers(100, 109)),
                green_nucleus_level=200,
                green_cytoplasm_level=50,
            )
        )
        blob_id += 1

    return BenchmarkSequence(
        specs=specs,
        frames=frames,
        width=width,
        height=height,
        noise_density=0.002,
        noise_amplitude=150,
        seed=seed,
    )


def write_sequence(frames: list[np.ndarray], out_dir: Path | str) -> list[Path]:
    """Write frames as zero-padded grayscale PNGs (frame_0000.png, ...)."""
    from PIL import Image

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        path = out_dir / f"frame_{i:04d}.png"
        Image.fromarray(frame, mode="L").save(path)
        paths.append(path)
    return paths


def write_ground_truth_json(truth: GroundTruth, specs: list[BlobSpec], path: Path | str) -> None:
    payload = {
        "width": truth.width,
        "height": truth.height,
        "blobs": [
            {
                "id": spec.id,
                "radius": spec.radius,
                "nucleus_intensity": spec.nucleus_intensity,
                "green_nucleus_level": spec.green_nucleus_level,
                "green_cytoplasm_level": spec.green_cytoplasm_level,
                "signal_ratio": truth.ratios[spec.id],
            }
            for spec in specs
        ],
        "frames": [
            {
                "index": i,
                "blobs": [
                    {"id": b.id, "x": b.centroid[0], "y": b.centroid[1], "radius": b.radius}
                    for b in blobs
                ],
            }
            for i, blobs in enumerate(truth.frames)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
