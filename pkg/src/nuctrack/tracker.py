"""Frame-to-frame nucleus association and track bookkeeping.

A current-frame region is matched to the previous frame by two searches:
previous regions whose bounding rectangle contains the current centroid, and
previous regions whose centroid falls inside the current bounding rectangle.
Only a single combined candidate yields a match; zero or several candidates
exclude the region, and a previous region claimed by several current regions
invalidates all of its matches. Excluded tracks are frozen for the rest of
the run, and new tracks are only ever born in frame 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from nuctrack.regions import Region


class TrackStatus(Enum):
    LIVE = "live"
    EXCLUDED = "excluded"


@dataclass
class Track:
    """One nucleus identity: history holds (frame_index, Region) pairs with
    contiguous frame indices from the birth frame while the track is live."""

    id: int
    history: list[tuple[int, Region]] = field(default_factory=list)
    status: TrackStatus = TrackStatus.LIVE

    @property
    def last_region(self) -> Region:
        return self.history[-1][1]

    @property
    def last_frame(self) -> int:
        return self.history[-1][0]


@dataclass(frozen=True)
class FrameAssociation:
    """matches holds (previous label, current label) pairs; exclusions holds
    current labels with no unique counterpart."""

    matches: list[tuple[int, int]]
    exclusions: list[int]


def _bbox_contains(bbox: tuple[int, int, int, int], point: tuple[float, float]) -> bool:
    x, y = point
    return bbox[0] <= x <= bbox[2] and bbox[1] <= y <= bbox[3]


def candidates_bbox_contains_centroid(prev_regions: list[Region], current: Region) -> list[Region]:
    """Previous regions whose bbox contains (inclusive) the current centroid."""
    return [r for r in prev_regions if _bbox_contains(r.bbox, current.centroid)]


def candidates_centroid_in_bbox(prev_regions: list[Region], current: Region) -> list[Region]:
    """Previous regions whose centroid lies (inclusive) in the current bbox."""
    return [r for r in prev_regions if _bbox_contains(current.bbox, r.centroid)]


def _require_unique_labels(regions: list[Region], which: str) -> None:
    labels = [r.label for r in regions]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate labels in {which} regions")


def associate_frame(prev_regions: list[Region], curr_regions: list[Region]) -> FrameAssociation:
    """Match current regions to previous ones by the two containment searches.

    A current region is tentatively matched when the union of both candidate
    sets holds exactly one previous region; afterwards any previous region
    claimed by two or more current regions has all of those matches voided.
    """
    _require_unique_labels(prev_regions, "previous")
    _require_unique_labels(curr_regions, "current")

    if prev_regions:
        pb = np.array([r.bbox for r in prev_regions], np.float64)
        pc = np.array([r.centroid for r in prev_regions], np.float64)
        prev_labels = np.array([r.label for r in prev_regions], np.int64)
    tentative: list[tuple[int, int]] = []
    exclusions: list[int] = []
    claims: dict[int, int] = {}
    for curr in curr_regions:
        if not prev_regions:
            exclusions.append(curr.label)
            continue
        cx, cy = curr.centroid
        bx0, by0, bx1, by1 = curr.bbox
        rect_holds_centroid = (pb[:, 0] <= cx) & (cx <= pb[:, 2]) & (pb[:, 1] <= cy) & (cy <= pb[:, 3])
        centroid_in_rect = (
            (bx0 <= pc[:, 0]) & (pc[:, 0] <= bx1) & (by0 <= pc[:, 1]) & (pc[:, 1] <= by1)
        )
        candidates = rect_holds_centroid | centroid_in_rect
        if int(candidates.sum()) == 1:
            prev_label = int(prev_labels[np.flatnonzero(candidates)[0]])
            tentative.append((prev_label, curr.label))
            claims[prev_label] = claims.get(prev_label, 0) + 1
        else:
            exclusions.append(curr.label)

    matches = []
    for prev_label, curr_label in tentative:
        if claims[prev_label] > 1:
            exclusions.append(curr_label)
        else:
            matches.append((prev_label, curr_label))
    return FrameAssociation(matches=matches, exclusions=exclusions)


def update_tracks(
    tracks: list[Track],
    association: FrameAssociation | None,
    curr_regions: list[Region],
    frame_index: int,
) -> list[Track]:
    """Advance track state by one frame (mutates and returns `tracks`).

    Frame 0 starts one live track per detected region. Later frames extend
    live tracks whose previous region was matched, exclude live tracks that
    went unmatched, and never start new tracks.
    """
    if frame_index == 0:
        if tracks:
            raise ValueError("frame 0 must start with no existing tracks")
        for i, region in enumerate(curr_regions, start=1):
            tracks.append(Track(id=i, history=[(0, region)]))
        return tracks

    live = [t for t in tracks if t.status is TrackStatus.LIVE]
    if live:
        expected = max(t.last_frame for t in live) + 1
        if frame_index != expected:
            raise ValueError(f"frames must be processed in order: got {frame_index}, expected {expected}")
    if association is None:
        raise ValueError("association is required after frame 0")

    by_label = {r.label: r for r in curr_regions}
    matched_curr: dict[int, int] = {}
    for prev_label, curr_label in association.matches:
        if curr_label not in by_label:
            raise ValueError(f"match references unknown current region label {curr_label}")
        matched_curr[prev_label] = curr_label

    for track in live:
        prev_label = track.last_region.label
        if prev_label in matched_curr:
            track.history.append((frame_index, by_label[matched_curr[prev_label]]))
        else:
            track.status = TrackStatus.EXCLUDED
    return tracks


def live_tracks(tracks: list[Track]) -> list[Track]:
    return [t for t in tracks if t.status is TrackStatus.LIVE]
