import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nuctrack.regions import Region
from nuctrack.tracker import (
    FrameAssociation,
    TrackStatus,
    associate_frame,
    candidates_bbox_contains_centroid,
    candidates_centroid_in_bbox,
    live_tracks,
    update_tracks,
)


def region(label, cx, cy, half=5, area=None):
    x0, y0 = int(round(cx - half)), int(round(cy - half))
    x1, y1 = int(round(cx + half)), int(round(cy + half))
    return Region(label=label, area=area or (2 * half + 1) ** 2, centroid=(cx, cy), bbox=(x0, y0, x1, y1))


def boxed(label, bbox, centroid):
    return Region(label=label, area=1, centroid=centroid, bbox=bbox)


def test_bbox_contains_centroid_inside():
    prev = [boxed(1, (0, 0, 10, 10), (5.0, 5.0))]
    assert candidates_bbox_contains_centroid(prev, boxed(9, (4, 4, 6, 6), (5.0, 5.0))) == prev


def test_bbox_contains_centroid_inclusive_edge():
    prev = [boxed(1, (0, 0, 10, 10), (5.0, 5.0))]
    assert candidates_bbox_contains_centroid(prev, boxed(9, (9, 9, 11, 11), (10.0, 10.0))) == prev


def test_bbox_contains_centroid_outside():
    prev = [boxed(1, (0, 0, 10, 10), (5.0, 5.0))]
    assert candidates_bbox_contains_centroid(prev, boxed(9, (10, 2, 11, 4), (10.5, 3.0))) == []


def test_centroid_in_bbox_inside():
    prev = [boxed(1, (20, 20, 30, 30), (5.0, 5.0))]
    assert candidates_centroid_in_bbox(prev, boxed(9, (0, 0, 10, 10), (5.0, 5.0))) == prev


def test_centroid_in_bbox_outside():
    prev = [boxed(1, (20, 20, 30, 30), (11.0, 5.0))]
    assert candidates_centroid_in_bbox(prev, boxed(9, (0, 0, 10, 10), (5.0, 5.0))) == []


def test_centroid_in_bbox_empty_prev():
    assert candidates_centroid_in_bbox([], boxed(9, (0, 0, 10, 10), (5.0, 5.0))) == []


def test_mutual_containment_gives_single_match():
    prev = [boxed(1, (0, 0, 10, 10), (5.0, 5.0))]
    curr = [boxed(1, (1, 1, 11, 11), (6.0, 6.0))]
    association = associate_frame(prev, curr)
    assert association.matches == [(1, 1)]
    assert association.exclusions == []


def test_conflicting_claims_exclude_both():
    # one previous blob is the unique candidate of two current blobs
    prev = [region(1, 10.0, 10.0, half=6)]
    curr = [region(1, 8.0, 10.0, half=2), region(2, 12.0, 10.0, half=2)]
    association = associate_frame(prev, curr)
    assert association.matches == []
    assert sorted(association.exclusions) == [1, 2]


def test_far_region_is_excluded():
    prev = [region(1, 10.0, 10.0)]
    curr = [region(7, 100.0, 100.0)]
    association = associate_frame(prev, curr)
    assert association.matches == []
    assert association.exclusions == [7]


def test_two_candidates_exclude_current():
    prev = [region(1, 10.0, 10.0, half=6), region(2, 16.0, 10.0, half=6)]
    curr = [region(5, 13.0, 10.0, half=6)]
    association = associate_frame(prev, curr)
    assert association.matches == []
    assert association.exclusions == [5]


def test_duplicate_labels_rejected():
    prev = [region(1, 10.0, 10.0), region(1, 40.0, 40.0)]
    with pytest.raises(ValueError):
        associate_frame(prev, [region(2, 10.0, 10.0)])


def test_frame_zero_starts_tracks():
    tracks = update_tracks([], None, [region(3, 5.0, 5.0), region(7, 20.0, 20.0), region(9, 40.0, 40.0)], 0)
    assert [t.id for t in tracks] == [1, 2, 3]
    assert all(t.status is TrackStatus.LIVE for t in tracks)
    assert all(len(t.history) == 1 for t in tracks)


def test_matched_track_grows():
    tracks = update_tracks([], None, [region(1, 10.0, 10.0)], 0)
    curr = [region(4, 11.0, 10.0)]
    association = associate_frame([tracks[0].last_region], curr)
    update_tracks(tracks, association, curr, 1)
    assert tracks[0].status is TrackStatus.LIVE
    assert len(tracks[0].history) == 2
    assert tracks[0].last_frame == 1


def test_unmatched_track_is_excluded_and_frozen():
    tracks = update_tracks([], None, [region(1, 10.0, 10.0)], 0)
    update_tracks(tracks, associate_frame([tracks[0].last_region], []), [], 1)
    assert tracks[0].status is TrackStatus.EXCLUDED
    assert len(tracks[0].history) == 1
    # an excluded track never grows again even if matched geometry reappears
    curr = [region(2, 10.0, 10.0)]
    update_tracks(tracks, associate_frame([], curr), curr, 2)
    assert len(tracks[0].history) == 1
    assert live_tracks(tracks) == []


def test_excluded_current_regions_do_not_start_tracks():
    tracks = update_tracks([], None, [region(1, 10.0, 10.0)], 0)
    curr = [region(1, 11.0, 10.0), region(2, 200.0, 200.0)]
    association = associate_frame([tracks[0].last_region], curr)
    update_tracks(tracks, association, curr, 1)
    assert len(tracks) == 1


def test_match_to_unknown_current_region_is_an_error():
    tracks = update_tracks([], None, [region(1, 10.0, 10.0)], 0)
    bogus = FrameAssociation(matches=[(1, 99)], exclusions=[])
    with pytest.raises(ValueError):
        update_tracks(tracks, bogus, [region(1, 10.0, 10.0)], 1)


def test_out_of_order_frame_rejected():
    tracks = update_tracks([], None, [region(1, 10.0, 10.0)], 0)
    curr = [region(1, 10.0, 10.0)]
    with pytest.raises(ValueError):
        update_tracks(tracks, associate_frame(curr, curr), curr, 5)


regions_strategy = st.lists(
    st.tuples(
        st.floats(0, 100, allow_nan=False),
        st.floats(0, 100, allow_nan=False),
        st.integers(1, 8),
    ),
    min_size=0,
    max_size=12,
).map(
    lambda triples: [
        region(i + 1, round(cx, 1), round(cy, 1), half=half)
        for i, (cx, cy, half) in enumerate(triples)
    ]
)


@settings(max_examples=200, deadline=None)
@given(regions_strategy, regions_strategy)
def test_association_is_injective_both_ways(prev, curr):
    association = associate_frame(prev, curr)
    prev_side = [m[0] for m in association.matches]
    curr_side = [m[1] for m in association.matches]
    assert len(set(prev_side)) == len(prev_side)
    assert len(set(curr_side)) == len(curr_side)
    assert set(curr_side).isdisjoint(association.exclusions)
    assert len(curr_side) + len(association.exclusions) == len(curr)


@settings(max_examples=50, deadline=None)
@given(st.lists(regions_strategy, min_size=1, max_size=6))
def test_track_count_never_increases_after_frame_zero(frames):
    tracks = update_tracks([], None, frames[0], 0)
    counts = [len(live_tracks(tracks))]
    prev = frames[0]
    for index, curr in enumerate(frames[1:], start=1):
        update_tracks(tracks, associate_frame(prev, curr), curr, index)
        counts.append(len(live_tracks(tracks)))
        prev = curr
    assert len(tracks) == len(frames[0])
    assert all(a >= b for a, b in zip(counts, counts[1:]))


@given(regions_strategy, regions_strategy)
def test_association_is_deterministic(prev, curr):
    assert associate_frame(prev, curr) == associate_frame(prev, curr)
