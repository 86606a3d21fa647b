"""Nucleus detection, tracking, and signal quantification for two-channel
fluorescence time-lapse sequences."""

from nuctrack.imgproc import Channel, StructuringElement
from nuctrack.regions import Region
from nuctrack.tracker import Track, TrackStatus
from nuctrack.signal import SignalRecord
from nuctrack.pipeline import RunConfig, SweepResult, run, sweep

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "StructuringElement",
    "Region",
    "Track",
    "TrackStatus",
    "SignalRecord",
    "RunConfig",
    "SweepResult",
    "run",
    "sweep",
    "__version__",
]
