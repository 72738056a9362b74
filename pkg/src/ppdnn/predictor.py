"""Detection prediction for non-critical frames.

Each task caches its most recent critical-frame outputs (ring of 10); between
inferences the box predictor merges tracker boxes into the cached detections,
the segmentation predictor shifts cached extents by matched track velocities,
and lane results are simply republished.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .core import BBox, Detection, ObjectClass, TaskId, iou
from .tracker import TrackerOutput, shift_box

CACHE_CAPACITY = 10


@dataclass(frozen=True)
class CacheEntry:
    frame_seq: int
    timestamp_ms: float
    payload: tuple


@dataclass(frozen=True)
class PredictedOutput:
    frame_seq: int
    timestamp_ms: float
    task: TaskId
    payload: tuple
    provenance: str  # "inference" | "predicted"


class DetectionCache:
    """Per-task ring of recent critical-frame results, oldest evicted first.

    Entries are immutable, so the single inference writer and concurrent
    prediction readers always observe complete values.
    """

    def __init__(self, capacity: int = CACHE_CAPACITY):
        self._rings: dict[TaskId, deque[CacheEntry]] = {
            task: deque(maxlen=capacity) for task in TaskId
        }

    def insert(self, task: TaskId, frame_seq: int, timestamp_ms: float, payload) -> None:
        ring = self._rings[task]
        if ring and frame_seq < ring[-1].frame_seq:
            raise ValueError(
                f"cache insert out of order: {frame_seq} after {ring[-1].frame_seq}"
            )
        ring.append(CacheEntry(frame_seq, timestamp_ms, tuple(payload)))

    def newest(self, task: TaskId) -> CacheEntry:
        ring = self._rings[task]
        if not ring:
            raise LookupError(f"no critical detection cached for {task.value}")
        return ring[-1]

    def entries(self, task: TaskId) -> tuple[CacheEntry, ...]:
        return tuple(self._rings[task])

    def size(self, task: TaskId) -> int:
        return len(self._rings[task])


def predict_boxes(
    cache: DetectionCache,
    tracker_out: TrackerOutput,
    predicted_score: float = 0.51,
    midband_replace: bool = False,
) -> list[Detection]:
    """Merge tracker boxes into the newest cached object detections.

    Per tracked box, against the cached set: IoU > 0.5 replaces the cached
    box (class and score kept); IoU < 0.1 keeps the cached set and appends
    the tracker box as a new detection; the 0.1..0.5 band leaves the cache
    untouched unless ``midband_replace`` is set. Cached boxes no track claims
    pass through unchanged.
    """
    entry = cache.newest(TaskId.OBJECT_DETECTION)
    cached: list[Detection] = list(entry.payload)
    out = list(cached)
    for track in tracker_out.tracked:
        best_iou, best_idx = 0.0, -1
        for idx, det in enumerate(cached):
            v = iou(track.box, det.box)
            if v > best_iou:
                best_iou, best_idx = v, idx
        if best_iou > 0.5:
            out[best_idx] = replace(cached[best_idx], box=track.box)
        elif best_iou < 0.1:
            out.append(Detection(track.class_id, track.box, predicted_score))
        elif midband_replace:
            out[best_idx] = replace(cached[best_idx], box=track.box)
    return out


def predict_segmentation(
    cache: DetectionCache,
    tracker_out: TrackerOutput,
    frame_width: float | None = None,
    frame_height: float | None = None,
) -> list[tuple[ObjectClass, BBox]]:
    """Shift cached segmentation extents by their matched tracks' velocities.

    A cached extent matched to a track (IoU > 0.5) moves by one velocity
    step; unmatched extents are unchanged. Output count equals cached count.
    """
    entry = cache.newest(TaskId.SEGMENTATION)
    out: list[tuple[ObjectClass, BBox]] = []
    for class_id, seg_box in entry.payload:
        best_iou, best_track = 0.0, None
        for track in tracker_out.tracked:
            v = iou(seg_box, track.box)
            if v > best_iou:
                best_iou, best_track = v, track
        if best_iou > 0.5 and best_track is not None:
            out.append(
                (class_id, shift_box(seg_box, best_track.velocity, frame_width, frame_height))
            )
        else:
            out.append((class_id, seg_box))
    return out


def predict_lanes(cache: DetectionCache) -> tuple:
    """Newest cached lane payload; the caller re-stamps it."""
    return cache.newest(TaskId.LANE_DETECTION).payload
