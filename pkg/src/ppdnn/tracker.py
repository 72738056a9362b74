"""Lightweight multi-object tracker: greedy IoU association with
constant-velocity box prediction.

Velocity is the raw one-frame difference (dx, dy, dh, dw) between the
consecutive boxes of a track; it doubles as the box-motion estimate consumed
by the segmentation predictor.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .core import BBox, Detection, ObjectClass, iou

Velocity = tuple[float, float, float, float]

ZERO_VELOCITY: Velocity = (0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Track:
    id: int
    box: BBox
    velocity: Velocity = ZERO_VELOCITY
    age: int = 0
    miss_count: int = 0
    class_id: ObjectClass = ObjectClass.OTHER


@dataclass(frozen=True)
class TrackerOutput:
    tracked: tuple[Track, ...]
    missed_count: int
    new_count: int
    mean_tracked_iou: float


def shift_box(
    box: BBox,
    velocity: Velocity,
    frame_width: float | None = None,
    frame_height: float | None = None,
) -> BBox:
    """Apply one velocity step to a box: (x+dx, y+dy, h+dh, w+dw).

    Dimensions are floored at 1 pixel; the origin is clamped to stay
    non-negative and, when frame bounds are given, the box is clipped into
    the frame.
    """
    dx, dy, dh, dw = velocity
    x = max(0.0, box.x + dx)
    y = max(0.0, box.y + dy)
    w = max(1.0, box.w + dw)
    h = max(1.0, box.h + dh)
    if frame_width is not None:
        x = min(x, frame_width - 1.0)
        w = max(1.0, min(w, frame_width - x))
    if frame_height is not None:
        y = min(y, frame_height - 1.0)
        h = max(1.0, min(h, frame_height - y))
    return BBox(x, y, w, h)


def predict(
    track: Track,
    frame_width: float | None = None,
    frame_height: float | None = None,
) -> BBox:
    """The track's box advanced by one velocity step."""
    return shift_box(track.box, track.velocity, frame_width, frame_height)


class IouTracker:
    """Per-stream tracker state; calls to :meth:`step` must be serialized."""

    def __init__(
        self,
        match_threshold: float = 0.3,
        max_misses: int = 3,
        frame_width: float | None = None,
        frame_height: float | None = None,
        velocity_smoothing: float = 0.0,
    ):
        if not 0.0 <= velocity_smoothing < 1.0:
            raise ValueError("velocity_smoothing must be in [0, 1)")
        self.match_threshold = match_threshold
        self.max_misses = max_misses
        self.frame_width = frame_width
        self.frame_height = frame_height
        self.velocity_smoothing = velocity_smoothing
        self.tracks: list[Track] = []
        self._next_id = 0
        self._last_seq: int | None = None

    def step(self, detections: list[Detection], frame_seq: int) -> TrackerOutput:
        """Associate detections to tracks and update the track set.

        Matching is greedy highest-IoU-first between velocity-advanced track
        boxes and detections; a pair is accepted iff IoU >= match_threshold.
        """
        if self._last_seq is not None and frame_seq <= self._last_seq:
            raise ValueError(f"frame_seq must increase, got {frame_seq} after {self._last_seq}")
        self._last_seq = frame_seq

        had_tracks = bool(self.tracks)
        predicted = [predict(t, self.frame_width, self.frame_height) for t in self.tracks]

        pairs = []
        for ti, pbox in enumerate(predicted):
            for di, det in enumerate(detections):
                v = iou(pbox, det.box)
                if v >= self.match_threshold:
                    pairs.append((v, ti, di))
        pairs.sort(key=lambda p: (-p[0], p[1], p[2]))

        matched_t: dict[int, int] = {}
        matched_d: set[int] = set()
        matched_ious: list[float] = []
        for v, ti, di in pairs:
            if ti in matched_t or di in matched_d:
                continue
            matched_t[ti] = di
            matched_d.add(di)
            matched_ious.append(v)

        s = self.velocity_smoothing
        updated: list[Track] = []
        missed = 0
        for ti, track in enumerate(self.tracks):
            if ti in matched_t:
                det = detections[matched_t[ti]]
                raw = (
                    det.box.x - track.box.x,
                    det.box.y - track.box.y,
                    det.box.h - track.box.h,
                    det.box.w - track.box.w,
                )
                if s > 0.0:
                    vel = tuple(s * old + (1.0 - s) * new
                                for old, new in zip(track.velocity, raw))
                else:
                    vel = raw
                updated.append(
                    replace(track, box=det.box, velocity=vel, age=track.age + 1, miss_count=0)
                )
            else:
                missed += 1
                if track.miss_count + 1 <= self.max_misses:
                    updated.append(
                        replace(track, age=track.age + 1, miss_count=track.miss_count + 1)
                    )

        new_count = 0
        for di, det in enumerate(detections):
            if di in matched_d:
                continue
            updated.append(
                Track(id=self._next_id, box=det.box, velocity=ZERO_VELOCITY,
                      age=0, miss_count=0, class_id=det.class_id)
            )
            self._next_id += 1
            new_count += 1

        self.tracks = updated
        if matched_ious:
            mean_iou = sum(matched_ious) / len(matched_ious)
        else:
            # Vacuously perfect when there was nothing to re-associate.
            mean_iou = 1.0 if not had_tracks else 0.0
        return TrackerOutput(
            tracked=tuple(updated),
            missed_count=missed,
            new_count=new_count,
            mean_tracked_iou=mean_iou,
        )
