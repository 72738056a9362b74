"""Shared geometric and stream domain types used by every pipeline stage."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class ObjectClass(str, Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    BICYCLE = "bicycle"
    TRAFFIC_SIGN = "traffic_sign"
    TRAFFIC_LIGHT = "traffic_light"
    OTHER = "other"


# Moving vs. stationary split used by the traffic-scenario classifier.
MOVING_CLASSES = frozenset(
    {ObjectClass.VEHICLE, ObjectClass.PEDESTRIAN, ObjectClass.BICYCLE}
)
STATIONARY_CLASSES = frozenset({ObjectClass.TRAFFIC_SIGN, ObjectClass.TRAFFIC_LIGHT})


class TaskId(str, Enum):
    OBJECT_DETECTION = "object_detection"
    LANE_DETECTION = "lane_detection"
    SEGMENTATION = "segmentation"


#: Canonical task ordering, used for deterministic tie-breaking everywhere.
TASKS: tuple[TaskId, ...] = (
    TaskId.OBJECT_DETECTION,
    TaskId.LANE_DETECTION,
    TaskId.SEGMENTATION,
)

THUMBNAIL_SIZE = 25


@dataclass(frozen=True)
class BBox:
    """Axis-aligned pixel rectangle, top-left origin, (x, y, w, h) form."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box dimensions must be positive, got w={self.w}, h={self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"box origin must be non-negative, got x={self.x}, y={self.y}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Detection:
    """A classed, scored rectangle."""

    class_id: ObjectClass
    box: BBox
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class FrameRecord:
    """One timestamped camera frame.

    ``thumbnail`` is the 25x25 grayscale downsample stored row-major as 625
    raw bytes; ``seg_boxes`` carry per-class segmentation extents standing in
    for pixel masks.
    """

    seq: int
    timestamp_ms: float
    width: int
    height: int
    thumbnail: bytes
    truths: tuple[Detection, ...] = ()
    seg_boxes: tuple[tuple[ObjectClass, BBox], ...] = ()

    def __post_init__(self) -> None:
        if self.seq < 0:
            raise ValueError(f"seq must be non-negative, got {self.seq}")
        if len(self.thumbnail) != THUMBNAIL_SIZE * THUMBNAIL_SIZE:
            raise ValueError(
                f"thumbnail must hold {THUMBNAIL_SIZE * THUMBNAIL_SIZE} bytes, "
                f"got {len(self.thumbnail)}"
            )

    def thumbnail_array(self) -> np.ndarray:
        """Thumbnail as a float (25, 25) array suitable for SSIM arithmetic."""
        return (
            np.frombuffer(self.thumbnail, dtype=np.uint8)
            .reshape(THUMBNAIL_SIZE, THUMBNAIL_SIZE)
            .astype(np.float64)
        )


def iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union; 0 for disjoint or edge-touching boxes."""
    if a == b:
        return 1.0
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def union_cover(boxes) -> BBox:
    """Smallest axis-aligned rectangle containing every input box."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("no boxes to cover")
    x1 = min(b.x for b in boxes)
    y1 = min(b.y for b in boxes)
    x2 = max(b.x2 for b in boxes)
    y2 = max(b.y2 for b in boxes)
    return BBox(x1, y1, x2 - x1, y2 - y1)


def clip(box: BBox, width: float, height: float) -> BBox:
    """Intersect ``box`` with the frame rectangle [0, width] x [0, height]."""
    x2 = min(box.x2, width)
    y2 = min(box.y2, height)
    if box.x >= x2 or box.y >= y2:
        raise ValueError(
            f"box outside frame: {box} does not intersect {width}x{height}"
        )
    return BBox(box.x, box.y, x2 - box.x, y2 - box.y)
