"""Critical-frame selection and ROI construction.

A frame is critical when the inter-critical interval times out, the traffic
scenario demands it, the thumbnail SSIM against the previous frame drops, or
the tracker loses objects. Critical frames get two ROI candidates: a batch of
per-track boxes and a single rectangle covering all of them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    MOVING_CLASSES,
    STATIONARY_CLASSES,
    BBox,
    FrameRecord,
    ObjectClass,
    clip,
    union_cover,
)
from .similarity import SsimParams, ssim
from .tracker import TrackerOutput


class ROIMode(str, Enum):
    ONE_ROI = "one_roi"
    MULTI_ROI = "multi_roi"
    FULL_FRAME = "full_frame"


class Reason(str, Enum):
    INTERVAL = "interval"
    SCENARIO = "scenario"
    SSIM = "ssim"
    MISSES = "misses"
    NOT_CRITICAL = "not_critical"


@dataclass(frozen=True)
class ROISet:
    mode: ROIMode
    boxes: tuple[BBox, ...]

    def __post_init__(self) -> None:
        if not self.boxes:
            raise ValueError("ROISet must hold at least one box")
        if self.mode in (ROIMode.ONE_ROI, ROIMode.FULL_FRAME) and len(self.boxes) != 1:
            raise ValueError(f"{self.mode.value} must hold exactly one box")


@dataclass(frozen=True)
class ScenarioSnapshot:
    moving_ratio: float = 0.0
    stationary_ratio: float = 0.0
    pedestrian_ratio: float = 0.0
    safety_critical: bool = False


@dataclass(frozen=True)
class KeyframeConfig:
    ssim_threshold: float = 0.95
    miss_threshold: int = 1
    tracked_iou_threshold: float = 0.5
    interval_deadline_ms: float = 500.0
    pedestrian_ratio_threshold: float = 0.5
    stationary_ratio_epsilon: float = 0.05
    roi_margin_px: float = 8.0
    # Prose-only rules can be switched off to reproduce the bare selection
    # cascade; the literal one-ROI formula takes per-axis minima/maxima
    # instead of the union extent.
    use_mean_iou_rule: bool = True
    scenario_roi_rules: bool = True
    literal_one_roi: bool = False
    ssim_params: SsimParams = field(default_factory=SsimParams)

    def __post_init__(self) -> None:
        if self.interval_deadline_ms < 0:
            raise ValueError("interval_deadline_ms must be >= 0")
        if self.roi_margin_px < 0:
            raise ValueError("roi_margin_px must be >= 0")


@dataclass(frozen=True)
class KeyframeDecision:
    frame_seq: int
    is_critical: bool
    reason: Reason
    ssim_value: float | None = None
    roi_candidates: tuple[ROISet, ROISet] | None = None  # (one-ROI, multi-ROI)


def classify_scenario(
    detections,
    pedestrian_ratio_threshold: float = 0.5,
    score_threshold: float = 0.5,
) -> ScenarioSnapshot:
    """Class-ratio snapshot over confidently scored detections."""
    scored = [d for d in detections if d.score > score_threshold]
    if not scored:
        return ScenarioSnapshot()
    n = len(scored)
    moving = sum(1 for d in scored if d.class_id in MOVING_CLASSES)
    stationary = sum(1 for d in scored if d.class_id in STATIONARY_CLASSES)
    pedestrians = sum(1 for d in scored if d.class_id is ObjectClass.PEDESTRIAN)
    ped_ratio = pedestrians / n
    return ScenarioSnapshot(
        moving_ratio=moving / n,
        stationary_ratio=stationary / n,
        pedestrian_ratio=ped_ratio,
        safety_critical=ped_ratio > pedestrian_ratio_threshold,
    )


def _pad_and_clip(box: BBox, margin: float, width: float, height: float) -> BBox:
    x = max(0.0, box.x - margin)
    y = max(0.0, box.y - margin)
    padded = BBox(x, y, box.x2 - x + margin, box.y2 - y + margin)
    return clip(padded, width, height)


def build_rois(
    tracker_out: TrackerOutput,
    scenario: ScenarioSnapshot,
    frame: FrameRecord,
    cfg: KeyframeConfig | None = None,
) -> tuple[ROISet, ROISet]:
    """ROI candidates (one-ROI, multi-ROI) for a critical frame.

    Multi-ROI is the per-track boxes, margin-padded and clipped; one-ROI is
    the union cover of the same boxes. With no live tracks both candidates
    degrade to the full frame. Scenario adjustments: a noticeable stationary
    ratio appends a dedicated ROI covering traffic signs/lights, and a
    safety-critical scenario forces the one-ROI to full coverage.
    """
    cfg = cfg or KeyframeConfig()
    full = ROISet(ROIMode.FULL_FRAME, (BBox(0, 0, frame.width, frame.height),))
    boxes = [t.box for t in tracker_out.tracked]
    if not boxes:
        return full, full

    padded = [_pad_and_clip(b, cfg.roi_margin_px, frame.width, frame.height) for b in boxes]

    multi = list(padded)
    if cfg.scenario_roi_rules and scenario.stationary_ratio > cfg.stationary_ratio_epsilon:
        stationary = [t.box for t in tracker_out.tracked if t.class_id in STATIONARY_CLASSES]
        if not stationary:
            stationary = [
                d.box for d in frame.truths
                if d.class_id in STATIONARY_CLASSES and d.score > 0.5
            ]
        if stationary:
            multi.append(
                _pad_and_clip(union_cover(stationary), cfg.roi_margin_px,
                              frame.width, frame.height)
            )
    multi_roi = ROISet(ROIMode.MULTI_ROI, tuple(multi))

    if cfg.scenario_roi_rules and scenario.safety_critical:
        one_roi = full
    elif cfg.literal_one_roi:
        x = min(b.x for b in padded)
        y = min(b.y for b in padded)
        w = max(b.w for b in padded)
        h = max(b.h for b in padded)
        one_roi = ROISet(ROIMode.ONE_ROI, (clip(BBox(x, y, w, h), frame.width, frame.height),))
    else:
        one_roi = ROISet(ROIMode.ONE_ROI, (union_cover(padded),))
    return one_roi, multi_roi


def decide(
    frame: FrameRecord,
    prev_thumbnail: np.ndarray | None,
    tracker_out: TrackerOutput,
    last_critical_ms: float | None,
    scenario: ScenarioSnapshot,
    cfg: KeyframeConfig | None = None,
) -> KeyframeDecision:
    """Run the selection cascade for one frame.

    Order: interval timeout / scenario trigger first, then SSIM, then
    tracker misses (and optionally the mean tracked-IoU drop, also reported
    as ``misses``). The first frame of a stream (no previous thumbnail) is
    critical by the interval rule.
    """
    cfg = cfg or KeyframeConfig()
    ssim_value: float | None = None

    if prev_thumbnail is None or last_critical_ms is None:
        reason = Reason.INTERVAL
    elif frame.timestamp_ms - last_critical_ms > cfg.interval_deadline_ms:
        reason = Reason.INTERVAL
    elif scenario.safety_critical:
        reason = Reason.SCENARIO
    else:
        ssim_value = ssim(frame.thumbnail_array(), prev_thumbnail, cfg.ssim_params)
        if ssim_value < cfg.ssim_threshold:
            reason = Reason.SSIM
        elif tracker_out.missed_count > cfg.miss_threshold:
            reason = Reason.MISSES
        elif cfg.use_mean_iou_rule and tracker_out.mean_tracked_iou < cfg.tracked_iou_threshold:
            reason = Reason.MISSES
        else:
            reason = Reason.NOT_CRITICAL

    if reason is Reason.NOT_CRITICAL:
        return KeyframeDecision(frame.seq, False, reason, ssim_value, None)
    return KeyframeDecision(
        frame.seq, True, reason, ssim_value,
        build_rois(tracker_out, scenario, frame, cfg),
    )
