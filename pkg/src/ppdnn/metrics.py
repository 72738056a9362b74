"""Evaluation metrics over completed runs: detection completeness, fusion
delay statistics, and cost-effectiveness."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .core import TASKS, BBox, TaskId, iou
from .traceio import read_trace


@dataclass(frozen=True)
class DetectionSeries:
    """Time-ordered per-frame detection lists: parallel timestamps, boxes
    and scores."""

    timestamps: tuple[float, ...]
    boxes: tuple[tuple[BBox, ...], ...]
    scores: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not (len(self.timestamps) == len(self.boxes) == len(self.scores)):
            raise ValueError("timestamps, boxes and scores must be parallel")
        if any(
            self.timestamps[i] > self.timestamps[i + 1]
            for i in range(len(self.timestamps) - 1)
        ):
            raise ValueError("timestamps must be non-decreasing")

    def __len__(self) -> int:
        return len(self.timestamps)


def max_iou(candidates, box: BBox) -> tuple[float, int]:
    """Highest IoU of ``box`` against ``candidates`` and its index; (0, -1)
    for an empty candidate list."""
    best, best_idx = 0.0, -1
    for idx, cand in enumerate(candidates):
        v = iou(cand, box)
        if v > best:
            best, best_idx = v, idx
    return best, best_idx


def _completeness_counts(
    keyframe: DetectionSeries,
    offline: DetectionSeries,
    while_advance: bool,
    score_threshold: float,
    iou_threshold: float,
) -> tuple[int, int, list[tuple[float, int, int]]]:
    if len(keyframe) == 0:
        raise ValueError("keyframe series is empty")
    detected = objects = 0
    per_frame: list[tuple[float, int, int]] = []
    index_key = 0
    last = len(keyframe) - 1
    for index in range(len(offline)):
        t_a = offline.timestamps[index]
        if while_advance:
            while index_key < last and t_a > keyframe.timestamps[index_key]:
                index_key += 1
        elif index_key < last and t_a > keyframe.timestamps[index_key]:
            index_key += 1
        frame_objects = frame_detected = 0
        key_boxes = keyframe.boxes[index_key]
        key_scores = keyframe.scores[index_key]
        for box_id, box in enumerate(offline.boxes[index]):
            m_iou, nmax = max_iou(key_boxes, box)
            if offline.scores[index][box_id] > score_threshold:
                frame_objects += 1
                if m_iou > iou_threshold and nmax >= 0 and key_scores[nmax] > score_threshold:
                    frame_detected += 1
        objects += frame_objects
        detected += frame_detected
        per_frame.append((t_a, frame_objects, frame_detected))
    return detected, objects, per_frame


def detection_completeness(
    keyframe: DetectionSeries,
    offline: DetectionSeries,
    while_advance: bool = False,
    score_threshold: float = 0.5,
    iou_threshold: float = 0.5,
) -> float:
    """Fraction of confidently scored offline objects that the keyframe
    stream also detects (IoU and score above threshold).

    Offline frames map onto keyframe entries through a streaming index that
    advances one step per offline frame by default; ``while_advance=True``
    lets it catch up fully, which matters when keyframes are sparse.
    """
    detected, objects, _ = _completeness_counts(
        keyframe, offline, while_advance, score_threshold, iou_threshold
    )
    if objects == 0:
        raise ValueError("no scorable objects")
    return detected / objects


def completeness_per_frame(
    keyframe: DetectionSeries,
    offline: DetectionSeries,
    while_advance: bool = False,
    score_threshold: float = 0.5,
    iou_threshold: float = 0.5,
) -> list[tuple[float, float]]:
    """Per-offline-frame completeness samples (timestamp, detected/objects),
    skipping frames without scorable objects."""
    _, _, per_frame = _completeness_counts(
        keyframe, offline, while_advance, score_threshold, iou_threshold
    )
    return [(t, det / obj) for t, obj, det in per_frame if obj > 0]


def cost_effectiveness(
    avg_latency_ms: float,
    fusion_percent: float,
    avg_dc: float,
    scale: float = 1.0,
) -> float:
    """Average fusion latency over (fusion ratio x mean completeness); lower
    is better. ``scale`` only rescales for presentation."""
    if fusion_percent <= 0 or avg_dc <= 0:
        raise ValueError("fusion_percent and avg_dc must be positive")
    return scale * avg_latency_ms / (fusion_percent * avg_dc)


@dataclass(frozen=True)
class DelayStats:
    mean: float
    p50: float
    p99: float
    min: float
    max: float
    range: float

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "p50": self.p50,
            "p99": self.p99,
            "min": self.min,
            "max": self.max,
            "range": self.range,
        }


def _nearest_rank(sorted_values: list[float], q: float) -> float:
    rank = max(1, math.ceil(q * len(sorted_values)))
    return sorted_values[rank - 1]


def delay_stats(samples) -> DelayStats:
    values = sorted(samples)
    if not values:
        raise ValueError("no delay samples")
    return DelayStats(
        mean=sum(values) / len(values),
        p50=_nearest_rank(values, 0.50),
        p99=_nearest_rank(values, 0.99),
        min=values[0],
        max=values[-1],
        range=values[-1] - values[0],
    )


def write_cdf(path, samples) -> None:
    """Two-column CSV (value, cumulative probability) for external plotting."""
    values = sorted(samples)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("value,cum_prob\n")
        n = len(values)
        for i, v in enumerate(values):
            fh.write(f"{v},{(i + 1) / n}\n")


def _series_from_rows(rows) -> DetectionSeries:
    timestamps, boxes, scores = [], [], []
    for row in rows:
        timestamps.append(row["timestamp_ms"])
        boxes.append(tuple(BBox(*item["box"]) for item in row["payload"]))
        scores.append(tuple(item["score"] for item in row["payload"]))
    return DetectionSeries(tuple(timestamps), tuple(boxes), tuple(scores))


def offline_series(frames, task: TaskId) -> DetectionSeries:
    """Ground-truth series for one task, as an offline full-rate run would
    produce: truths for object detection, drivable-band extents for lanes,
    all segmentation extents for segmentation."""
    timestamps, boxes, scores = [], [], []
    for frame in frames:
        timestamps.append(frame.timestamp_ms)
        if task is TaskId.OBJECT_DETECTION:
            boxes.append(tuple(d.box for d in frame.truths))
            scores.append(tuple(d.score for d in frame.truths))
        else:
            if task is TaskId.LANE_DETECTION:
                items = [sb for sb in frame.seg_boxes if sb[0].value == "other"]
            else:
                items = list(frame.seg_boxes)
            boxes.append(tuple(b for _, b in items))
            scores.append(tuple(1.0 for _ in items))
    return DetectionSeries(tuple(timestamps), tuple(boxes), tuple(scores))


def published_series(published_rows, task: TaskId) -> DetectionSeries:
    """Published output stream of one task, ordered by capture timestamp."""
    rows = [r for r in published_rows if r["task"] == task.value]
    rows.sort(key=lambda r: r["timestamp_ms"])
    if not rows:
        raise ValueError(f"no published outputs for task {task.value}")
    return _series_from_rows(rows)


def load_report(report_dir) -> dict:
    """Read back a saved run directory: summary, fusion rows, published rows."""
    with open(os.path.join(report_dir, "report.json"), "r", encoding="ascii") as fh:
        summary = json.load(fh)
    published = []
    with open(os.path.join(report_dir, "published.jsonl"), "r", encoding="ascii") as fh:
        for line in fh:
            if line.strip():
                published.append(json.loads(line))
    delays = []
    with open(os.path.join(report_dir, "fusion.csv"), "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        idx = header.index("fusion_delay_ms")
        for line in fh:
            if line.strip():
                delays.append(float(line.split(",")[idx]))
    return {"summary": summary, "published": published, "delays": delays}


def evaluate_report(
    report_dir,
    trace_path=None,
    while_advance: bool = False,
    ce_scale: float = 1.0,
    write_outputs: bool = True,
) -> dict:
    """Metrics for one run directory: per-task completeness, delay stats and
    cost-effectiveness. Writes metrics.json plus the two CDF files unless
    ``write_outputs`` is off."""
    data = load_report(report_dir)
    summary = data["summary"]
    trace_path = trace_path or summary["trace"]["path"]
    if not trace_path:
        raise ValueError("report does not record a trace path; pass trace_path")
    _, frames = read_trace(trace_path)

    d_c: dict[str, float] = {}
    object_dc_samples: list[float] = []
    for task in TASKS:
        offline = offline_series(frames, task)
        keyframe = published_series(data["published"], task)
        d_c[task.value] = detection_completeness(keyframe, offline, while_advance)
        if task is TaskId.OBJECT_DETECTION:
            object_dc_samples = [
                v for _, v in completeness_per_frame(keyframe, offline, while_advance)
            ]

    delays = data["delays"]
    stats = delay_stats(delays) if delays else None
    fusion_percent = summary["fusion"]["percent"]
    avg_dc = sum(d_c.values()) / len(d_c)
    ce = (
        cost_effectiveness(stats.mean, fusion_percent, avg_dc, ce_scale)
        if stats is not None and fusion_percent > 0 and avg_dc > 0
        else None
    )
    metrics = {
        "mode": summary["mode"],
        "seed": summary["seed"],
        "trace_sha256": summary["trace"]["sha256"],
        "processed": summary["processed"],
        "fusion_bundles": summary["fusion"]["bundles"],
        "fusion_percent": fusion_percent,
        "fusion_delay_ms": stats.as_dict() if stats else None,
        "detection_completeness": d_c,
        "avg_detection_completeness": avg_dc,
        "cost_effectiveness": ce,
        "cost_effectiveness_scale": ce_scale,
    }
    if write_outputs:
        with open(os.path.join(report_dir, "metrics.json"), "w", encoding="ascii") as fh:
            json.dump(metrics, fh, sort_keys=True, indent=2)
            fh.write("\n")
        if delays:
            write_cdf(os.path.join(report_dir, "cdf_fusion_delay.csv"), delays)
        if object_dc_samples:
            write_cdf(os.path.join(report_dir, "cdf_dc.csv"), object_dc_samples)
    return metrics
