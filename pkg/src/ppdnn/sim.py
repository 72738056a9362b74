"""Deterministic discrete-event replay of the perception control plane.

A trace plays back at its native frame rate through the node graph: frame
source -> keyframe/ROI selection -> dispatcher -> non-preemptive FIFO
executors (a calibrated latency model stands in for GPU inference) ->
detection cache/predictor -> approximate-time fusion. Simulated time is
integer microseconds; all randomness comes from seeded generators, so a run
is a pure function of (trace, config).
"""
from __future__ import annotations

import heapq
import json
import os
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .core import TASKS, BBox, Detection, FrameRecord, ObjectClass, TaskId
from .dispatch import TaskProgress, compute_threshold, dispatch, record_completion
from .flops import FlopsModel, choose_roi, predict_roiset
from .fusion import ApproximateTimeSync, FusionMessage, SyncConfig
from .keyframe import KeyframeConfig, ROIMode, ROISet, classify_scenario, decide
from .predictor import (
    DetectionCache,
    PredictedOutput,
    predict_boxes,
    predict_lanes,
    predict_segmentation,
)
from .tracker import IouTracker
from .traceio import TraceHeader, read_trace, trace_sha256

#: Table of run modes: which of dispatcher / ROI generation / predictor are on.
MODES: dict[str, tuple[bool, bool, bool]] = {
    "baseline": (False, False, False),
    "fd": (True, False, False),
    "fd_fg": (True, True, False),
    "fd_dp": (True, False, True),
    "ppdnn": (True, True, True),
}

DEFAULT_LATENCY_TARGETS: dict[TaskId, float] = {
    TaskId.OBJECT_DETECTION: 257.4,
    TaskId.LANE_DETECTION: 311.2,
    TaskId.SEGMENTATION: 366.2,
}


class EventKind(str, Enum):
    FRAME_ARRIVAL = "frame_arrival"
    INFERENCE_COMPLETE = "inference_complete"
    PUBLISH_PREDICTION = "publish_prediction"


@dataclass(frozen=True)
class LatencyModel:
    base_ms: dict[TaskId, float]
    ms_per_gmac: dict[TaskId, float]
    noise_stddev_ms: float = 5.0
    seed: int = 0

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.base_ms.values()):
            raise ValueError("base_ms must be >= 0")
        if any(v < 0 for v in self.ms_per_gmac.values()):
            raise ValueError("ms_per_gmac must be >= 0")


def service_time(
    task: TaskId,
    rois: ROISet,
    lm: LatencyModel,
    m: FlopsModel,
    rng: np.random.Generator | None = None,
) -> float:
    """Sampled inference latency: base + cost-proportional term + noise >= 0."""
    rng = rng if rng is not None else np.random.default_rng(lm.seed)
    value = lm.base_ms[task] + lm.ms_per_gmac[task] * predict_roiset(rois, task, m)
    if lm.noise_stddev_ms > 0:
        value += float(rng.normal(0.0, lm.noise_stddev_ms))
    return max(0.0, value)


def calibrate(
    target_means: dict[TaskId, float],
    reference_rois,
    m: FlopsModel,
    base_fraction: float = 0.2,
    noise_stddev_ms: float = 5.0,
    seed: int = 0,
) -> LatencyModel:
    """Fit base + ms_per_gmac * mean(GMACs) = target for each task.

    The base share of the target is ``base_fraction``; a stream with zero
    mean cost puts the whole target into the base term.
    """
    reference_rois = list(reference_rois)
    if not reference_rois:
        raise ValueError("reference ROI stream must be non-empty")
    base_ms: dict[TaskId, float] = {}
    ms_per_gmac: dict[TaskId, float] = {}
    for task in TASKS:
        target = target_means[task]
        if target <= 0:
            raise ValueError(f"target mean for {task.value} must be positive")
        mean_gmacs = sum(predict_roiset(r, task, m) for r in reference_rois) / len(
            reference_rois
        )
        if mean_gmacs > 0:
            base_ms[task] = base_fraction * target
            ms_per_gmac[task] = (target - base_ms[task]) / mean_gmacs
        else:
            base_ms[task] = target
            ms_per_gmac[task] = 0.0
    return LatencyModel(base_ms, ms_per_gmac, noise_stddev_ms, seed)


@dataclass(frozen=True)
class ExecutorConfig:
    executor_count: int = 1
    assignment: dict[TaskId, int] = field(
        default_factory=lambda: {task: 0 for task in TASKS}
    )

    def __post_init__(self) -> None:
        for task in TASKS:
            if task not in self.assignment:
                raise ValueError(f"task {task.value} has no executor assignment")
            if not 0 <= self.assignment[task] < self.executor_count:
                raise ValueError(f"assignment for {task.value} out of range")


def shared_executor() -> ExecutorConfig:
    return ExecutorConfig()


def per_task_executors() -> ExecutorConfig:
    return ExecutorConfig(
        executor_count=len(TASKS),
        assignment={task: i for i, task in enumerate(TASKS)},
    )


@dataclass(frozen=True)
class DetectorEmulator:
    """Ground-truth pass-through with optional dropout and box jitter."""

    dropout_rate: float = 0.0
    jitter_px: float = 0.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.dropout_rate <= 1.0:
            raise ValueError("dropout_rate must be in [0, 1]")


@dataclass
class RunConfig:
    mode: str = "ppdnn"
    seed: int = 0
    keyframe: KeyframeConfig = field(default_factory=KeyframeConfig)
    flops: FlopsModel = field(default_factory=FlopsModel)
    sync: SyncConfig = field(default_factory=SyncConfig)
    emulator: DetectorEmulator = field(default_factory=DetectorEmulator)
    latency: LatencyModel | None = None  # explicit model wins over targets
    latency_targets: dict[TaskId, float] = field(
        default_factory=lambda: dict(DEFAULT_LATENCY_TARGETS)
    )
    latency_base_fraction: float = 0.2
    noise_stddev_ms: float = 5.0
    # Per-frame latency budget. The rule-3 threshold derives from it, and the
    # admission window it opens must outlast roughly two service times or the
    # bypass slot goes stale before the executor frees, tripping rule 1.
    deadline_ms: float = 800.0
    executor: str = "per_task"  # "per_task" | "shared"
    queue_depth: int = 100  # fan-out queue bound without the dispatcher
    dispatch_queue_depth: int = 1  # dispatcher bypass bound per task
    route_all_missed: bool = True
    predictor_latency_ms: float = 5.0
    predicted_score: float = 0.51
    tracker_match_threshold: float = 0.3
    tracker_max_misses: int = 3

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; valid: {sorted(MODES)}")
        if self.executor not in ("per_task", "shared"):
            raise ValueError("executor must be 'per_task' or 'shared'")
        if self.queue_depth < 1 or self.dispatch_queue_depth < 1:
            raise ValueError("queue depths must be >= 1")


@dataclass
class SimReport:
    mode: str
    seed: int
    trace: dict
    config: dict
    processed: dict[str, int]
    published_counts: dict[str, dict[str, int]]
    frames_with_output: dict[str, int]
    fusion_rows: list[dict]
    fusion_totals: dict
    dispatch_rows: list[dict]
    published_rows: list[dict]
    seq_gap_samples: list[int]
    executor_intervals: list[tuple]
    queue_drops: dict[str, int]
    events_processed: int

    @property
    def frame_count(self) -> int:
        return self.trace["frames"]

    @property
    def bundle_count(self) -> int:
        return len(self.fusion_rows)

    @property
    def fusion_percent(self) -> float:
        return self.bundle_count / self.frame_count if self.frame_count else 0.0

    @property
    def delay_samples(self) -> list[float]:
        return [row["fusion_delay_ms"] for row in self.fusion_rows]

    def summary(self) -> dict:
        from .metrics import delay_stats

        delays = self.delay_samples
        return {
            "mode": self.mode,
            "seed": self.seed,
            "trace": self.trace,
            "config": self.config,
            "processed": self.processed,
            "published": self.published_counts,
            "frames_with_output": self.frames_with_output,
            "fusion": {
                "bundles": self.bundle_count,
                "percent": self.fusion_percent,
                **self.fusion_totals,
                "delay_ms": delay_stats(delays).as_dict() if delays else None,
            },
            "queue_drops": self.queue_drops,
            "seq_gap": {
                "samples": len(self.seq_gap_samples),
                "over_10": sum(1 for g in self.seq_gap_samples if g > 10),
                "max": max(self.seq_gap_samples, default=0),
            },
            "events_processed": self.events_processed,
        }

    def save(self, out_dir) -> None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w", encoding="ascii") as fh:
            json.dump(self.summary(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        with open(os.path.join(out_dir, "fusion.csv"), "w", encoding="ascii") as fh:
            cols = ["bundle_id"]
            for task in TASKS:
                cols += [f"{task.value}_seq", f"{task.value}_provenance"]
            cols += ["fused_at_ms", "fusion_delay_ms", "ts_spread_ms", "seq_spread"]
            fh.write(",".join(cols) + "\n")
            for row in self.fusion_rows:
                fh.write(",".join(str(row[c]) for c in cols) + "\n")
        with open(os.path.join(out_dir, "dispatch.csv"), "w", encoding="ascii") as fh:
            fh.write("frame_seq,task,action,rule,delay\n")
            for row in self.dispatch_rows:
                fh.write(
                    f"{row['frame_seq']},{row['task']},{row['action']},"
                    f"{row['rule']},{row['delay']}\n"
                )
        with open(os.path.join(out_dir, "published.jsonl"), "w", encoding="ascii") as fh:
            for row in self.published_rows:
                fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def _payload_rows(task: TaskId, payload) -> list[dict]:
    rows = []
    if task is TaskId.OBJECT_DETECTION:
        for det in payload:
            rows.append(
                {
                    "class": det.class_id.value,
                    "box": [det.box.x, det.box.y, det.box.w, det.box.h],
                    "score": det.score,
                }
            )
    else:
        for class_id, box in payload:
            rows.append(
                {"class": class_id.value, "box": [box.x, box.y, box.w, box.h], "score": 1.0}
            )
    return rows


def _overlap(box: BBox, roi: BBox) -> BBox | None:
    x1, y1 = max(box.x, roi.x), max(box.y, roi.y)
    x2, y2 = min(box.x2, roi.x2), min(box.y2, roi.y2)
    if x2 - x1 <= 0 or y2 - y1 <= 0:
        return None
    return BBox(x1, y1, x2 - x1, y2 - y1)


def _crop_to_rois(box: BBox, rois: ROISet) -> BBox | None:
    best, best_area = None, 0.0
    for roi_box in rois.boxes:
        cut = _overlap(box, roi_box)
        if cut is not None and cut.area > best_area:
            best, best_area = cut, cut.area
    return best


def _emulate_outputs(
    task: TaskId,
    frame: FrameRecord,
    rois: ROISet,
    emulator: DetectorEmulator,
    rng: np.random.Generator,
):
    """Stand-in DNN output: ground truth restricted to the dispatched ROIs."""
    if task is TaskId.OBJECT_DETECTION:
        out = []
        for det in frame.truths:
            cut = _crop_to_rois(det.box, rois)
            if cut is None:
                continue
            if emulator.dropout_rate > 0 and rng.random() < emulator.dropout_rate:
                continue
            if emulator.jitter_px > 0:
                dx, dy = (rng.random(2) * 2.0 - 1.0) * emulator.jitter_px
                moved = BBox(
                    min(max(0.0, cut.x + dx), frame.width - 1.0),
                    min(max(0.0, cut.y + dy), frame.height - 1.0),
                    cut.w,
                    cut.h,
                )
                cut = _overlap(moved, BBox(0, 0, frame.width, frame.height)) or cut
            out.append(Detection(det.class_id, cut, det.score))
        return tuple(out)

    if task is TaskId.SEGMENTATION:
        src = frame.seg_boxes
    else:
        src = tuple(sb for sb in frame.seg_boxes if sb[0] is ObjectClass.OTHER)
    out = []
    for class_id, box in src:
        cut = _crop_to_rois(box, rois)
        if cut is None:
            continue
        if class_id is ObjectClass.OTHER:
            # drivable-area extent: segmentation-style models reconstruct the
            # full map geometry from any road-visible crop
            out.append((class_id, box))
        else:
            out.append((class_id, cut))
    return tuple(out)


@dataclass
class _Job:
    task: TaskId
    frame: FrameRecord
    rois: ROISet
    order: int


class _Executor:
    """Non-preemptive FIFO server. With several assigned tasks it picks
    round-robin among their queues (a shared accelerator time-slices tenants
    roughly fairly); each task's own queue always drains in order."""

    def __init__(self, idx: int, tasks: list[TaskId]):
        self.idx = idx
        self.tasks = tasks
        self.busy = False
        self.current: _Job | None = None
        self.rr_pos = len(tasks) - 1  # so the first pick starts at tasks[0]


def run(trace, cfg: RunConfig) -> SimReport:
    """Replay ``trace`` (a path or a (header, frames) pair) under ``cfg``."""
    if isinstance(trace, (str, os.PathLike)):
        header, frames = read_trace(trace)
        trace_info = {"path": str(trace), "sha256": trace_sha256(trace)}
    else:
        header, frames = trace
        trace_info = {"path": None, "sha256": None}
    if not isinstance(header, TraceHeader):
        raise TypeError("trace must be a path or a (TraceHeader, frames) pair")

    dispatcher_on, roi_on, predictor_on = MODES[cfg.mode]
    kcfg = cfg.keyframe
    fmodel = cfg.flops
    full_roi = ROISet(ROIMode.FULL_FRAME, (BBox(0, 0, header.width, header.height),))

    lm = cfg.latency or calibrate(
        cfg.latency_targets,
        [full_roi],
        fmodel,
        cfg.latency_base_fraction,
        cfg.noise_stddev_ms,
        cfg.seed,
    )
    emulator = cfg.emulator
    if emulator.seed is None:
        emulator = replace(emulator, seed=cfg.seed)
    rng_noise = np.random.default_rng(lm.seed)
    rng_emu = np.random.default_rng(emulator.seed)

    tracker = IouTracker(
        cfg.tracker_match_threshold,
        cfg.tracker_max_misses,
        header.width,
        header.height,
    )
    dstate = {
        task: TaskProgress(
            task=task,
            deadline_ms=cfg.deadline_ms,
            delay_threshold_frames=compute_threshold(cfg.deadline_ms, header.fps),
        )
        for task in TASKS
    }
    cache = DetectionCache()
    sync = ApproximateTimeSync(cfg.sync)
    exec_cfg = per_task_executors() if cfg.executor == "per_task" else shared_executor()
    executors = [
        _Executor(i, [t for t in TASKS if exec_cfg.assignment[t] == i])
        for i in range(exec_cfg.executor_count)
    ]
    task_queue_bound = cfg.dispatch_queue_depth if dispatcher_on else cfg.queue_depth
    task_queues: dict[TaskId, deque[_Job]] = {t: deque() for t in TASKS}

    heap: list[tuple[int, int, EventKind, object]] = []
    order = 0

    def schedule(at_us: int, kind: EventKind, payload) -> None:
        nonlocal order
        heapq.heappush(heap, (at_us, order, kind, payload))
        order += 1

    for frame in frames:
        schedule(round(frame.timestamp_ms * 1000), EventKind.FRAME_ARRIVAL, frame)
    # Measurement stops one frame period after the last arrival, like a
    # collection window bounded by the stream itself; backlog still queued at
    # that point is reported as remaining, not drained into stale samples.
    horizon_us = (
        round(frames[-1].timestamp_ms * 1000) + round(1_000_000 / header.fps)
        if frames
        else 0
    )

    # run state
    prev_thumb = None
    last_critical_ms: float | None = None
    latest_seq = -1
    last_tracker_out = None
    pending: dict[TaskId, list[FrameRecord]] = {t: [] for t in TASKS}

    processed = {t.value: 0 for t in TASKS}
    published_counts = {t.value: {"inference": 0, "predicted": 0} for t in TASKS}
    output_seqs: dict[TaskId, set[int]] = {t: set() for t in TASKS}
    fusion_rows: list[dict] = []
    dispatch_rows: list[dict] = []
    published_rows: list[dict] = []
    seq_gap_samples: list[int] = []
    executor_intervals: list[tuple] = []
    queue_drops = {t.value: 0 for t in TASKS}
    events_processed = 0

    def record_bundles(bundles) -> None:
        for bundle in bundles:
            row: dict = {"bundle_id": len(fusion_rows)}
            for msg in bundle.messages:
                row[f"{msg.task.value}_seq"] = msg.frame_seq
                row[f"{msg.task.value}_provenance"] = msg.provenance
            row["fused_at_ms"] = bundle.fused_at_ms
            row["fusion_delay_ms"] = bundle.fusion_delay_ms
            row["ts_spread_ms"] = bundle.timestamp_spread_ms
            row["seq_spread"] = bundle.seq_spread
            fusion_rows.append(row)

    def publish(task: TaskId, seq: int, ts_ms: float, payload, provenance: str,
                now_ms: float) -> None:
        published_counts[task.value][provenance] += 1
        output_seqs[task].add(seq)
        published_rows.append(
            {
                "frame_seq": seq,
                "task": task.value,
                "timestamp_ms": ts_ms,
                "provenance": provenance,
                "published_at_ms": now_ms,
                "payload": _payload_rows(task, payload),
            }
        )
        record_bundles(
            sync.push(FusionMessage(task, seq, ts_ms, tuple(payload), provenance), now_ms)
        )

    def prediction_payload(task: TaskId):
        if task is TaskId.OBJECT_DETECTION:
            return tuple(predict_boxes(cache, last_tracker_out, cfg.predicted_score))
        if task is TaskId.SEGMENTATION:
            return tuple(
                predict_segmentation(cache, last_tracker_out, header.width, header.height)
            )
        return predict_lanes(cache)

    def enqueue(task: TaskId, job: _Job) -> None:
        queue = task_queues[task]
        queue.append(job)
        if len(queue) > task_queue_bound:
            queue.popleft()
            queue_drops[task.value] += 1

    def kick(executor: _Executor, now_us: int) -> None:
        if executor.busy:
            return
        best: _Job | None = None
        n = len(executor.tasks)
        for step in range(1, n + 1):
            pos = (executor.rr_pos + step) % n
            queue = task_queues[executor.tasks[pos]]
            if queue:
                best = queue[0]
                executor.rr_pos = pos
                break
        if best is None:
            return
        task_queues[best.task].popleft()
        executor.busy = True
        executor.current = best
        seq_gap_samples.append(latest_seq - best.frame.seq)
        svc_ms = service_time(best.task, best.rois, lm, fmodel, rng_noise)
        end_us = now_us + round(svc_ms * 1000)
        executor_intervals.append(
            (executor.idx, now_us, end_us, best.task.value, best.frame.seq)
        )
        schedule(end_us, EventKind.INFERENCE_COMPLETE, executor)

    def on_arrival(frame: FrameRecord, now_us: int) -> None:
        nonlocal prev_thumb, last_critical_ms, latest_seq, last_tracker_out
        latest_seq = frame.seq
        tracker_out = tracker.step(list(frame.truths), frame.seq)
        last_tracker_out = tracker_out
        scenario = classify_scenario(frame.truths, kcfg.pedestrian_ratio_threshold)

        if roi_on:
            decision = decide(
                frame, prev_thumb, tracker_out, last_critical_ms, scenario, kcfg
            )
            critical = decision.is_critical
            rois_by_task = (
                {t: choose_roi(decision.roi_candidates, t, fmodel) for t in TASKS}
                if critical
                else {}
            )
        else:
            critical = True
            rois_by_task = {t: full_roi for t in TASKS}
        prev_thumb = frame.thumbnail_array()
        if critical:
            last_critical_ms = frame.timestamp_ms

        if critical:
            if dispatcher_on:
                decision2 = dispatch(
                    frame.seq, rois_by_task, scenario, dstate, cfg.route_all_missed
                )
                for task in TASKS:
                    act = decision2.per_task[task]
                    dispatch_rows.append(
                        {
                            "frame_seq": frame.seq,
                            "task": task.value,
                            "action": act.action,
                            "rule": act.rule,
                            "delay": act.delay,
                        }
                    )
                    if act.action == "dispatch":
                        enqueue(task, _Job(task, frame, act.rois, _next_order()))
            else:
                for task in TASKS:
                    dispatch_rows.append(
                        {
                            "frame_seq": frame.seq,
                            "task": task.value,
                            "action": "dispatch",
                            "rule": 0,
                            "delay": frame.seq - dstate[task].last_output_seq,
                        }
                    )
                    enqueue(task, _Job(task, frame, rois_by_task[task], _next_order()))
            for executor in executors:
                kick(executor, now_us)

        if predictor_on:
            for task in TASKS:
                if cache.size(task) == 0:
                    pending[task].append(frame)
                    continue
                schedule(
                    now_us + round(cfg.predictor_latency_ms * 1000),
                    EventKind.PUBLISH_PREDICTION,
                    PredictedOutput(frame.seq, frame.timestamp_ms, task,
                                    prediction_payload(task), "predicted"),
                )

    _order_counter = [0]

    def _next_order() -> int:
        _order_counter[0] += 1
        return _order_counter[0]

    def on_complete(executor: _Executor, now_us: int) -> None:
        job = executor.current
        executor.busy = False
        executor.current = None
        now_ms = now_us / 1000.0
        processed[job.task.value] += 1
        outputs = _emulate_outputs(job.task, job.frame, job.rois, emulator, rng_emu)
        record_completion(
            job.task, job.frame.seq, now_ms, job.frame.timestamp_ms, dstate
        )
        if predictor_on:
            cache.insert(job.task, job.frame.seq, job.frame.timestamp_ms, outputs)
            if pending[job.task]:
                # cold-start catch-up: frames seen before the first cached
                # inference get their predictions published now, in order
                for pf in pending[job.task]:
                    schedule(
                        now_us + round(cfg.predictor_latency_ms * 1000),
                        EventKind.PUBLISH_PREDICTION,
                        PredictedOutput(pf.seq, pf.timestamp_ms, job.task,
                                        prediction_payload(job.task), "predicted"),
                    )
                pending[job.task].clear()
        else:
            publish(job.task, job.frame.seq, job.frame.timestamp_ms, outputs,
                    "inference", now_ms)
        kick(executor, now_us)

    while heap:
        at_us, _, kind, payload = heapq.heappop(heap)
        if at_us > horizon_us:
            break
        events_processed += 1
        if kind is EventKind.FRAME_ARRIVAL:
            on_arrival(payload, at_us)
        elif kind is EventKind.INFERENCE_COMPLETE:
            on_complete(payload, at_us)
        elif kind is EventKind.PUBLISH_PREDICTION:
            publish(payload.task, payload.frame_seq, payload.timestamp_ms,
                    payload.payload, payload.provenance, at_us / 1000.0)

    trace_info.update(
        {
            "frames": header.frame_count,
            "fps": header.fps,
            "width": header.width,
            "height": header.height,
            "scenario_tag": header.scenario_tag,
        }
    )
    config_echo = {
        "mode": cfg.mode,
        "seed": cfg.seed,
        "executor": cfg.executor,
        "deadline_ms": cfg.deadline_ms,
        "queue_depth": cfg.queue_depth,
        "dispatch_queue_depth": cfg.dispatch_queue_depth,
        "predictor_latency_ms": cfg.predictor_latency_ms,
        "slop_ms": cfg.sync.slop_ms,
        "sync_queue_size": cfg.sync.queue_size,
        "latency_base_ms": {t.value: lm.base_ms[t] for t in TASKS},
        "latency_ms_per_gmac": {t.value: lm.ms_per_gmac[t] for t in TASKS},
        "noise_stddev_ms": lm.noise_stddev_ms,
        "ssim_threshold": kcfg.ssim_threshold,
        "interval_deadline_ms": kcfg.interval_deadline_ms,
    }
    return SimReport(
        mode=cfg.mode,
        seed=cfg.seed,
        trace=trace_info,
        config=config_echo,
        processed=processed,
        published_counts=published_counts,
        frames_with_output={t.value: len(output_seqs[t]) for t in TASKS},
        fusion_rows=fusion_rows,
        fusion_totals={
            "pushed": sync.pushed,
            "bundled_messages": sync.bundled,
            "drops": dict(sync.drops),
            "dropped": sync.dropped,
            "remaining": sync.queued,
        },
        dispatch_rows=dispatch_rows,
        published_rows=published_rows,
        seq_gap_samples=seq_gap_samples,
        executor_intervals=executor_intervals,
        queue_drops=queue_drops,
        events_processed=events_processed,
    )
