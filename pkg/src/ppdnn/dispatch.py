"""Frame dispatcher: per-task progress state and the three routing rules.

Rule 1: a task that missed its per-frame deadline gets the frame exclusively.
Rule 2: safety-critical frames are broadcast to every task.
Rule 3: otherwise the frame is dropped for any task whose output lag, in
sequence numbers, exceeds its threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import TASKS, TaskId
from .keyframe import ROISet, ScenarioSnapshot


@dataclass
class TaskProgress:
    task: TaskId
    last_output_seq: int = -1
    last_dispatch_seq: int = -1
    deadline_ms: float = 200.0
    deadline_missed: bool = False
    delay_threshold_frames: int = 6


@dataclass(frozen=True)
class DispatchAction:
    action: str  # "dispatch" | "drop"
    rule: int  # 1..3
    delay: int
    rois: ROISet | None = None


@dataclass(frozen=True)
class DispatchDecision:
    frame_seq: int
    rule: int
    per_task: dict[TaskId, DispatchAction]


def compute_threshold(deadline_ms: float, fps: float) -> int:
    """Output-lag threshold in frames for a latency budget at a frame rate."""
    if deadline_ms <= 0 or fps <= 0:
        raise ValueError("deadline_ms and fps must be positive")
    return max(1, math.floor(deadline_ms * fps / 1000.0))


def dispatch(
    frame_seq: int,
    rois: dict[TaskId, ROISet],
    scenario: ScenarioSnapshot,
    state: dict[TaskId, TaskProgress],
    route_all_missed: bool = True,
) -> DispatchDecision:
    """Apply the routing rules to one critical frame.

    Exactly one rule fires per frame. When several tasks have missed their
    deadline simultaneously, the frame routes to all of them by default;
    ``route_all_missed=False`` restricts it to the first in task order.
    """
    for task in TASKS:
        if task not in state:
            raise ValueError(f"missing progress state for task {task.value}")
        if frame_seq <= state[task].last_dispatch_seq:
            raise ValueError(
                f"frame {frame_seq} already dispatched for {task.value} "
                f"(last was {state[task].last_dispatch_seq})"
            )

    delays = {task: frame_seq - state[task].last_output_seq for task in TASKS}
    missed = [task for task in TASKS if state[task].deadline_missed]

    per_task: dict[TaskId, DispatchAction] = {}
    if missed:
        rule = 1
        targets = set(missed if route_all_missed else missed[:1])
        for task in TASKS:
            act = "dispatch" if task in targets else "drop"
            per_task[task] = DispatchAction(act, rule, delays[task], rois.get(task))
    elif scenario.safety_critical:
        rule = 2
        for task in TASKS:
            per_task[task] = DispatchAction("dispatch", rule, delays[task], rois.get(task))
    else:
        rule = 3
        for task in TASKS:
            if delays[task] > state[task].delay_threshold_frames:
                per_task[task] = DispatchAction("drop", rule, delays[task], None)
            else:
                per_task[task] = DispatchAction("dispatch", rule, delays[task], rois.get(task))

    for task, act in per_task.items():
        if act.action == "dispatch":
            state[task].last_dispatch_seq = frame_seq
    return DispatchDecision(frame_seq, rule, per_task)


def record_completion(
    task: TaskId,
    frame_seq: int,
    finished_at_ms: float,
    frame_timestamp_ms: float,
    state: dict[TaskId, TaskProgress],
) -> None:
    """Record an inference completion and re-evaluate the deadline flag.

    The flag is edge-triggered: set by a late completion, cleared by the next
    on-time one.
    """
    progress = state[task]
    if frame_seq < progress.last_output_seq:
        raise ValueError(
            f"completion seq {frame_seq} regresses behind {progress.last_output_seq}"
        )
    progress.last_output_seq = frame_seq
    progress.deadline_missed = (finished_at_ms - frame_timestamp_ms) > progress.deadline_ms


def new_state(
    deadline_ms: float = 200.0,
    fps: float = 30.0,
) -> dict[TaskId, TaskProgress]:
    """Fresh progress state for all three tasks with a common budget."""
    threshold = compute_threshold(deadline_ms, fps)
    return {
        task: TaskProgress(task=task, deadline_ms=deadline_ms,
                           delay_threshold_frames=threshold)
        for task in TASKS
    }
