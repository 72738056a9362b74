"""Approximate-time synchronization of the three task output streams.

Messages carry their frame's capture timestamp; a bundle is a triple, one
message per task, whose pairwise timestamp spread stays within the slop.
Matching is greedy: the oldest queued message pivots and pulls the closest
message from each other queue.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import TASKS, TaskId


@dataclass(frozen=True)
class SyncConfig:
    queue_size: int = 1000
    slop_ms: float = 300.0

    def __post_init__(self) -> None:
        if self.queue_size < 1:
            raise ValueError("queue_size must be >= 1")
        if self.slop_ms < 0:
            raise ValueError("slop_ms must be >= 0")


@dataclass(frozen=True)
class FusionMessage:
    task: TaskId
    frame_seq: int
    timestamp_ms: float
    payload: tuple
    provenance: str


@dataclass(frozen=True)
class FusionBundle:
    messages: tuple[FusionMessage, ...]  # aligned with TASKS order
    fused_at_ms: float

    @property
    def fusion_delay_ms(self) -> float:
        return self.fused_at_ms - min(m.timestamp_ms for m in self.messages)

    @property
    def timestamp_spread_ms(self) -> float:
        stamps = [m.timestamp_ms for m in self.messages]
        return max(stamps) - min(stamps)

    @property
    def seq_spread(self) -> int:
        seqs = [m.frame_seq for m in self.messages]
        return max(seqs) - min(seqs)


class ApproximateTimeSync:
    """Greedy pivot synchronizer; calls to :meth:`push` must be serialized."""

    def __init__(self, config: SyncConfig | None = None):
        self.config = config or SyncConfig()
        self._queues: dict[TaskId, deque[FusionMessage]] = {t: deque() for t in TASKS}
        self.pushed = 0
        self.bundled = 0
        self.drops = {"out_of_order": 0, "evicted": 0, "expired": 0, "superseded": 0}

    @property
    def dropped(self) -> int:
        return sum(self.drops.values())

    @property
    def queued(self) -> int:
        return sum(len(q) for q in self._queues.values())

    def push(self, msg: FusionMessage, now_ms: float) -> list[FusionBundle]:
        """Offer one message; returns any bundles it completes, in order."""
        if msg.task not in self._queues:
            raise ValueError(f"unknown task {msg.task!r}")
        self.pushed += 1
        queue = self._queues[msg.task]
        if queue and msg.timestamp_ms < queue[-1].timestamp_ms:
            self.drops["out_of_order"] += 1
            return []
        queue.append(msg)
        if len(queue) > self.config.queue_size:
            queue.popleft()
            self.drops["evicted"] += 1
        return self._drain(now_ms)

    def _drain(self, now_ms: float) -> list[FusionBundle]:
        slop = self.config.slop_ms
        bundles: list[FusionBundle] = []
        while all(self._queues[t] for t in TASKS):
            pivot_task = min(TASKS, key=lambda t: (self._queues[t][0].timestamp_ms,
                                                   TASKS.index(t)))
            pivot = self._queues[pivot_task][0]

            chosen: dict[TaskId, int] = {pivot_task: 0}
            for task in TASKS:
                if task is pivot_task:
                    continue
                queue = self._queues[task]
                best_idx, best_dist = 0, abs(queue[0].timestamp_ms - pivot.timestamp_ms)
                for idx in range(1, len(queue)):
                    dist = abs(queue[idx].timestamp_ms - pivot.timestamp_ms)
                    if dist < best_dist:
                        best_idx, best_dist = idx, dist
                chosen[task] = best_idx

            stamps = [self._queues[t][chosen[t]].timestamp_ms for t in TASKS]
            if max(stamps) - min(stamps) <= slop:
                msgs = tuple(self._queues[t][chosen[t]] for t in TASKS)
                for task in TASKS:
                    queue = self._queues[task]
                    self.drops["superseded"] += chosen[task]
                    for _ in range(chosen[task] + 1):
                        queue.popleft()
                bundle = FusionBundle(messages=msgs, fused_at_ms=now_ms)
                assert bundle.timestamp_spread_ms <= slop
                bundles.append(bundle)
                self.bundled += 3
                continue

            # The pivot can never bundle once every other queue has moved past
            # pivot + slop: later arrivals are at least as new as the newest
            # queued message.
            expired = all(
                self._queues[t][-1].timestamp_ms > pivot.timestamp_ms + slop
                for t in TASKS
                if t is not pivot_task
            )
            if expired:
                self._queues[pivot_task].popleft()
                self.drops["expired"] += 1
                continue
            break
        return bundles
