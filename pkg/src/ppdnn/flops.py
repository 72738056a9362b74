"""Compute-cost prediction for ROI choices, in giga multiply-accumulates.

The object-detection cost is a four-branch piecewise function of the
height/width ratio: its pre-processing resizes the short side into
[s_min, s_max] and ceils both sides up to multiples of s_d, so cost depends
on the post-resize grid, not the raw pixel count. Lane detection and
segmentation take their input as-is and cost scales bilinearly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import TaskId
from .keyframe import ROIMode, ROISet


@dataclass(frozen=True)
class FlopsModel:
    a0: float = 1e-6  # GMACs per effective pixel, object detection
    a1: float = 5e-7  # GMACs per pixel, lane detection
    a2: float = 8e-7  # GMACs per pixel, segmentation
    s_min: int = 800
    s_max: int = 1333
    s_d: int = 32

    def __post_init__(self) -> None:
        if min(self.a0, self.a1, self.a2) <= 0:
            raise ValueError("cost coefficients must be positive")
        if not (0 < self.s_min <= self.s_max) or self.s_d <= 0:
            raise ValueError("size bounds must satisfy 0 < s_min <= s_max and s_d > 0")


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


def flops_object_branch(branch: int, h: float, w: float, m: FlopsModel) -> float:
    """Evaluate one branch of the object-detection cost regardless of ratio.

    Exposed so boundary continuity between adjacent branches can be checked
    directly. Ceilings are taken in exact rational arithmetic.
    """
    hf, wf = Fraction(h), Fraction(w)
    sd = m.s_d
    if branch == 1:
        n = _ceil(m.s_max * hf / (wf * sd)) * _ceil(Fraction(m.s_max, sd))
    elif branch == 2:
        n = _ceil(Fraction(m.s_min, sd)) * _ceil(m.s_min * wf / (hf * sd))
    elif branch == 3:
        n = _ceil(m.s_min * hf / (wf * sd)) * _ceil(Fraction(m.s_min, sd))
    elif branch == 4:
        n = _ceil(Fraction(m.s_max, sd)) * _ceil(m.s_max * wf / (hf * sd))
    else:
        raise ValueError(f"branch must be 1..4, got {branch}")
    return m.a0 * n * sd * sd


def object_branch_index(h: float, w: float, m: FlopsModel) -> int:
    """Branch of the piecewise cost selected by r = h/w.

    Boundary ratios belong to the lower-indexed branch; the function is
    continuous there so the assignment is value-neutral.
    """
    if h <= 0 or w <= 0:
        raise ValueError(f"dimensions must be positive, got h={h}, w={w}")
    r = Fraction(h) / Fraction(w)
    if r <= Fraction(m.s_min, m.s_max):
        return 1
    if r <= 1:
        return 2
    if r <= Fraction(m.s_max, m.s_min):
        return 3
    return 4


def flops_object(h: float, w: float, m: FlopsModel | None = None) -> float:
    """Predicted GMACs for the object-detection model on an h x w input."""
    m = m or FlopsModel()
    return flops_object_branch(object_branch_index(h, w, m), h, w, m)


def flops_linear(h: float, w: float, coeff: float) -> float:
    """Predicted GMACs for a model without input resizing: coeff * h * w."""
    if h <= 0 or w <= 0:
        raise ValueError(f"dimensions must be positive, got h={h}, w={w}")
    return coeff * h * w


def predict_roiset(rois: ROISet, task: TaskId, m: FlopsModel | None = None) -> float:
    """Predicted GMACs for running ``task`` over an ROI choice.

    Multi-ROI batches are padded to a common size, so n boxes cost n times
    the largest height/width combination.
    """
    m = m or FlopsModel()
    if rois.mode is ROIMode.MULTI_ROI:
        h = max(b.h for b in rois.boxes)
        w = max(b.w for b in rois.boxes)
        n = len(rois.boxes)
    else:
        (box,) = rois.boxes
        h, w, n = box.h, box.w, 1

    if task is TaskId.OBJECT_DETECTION:
        return n * flops_object(h, w, m)
    if task is TaskId.LANE_DETECTION:
        return n * flops_linear(h, w, m.a1)
    return n * flops_linear(h, w, m.a2)


def choose_roi(
    candidates: tuple[ROISet, ROISet],
    task: TaskId,
    m: FlopsModel | None = None,
) -> ROISet:
    """Pick the cheaper of (one-ROI, multi-ROI); ties go to one-ROI."""
    m = m or FlopsModel()
    one, multi = candidates
    if predict_roiset(multi, task, m) < predict_roiset(one, task, m):
        return multi
    return one
