"""Deterministic simulator and library for an environment-aware multi-tenant
perception control plane: critical-frame/ROI selection, compute-aware
dispatch, detection prediction for non-critical frames, and approximate-time
fusion, with evaluation metrics over detection traces."""

from .core import (
    MOVING_CLASSES,
    STATIONARY_CLASSES,
    TASKS,
    BBox,
    Detection,
    FrameRecord,
    ObjectClass,
    TaskId,
    clip,
    iou,
    union_cover,
)
from .dispatch import (
    DispatchAction,
    DispatchDecision,
    TaskProgress,
    compute_threshold,
    dispatch,
    new_state,
    record_completion,
)
from .flops import (
    FlopsModel,
    choose_roi,
    flops_linear,
    flops_object,
    predict_roiset,
)
from .fusion import ApproximateTimeSync, FusionBundle, FusionMessage, SyncConfig
from .keyframe import (
    KeyframeConfig,
    KeyframeDecision,
    Reason,
    ROIMode,
    ROISet,
    ScenarioSnapshot,
    build_rois,
    classify_scenario,
    decide,
)
from .metrics import (
    DelayStats,
    DetectionSeries,
    completeness_per_frame,
    cost_effectiveness,
    delay_stats,
    detection_completeness,
    evaluate_report,
)
from .predictor import (
    DetectionCache,
    PredictedOutput,
    predict_boxes,
    predict_lanes,
    predict_segmentation,
)
from .sim import (
    MODES,
    DetectorEmulator,
    ExecutorConfig,
    LatencyModel,
    RunConfig,
    SimReport,
    calibrate,
    per_task_executors,
    run,
    service_time,
    shared_executor,
)
from .similarity import SsimParams, make_thumbnail, ssim
from .tracker import IouTracker, Track, TrackerOutput, predict
from .traceio import (
    BUILTIN_SCENARIOS,
    ObjectScript,
    ScenarioScript,
    TraceFormatError,
    TraceHeader,
    builtin_script,
    generate,
    read_trace,
    write_trace,
)

__version__ = "0.1.0"
