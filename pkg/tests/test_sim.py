import numpy as np
import pytest

from ppdnn.core import TASKS, BBox, TaskId
from ppdnn.flops import FlopsModel
from ppdnn.keyframe import ROIMode, ROISet
from ppdnn.sim import (
    DetectorEmulator,
    ExecutorConfig,
    LatencyModel,
    RunConfig,
    calibrate,
    per_task_executors,
    run,
    service_time,
)
from ppdnn.traceio import (
    ObjectScript,
    ScenarioScript,
    TraceHeader,
    builtin_script,
    generate,
)

M = FlopsModel()


def zero_latency():
    return LatencyModel(
        base_ms={t: 0.0 for t in TASKS},
        ms_per_gmac={t: 0.0 for t in TASKS},
        noise_stddev_ms=0.0,
        seed=0,
    )


def one_roi(w, h):
    return ROISet(ROIMode.ONE_ROI, (BBox(0, 0, w, h),))


@pytest.fixture(scope="module")
def downtown():
    return generate(builtin_script("downtown", duration_s=15.0), seed=1)


class TestServiceTime:
    def test_zero_coefficients(self):
        lm = LatencyModel({t: 10.0 for t in TASKS}, {t: 0.0 for t in TASKS}, 0.0, 0)
        assert service_time(TaskId.LANE_DETECTION, one_roi(100, 100), lm, M) == 10.0

    def test_linear_case(self):
        lm = LatencyModel({t: 10.0 for t in TASKS}, {t: 100.0 for t in TASKS}, 0.0, 0)
        full = ROISet(ROIMode.FULL_FRAME, (BBox(0, 0, 1280, 720),))
        # lane cost = a1 * 720 * 1280 with a1 = 1e-6
        got = service_time(
            TaskId.LANE_DETECTION, full, lm, FlopsModel(a1=1e-6)
        )
        assert got == pytest.approx(10.0 + 100.0 * 0.9216)

    def test_same_seed_identical(self):
        lm = LatencyModel({t: 50.0 for t in TASKS}, {t: 10.0 for t in TASKS}, 5.0, 42)
        a = service_time(TaskId.SEGMENTATION, one_roi(50, 50), lm, M)
        b = service_time(TaskId.SEGMENTATION, one_roi(50, 50), lm, M)
        assert a == b

    def test_never_negative(self):
        lm = LatencyModel({t: 0.1 for t in TASKS}, {t: 0.0 for t in TASKS}, 50.0, 3)
        rng = np.random.default_rng(3)
        for _ in range(100):
            assert service_time(TaskId.SEGMENTATION, one_roi(5, 5), lm, M, rng) >= 0.0


class TestCalibrate:
    def test_linear_solve(self):
        # pick an ROI whose lane cost is exactly 1 GMAC
        roi = one_roi(w=2000, h=1000)
        m = FlopsModel(a1=5e-7)
        lm = calibrate({t: 100.0 for t in TASKS}, [roi], m, base_fraction=0.2,
                       noise_stddev_ms=0.0)
        assert lm.base_ms[TaskId.LANE_DETECTION] == pytest.approx(20.0)
        assert lm.ms_per_gmac[TaskId.LANE_DETECTION] == pytest.approx(80.0)

    def test_targets_reproduced_within_tolerance(self):
        targets = {
            TaskId.OBJECT_DETECTION: 257.4,
            TaskId.LANE_DETECTION: 311.2,
            TaskId.SEGMENTATION: 366.2,
        }
        full = ROISet(ROIMode.FULL_FRAME, (BBox(0, 0, 1280, 720),))
        lm = calibrate(targets, [full], M, noise_stddev_ms=5.0, seed=0)
        rng = np.random.default_rng(0)
        for task in TASKS:
            samples = [service_time(task, full, lm, M, rng) for _ in range(2000)]
            assert np.mean(samples) == pytest.approx(targets[task], rel=0.05)

    def test_invalid_targets(self):
        with pytest.raises(ValueError):
            calibrate({t: 0.0 for t in TASKS}, [one_roi(10, 10)], M)


class TestExecutorConfig:
    def test_defaults_shared(self):
        cfg = ExecutorConfig()
        assert cfg.executor_count == 1
        assert set(cfg.assignment.values()) == {0}

    def test_per_task(self):
        cfg = per_task_executors()
        assert sorted(cfg.assignment.values()) == [0, 1, 2]

    def test_incomplete_assignment_rejected(self):
        with pytest.raises(ValueError):
            ExecutorConfig(executor_count=1, assignment={TaskId.OBJECT_DETECTION: 0})


class TestRun:
    def test_empty_trace_zero_report(self):
        header = TraceHeader(fps=30.0, width=640, height=480, frame_count=0)
        rep = run((header, []), RunConfig(mode="baseline"))
        assert rep.bundle_count == 0
        assert rep.fusion_percent == 0.0
        assert all(v == 0 for v in rep.processed.values())

    def test_zero_latency_baseline_fuses_every_frame(self):
        header, frames = generate(builtin_script("highway", duration_s=1.0), seed=0)
        cfg = RunConfig(mode="baseline", latency=zero_latency(), executor="shared")
        rep = run((header, frames), cfg)
        assert rep.bundle_count == len(frames) == 30
        assert rep.fusion_percent == 1.0

    def test_predictor_raises_bundles_over_fd(self, downtown):
        fd = run(downtown, RunConfig(mode="fd", seed=1))
        ppdnn = run(downtown, RunConfig(mode="ppdnn", seed=1))
        assert ppdnn.bundle_count >= fd.bundle_count

    def test_determinism_byte_identical_outputs(self, downtown, tmp_path):
        for mode in ("baseline", "ppdnn"):
            dirs = []
            for k in range(2):
                rep = run(downtown, RunConfig(mode=mode, seed=5))
                out = tmp_path / f"{mode}-{k}"
                rep.save(out)
                dirs.append(out)
            for name in ("report.json", "fusion.csv", "dispatch.csv", "published.jsonl"):
                assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_non_preemption_and_fifo_per_executor(self, downtown):
        for executor in ("shared", "per_task"):
            rep = run(downtown, RunConfig(mode="baseline", seed=2, executor=executor))
            by_exec: dict[int, list] = {}
            for idx, start, end, task, seq in rep.executor_intervals:
                by_exec.setdefault(idx, []).append((start, end))
            for intervals in by_exec.values():
                for (s1, e1), (s2, e2) in zip(intervals, intervals[1:]):
                    assert s2 >= e1  # no overlap, served in dispatch order
                    assert e1 >= s1

    def test_causality(self, downtown):
        header, frames = downtown
        capture_us = {f.seq: round(f.timestamp_ms * 1000) for f in frames}
        rep = run(downtown, RunConfig(mode="fd", seed=2))
        for _, start, end, task, seq in rep.executor_intervals:
            assert start >= capture_us[seq]
            assert end >= start

    def test_rule3_gap_bound_in_fd_mode(self, downtown):
        rep = run(downtown, RunConfig(mode="fd", seed=3))
        threshold = None
        from ppdnn.dispatch import compute_threshold

        threshold = compute_threshold(800.0, 30.0)
        for row in rep.dispatch_rows:
            if row["rule"] == 3 and row["action"] == "dispatch":
                assert row["delay"] <= threshold

    def test_baseline_backlog_has_gap_mass_above_ten(self, downtown):
        rep = run(downtown, RunConfig(mode="baseline", seed=4))
        gaps = rep.seq_gap_samples
        assert sum(1 for g in gaps if g > 10) / len(gaps) > 0.2

    def test_predictor_publishes_every_frame(self, downtown):
        header, frames = downtown
        rep = run(downtown, RunConfig(mode="ppdnn", seed=6))
        for task in TASKS:
            assert rep.frames_with_output[task.value] == len(frames)

    def test_fusion_conservation(self, downtown):
        for mode in ("baseline", "fd", "ppdnn"):
            rep = run(downtown, RunConfig(mode=mode, seed=7))
            totals = rep.fusion_totals
            assert totals["pushed"] == (
                3 * rep.bundle_count + totals["dropped"] + totals["remaining"]
            )

    def test_bundle_spread_within_slop(self, downtown):
        for mode in ("baseline", "fd", "fd_dp"):
            rep = run(downtown, RunConfig(mode=mode, seed=8))
            for row in rep.fusion_rows:
                assert row["ts_spread_ms"] <= 300.0

    def test_emulator_dropout_and_jitter_change_outputs(self, downtown):
        noisy = RunConfig(
            mode="baseline",
            seed=9,
            emulator=DetectorEmulator(dropout_rate=0.5, jitter_px=3.0),
        )
        clean = RunConfig(mode="baseline", seed=9)
        rep_noisy = run(downtown, noisy)
        rep_clean = run(downtown, clean)
        n_noisy = sum(len(r["payload"]) for r in rep_noisy.published_rows
                      if r["task"] == "object_detection")
        n_clean = sum(len(r["payload"]) for r in rep_clean.published_rows
                      if r["task"] == "object_detection")
        assert n_noisy < n_clean

    def test_tight_deadline_engages_rule_one(self, downtown):
        # a budget below the slowest service makes completions late, so the
        # deadline-missed rule must take over and route exclusively
        rep = run(downtown, RunConfig(mode="fd", seed=1, deadline_ms=320.0))
        rule1 = [r for r in rep.dispatch_rows if r["rule"] == 1]
        assert rule1
        by_frame: dict[int, list[str]] = {}
        for row in rule1:
            by_frame.setdefault(row["frame_seq"], []).append(row["action"])
        assert any("drop" in acts and "dispatch" in acts for acts in by_frame.values())

    def test_malformed_trace_reports_line(self, tmp_path):
        path = tmp_path / "bad.pptrace"
        path.write_text('{"format_version":1,"fps":30,"width":10,"height":10,'
                        '"frame_count":1,"scenario_tag":""}\nnot json\n')
        from ppdnn.traceio import TraceFormatError

        with pytest.raises(TraceFormatError, match="line 2"):
            run(str(path), RunConfig(mode="baseline"))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="unknown mode"):
            RunConfig(mode="turbo")
