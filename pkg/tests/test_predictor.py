import pytest

from ppdnn.core import BBox, Detection, ObjectClass, TaskId
from ppdnn.predictor import (
    DetectionCache,
    predict_boxes,
    predict_lanes,
    predict_segmentation,
)
from ppdnn.tracker import Track, TrackerOutput


def det(x, y, w, h, score=0.9, cls=ObjectClass.VEHICLE):
    return Detection(cls, BBox(x, y, w, h), score)


def tracks(*specs):
    out = []
    for i, spec in enumerate(specs):
        box, vel = spec if isinstance(spec, tuple) and len(spec) == 2 else (spec, (0, 0, 0, 0))
        out.append(Track(id=i, box=box, velocity=vel, class_id=ObjectClass.VEHICLE))
    return TrackerOutput(tuple(out), 0, 0, 1.0)


class TestCache:
    def test_ring_eviction(self):
        cache = DetectionCache()
        for seq in range(12):
            cache.insert(TaskId.LANE_DETECTION, seq, seq * 33.3, (("x", seq),))
        entries = cache.entries(TaskId.LANE_DETECTION)
        assert len(entries) == 10
        assert entries[0].frame_seq == 2 and entries[-1].frame_seq == 11
        assert predict_lanes(cache) == (("x", 11),)

    def test_empty_cache_raises(self):
        cache = DetectionCache()
        with pytest.raises(LookupError, match="no critical detection cached"):
            predict_lanes(cache)
        with pytest.raises(LookupError):
            predict_boxes(cache, tracks())

    def test_out_of_order_insert_rejected(self):
        cache = DetectionCache()
        cache.insert(TaskId.SEGMENTATION, 5, 100.0, ())
        with pytest.raises(ValueError):
            cache.insert(TaskId.SEGMENTATION, 3, 120.0, ())


class TestPredictBoxes:
    def setup_method(self):
        self.cache = DetectionCache()
        self.cached = (det(10, 10, 40, 40, score=0.8), det(200, 200, 30, 30, score=0.7))
        self.cache.insert(TaskId.OBJECT_DETECTION, 0, 0.0, self.cached)

    def test_high_iou_replaces_box_keeps_score(self):
        moved = BBox(12, 11, 40, 40)
        out = predict_boxes(self.cache, tracks(moved))
        assert out[0].box == moved
        assert out[0].score == 0.8 and out[0].class_id is ObjectClass.VEHICLE
        assert out[1] == self.cached[1]

    def test_disjoint_track_appends_and_keeps_cached(self):
        lone = BBox(500, 500, 25, 25)
        out = predict_boxes(self.cache, tracks(lone), predicted_score=0.51)
        assert out[0] == self.cached[0] and out[1] == self.cached[1]
        assert out[2].box == lone and out[2].score == 0.51

    def test_midband_leaves_cache_untouched(self):
        # IoU with the first cached box lands in (0.1, 0.5)
        shifted = BBox(25, 25, 40, 40)
        from ppdnn.core import iou

        assert 0.1 <= iou(shifted, self.cached[0].box) <= 0.5
        out = predict_boxes(self.cache, tracks(shifted))
        assert out == list(self.cached)

    def test_midband_replace_flag(self):
        shifted = BBox(25, 25, 40, 40)
        out = predict_boxes(self.cache, tracks(shifted), midband_replace=True)
        assert out[0].box == shifted

    def test_never_drops_cached_detections(self):
        import numpy as np

        rng = np.random.default_rng(888)
        for _ in range(100):
            cache = DetectionCache()
            cached = tuple(
                det(rng.uniform(0, 400), rng.uniform(0, 400),
                    rng.uniform(10, 60), rng.uniform(10, 60))
                for _ in range(rng.integers(0, 5))
            )
            cache.insert(TaskId.OBJECT_DETECTION, 0, 0.0, cached)
            track_boxes = [
                BBox(rng.uniform(0, 400), rng.uniform(0, 400),
                     rng.uniform(10, 60), rng.uniform(10, 60))
                for _ in range(rng.integers(0, 5))
            ]
            out = predict_boxes(cache, tracks(*track_boxes))
            assert len(out) >= len(cached)

    def test_deterministic(self):
        t = tracks(BBox(12, 11, 40, 40), BBox(500, 500, 25, 25))
        assert predict_boxes(self.cache, t) == predict_boxes(self.cache, t)


class TestPredictSegmentation:
    def setup_method(self):
        self.cache = DetectionCache()
        self.seg = (
            (ObjectClass.VEHICLE, BBox(10, 10, 20, 20)),
            (ObjectClass.OTHER, BBox(0, 400, 600, 100)),
        )
        self.cache.insert(TaskId.SEGMENTATION, 0, 0.0, self.seg)

    def test_zero_velocity_unchanged(self):
        out = predict_segmentation(self.cache, tracks((BBox(10, 10, 20, 20), (0, 0, 0, 0))))
        assert out == list(self.seg)

    def test_velocity_shift(self):
        t = tracks((BBox(10, 10, 20, 20), (2, 3, 2, 1)))  # (dx, dy, dh, dw)
        out = predict_segmentation(self.cache, t)
        assert out[0] == (ObjectClass.VEHICLE, BBox(12, 13, 21, 22))
        assert out[1] == self.seg[1]

    def test_unmatched_unchanged_and_count_preserved(self):
        out = predict_segmentation(self.cache, tracks(BBox(900, 900, 10, 10)))
        assert out == list(self.seg)
        assert len(out) == len(self.seg)

    def test_empty_cache_raises(self):
        with pytest.raises(LookupError):
            predict_segmentation(DetectionCache(), tracks())


class TestPredictLanes:
    def test_recency(self):
        cache = DetectionCache()
        cache.insert(TaskId.LANE_DETECTION, 0, 0.0, ("L1",))
        cache.insert(TaskId.LANE_DETECTION, 5, 166.0, ("L2",))
        assert predict_lanes(cache) == ("L2",)
