import numpy as np
import pytest

from ppdnn.core import BBox, TaskId
from ppdnn.flops import (
    FlopsModel,
    choose_roi,
    flops_linear,
    flops_object,
    flops_object_branch,
    object_branch_index,
    predict_roiset,
)
from ppdnn.keyframe import ROIMode, ROISet

M = FlopsModel()  # a0=1e-6, s_min=800, s_max=1333, s_d=32


def one_roi(w, h):
    return ROISet(ROIMode.ONE_ROI, (BBox(0, 0, w, h),))


def multi_roi(*boxes):
    return ROISet(ROIMode.MULTI_ROI, tuple(BBox(*b) for b in boxes))


class TestFlopsObject:
    def test_hand_evaluated_branch_two(self):
        # r = 600/800 = 0.75: ceil(800/32)=25, ceil(800*800/(600*32))=34
        assert flops_object(600, 800, M) == pytest.approx(M.a0 * 25 * 34 * 32 * 32)
        assert flops_object(600, 800, M) == pytest.approx(870400 * M.a0)

    def test_square_input_branches_agree(self):
        for side in (10, 100, 717):
            assert flops_object_branch(2, side, side, M) == pytest.approx(
                flops_object_branch(3, side, side, M)
            )
        assert flops_object(500, 500, M) == pytest.approx(640000 * M.a0)

    def test_boundary_ratio_continuity_hand_case(self):
        # h=800, w=1333 sits exactly on s_min/s_max: both sides give 25*42
        v1 = flops_object_branch(1, 800, 1333, M)
        v2 = flops_object_branch(2, 800, 1333, M)
        assert v1 == pytest.approx(v2)
        assert v1 == pytest.approx(M.a0 * 25 * 42 * 1024)

    @pytest.mark.parametrize(
        "branches,ratio",
        [((1, 2), (800, 1333)), ((2, 3), (1, 1)), ((3, 4), (1333, 800))],
    )
    def test_all_boundaries_continuous(self, branches, ratio):
        lo, hi = branches
        p, q = ratio
        for k in range(1, 1001):
            h, w = k * p, k * q
            assert flops_object_branch(lo, h, w, M) == flops_object_branch(hi, h, w, M)

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            h = float(rng.integers(1, 2000))
            w = float(rng.integers(1, 2000))
            assert flops_object(h, w, M) == flops_object(w, h, M)
            # the symmetry exchanges branch 1 with 4 and branch 2 with 3
            bi, bj = object_branch_index(h, w, M), object_branch_index(w, h, M)
            assert {bi, bj} in ({1, 4}, {2, 3}, {1}, {2}, {3}, {4}, {2, 3})

    def test_non_monotonicity_witness_on_scan_grid(self):
        # scan h in 10..720, w in 10..1280, step 10: a smaller-area input with
        # strictly larger predicted cost must exist
        cells = []
        for h in range(10, 721, 10):
            for w in range(10, 1281, 10):
                cells.append((h * w, flops_object(h, w, M)))
        cells.sort(key=lambda c: (c[0], c[1]))
        found = False
        max_flops_so_far = -1.0
        prev_area = None
        run_max = -1.0
        for area, flops in cells:
            if prev_area is not None and area > prev_area:
                max_flops_so_far = max(max_flops_so_far, run_max)
                run_max = -1.0
            if max_flops_so_far > flops:
                found = True
                break
            run_max = max(run_max, flops)
            prev_area = area
        assert found

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            flops_object(0, 10, M)
        with pytest.raises(ValueError):
            flops_linear(10, -1, 1e-6)


class TestFlopsLinear:
    def test_unit(self):
        assert flops_linear(1, 1, 3.5e-7) == 3.5e-7

    def test_multiplication(self):
        assert flops_linear(720, 1280, 1e-6) == pytest.approx(0.9216)

    def test_bilinear(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            h, w = rng.uniform(1, 500), rng.uniform(1, 500)
            assert flops_linear(2 * h, w, 1e-6) == pytest.approx(2 * flops_linear(h, w, 1e-6))
            assert flops_linear(h, 3 * w, 1e-6) == pytest.approx(3 * flops_linear(h, w, 1e-6))


class TestPredictRoiset:
    def test_one_roi_delegates(self):
        assert predict_roiset(one_roi(w=800, h=600), TaskId.OBJECT_DETECTION, M) == (
            pytest.approx(870400 * M.a0)
        )

    def test_multi_batch_uses_max_dims(self):
        rois = multi_roi((0, 0, 200, 50), (300, 0, 40, 100), (600, 300, 150, 80))
        # 3 boxes at (max h 100, max w 200)
        assert predict_roiset(rois, TaskId.LANE_DETECTION, M) == pytest.approx(
            3 * M.a1 * 100 * 200
        )

    def test_single_multi_equals_one(self):
        a = predict_roiset(multi_roi((0, 0, 80, 60)), TaskId.SEGMENTATION, M)
        b = predict_roiset(one_roi(w=80, h=60), TaskId.SEGMENTATION, M)
        assert a == pytest.approx(b)


class TestChooseRoi:
    def test_spread_boxes_favor_multi(self):
        one = one_roi(w=1000, h=1000)
        multi = multi_roi((0, 0, 50, 50), (950, 950, 50, 50))
        assert choose_roi((one, multi), TaskId.LANE_DETECTION, M) is multi

    def test_overlapping_boxes_favor_one(self):
        one = one_roi(w=60, h=60)
        multi = multi_roi((0, 0, 50, 50), (10, 10, 50, 50))
        assert choose_roi((one, multi), TaskId.SEGMENTATION, M) is one

    def test_tie_goes_to_one_roi(self):
        one = one_roi(w=50, h=50)
        multi = multi_roi((0, 0, 50, 50))
        assert choose_roi((one, multi), TaskId.LANE_DETECTION, M) is one

    def test_choice_never_costs_more(self):
        rng = np.random.default_rng(33)
        for task in TaskId:
            for _ in range(50):
                boxes = [
                    (rng.uniform(0, 900), rng.uniform(0, 500),
                     rng.uniform(10, 300), rng.uniform(10, 300))
                    for _ in range(rng.integers(1, 5))
                ]
                multi = multi_roi(*boxes)
                from ppdnn.core import union_cover

                cover = union_cover(multi.boxes)
                one = ROISet(ROIMode.ONE_ROI, (cover,))
                picked = choose_roi((one, multi), task, M)
                other = multi if picked is one else one
                assert predict_roiset(picked, task, M) <= predict_roiset(other, task, M)
