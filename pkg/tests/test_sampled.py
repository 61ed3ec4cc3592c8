"""Finite sampled systems: Bowen scans, covers, box dimension."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from expanse.sampled import (
    FiniteSampledSystem,
    OpenCoverSpec,
    bowen_distance,
    box_dimension_estimate,
    expansive_constant_estimate,
    gamma_estimate_sequence,
    lebesgue_sequence,
    lipschitz_constant_estimate,
    system_from_json,
    system_to_json,
)
from expanse.symbolic import (
    SymbolicSpace,
    TransitionMatrix,
    cylinder_lebesgue_exact,
)

INF = float("inf")


def swap2():
    return FiniteSampledSystem.from_arrays([[0.0, 1.0], [1.0, 0.0]], [1, 0])


def rot4():
    # four points on the circle, rotation by a quarter turn
    d = [[0.0, 0.25, 0.5, 0.25],
         [0.25, 0.0, 0.25, 0.5],
         [0.5, 0.25, 0.0, 0.25],
         [0.25, 0.5, 0.25, 0.0]]
    return FiniteSampledSystem.from_arrays(d, [1, 2, 3, 0])


def circle(count):
    ang = np.arange(count) / count
    diff = np.abs(ang[:, None] - ang[None, :])
    dist = np.minimum(diff, 1.0 - diff)
    shift = (np.arange(count) + 1) % count
    return FiniteSampledSystem.from_arrays(dist, shift)


def torus_grid(Q):
    ij = np.arange(Q) / Q
    x, y = np.meshgrid(ij, ij, indexing="ij")
    pts = np.stack([x.ravel(), y.ravel()], axis=1)
    d0 = np.abs(pts[:, None, 0] - pts[None, :, 0])
    d0 = np.minimum(d0, 1.0 - d0)
    d1 = np.abs(pts[:, None, 1] - pts[None, :, 1])
    d1 = np.minimum(d1, 1.0 - d1)
    dist = np.sqrt(d0 * d0 + d1 * d1)
    return FiniteSampledSystem.from_arrays(dist, np.arange(Q * Q))


class TestFromArrays:
    def test_auto_inverse_for_bijection(self):
        s = rot4()
        assert s.invertible
        assert s.inverse_map.tolist() == [3, 0, 1, 2]

    def test_non_bijective_has_no_inverse(self):
        s = FiniteSampledSystem.from_arrays([[0.0, 1.0], [1.0, 0.0]], [0, 0])
        assert not s.invertible

    def test_arrays_frozen(self):
        s = rot4()
        with pytest.raises(ValueError):
            s.dist[0, 1] = 9.0

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.0, 1.0], [2.0, 0.0]], [1, 0])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.0, -1.0], [-1.0, 0.0]], [1, 0])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.5, 1.0], [1.0, 0.0]], [1, 0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.0, INF], [INF, 0.0]], [1, 0])

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.0, 1.0]], [0])

    def test_rejects_map_out_of_range(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays([[0.0, 1.0], [1.0, 0.0]], [1, 2])

    def test_rejects_inverse_for_non_bijection(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays(
                [[0.0, 1.0], [1.0, 0.0]], [0, 0], inverse=[0, 0]
            )

    def test_rejects_wrong_inverse(self):
        with pytest.raises(ValueError):
            FiniteSampledSystem.from_arrays(
                [[0.0, 1.0], [1.0, 0.0]], [1, 0], inverse=[0, 1]
            )

    def test_accepts_correct_inverse(self):
        s = FiniteSampledSystem.from_arrays(
            [[0.0, 1.0], [1.0, 0.0]], [1, 0], inverse=[1, 0]
        )
        assert s.invertible


class TestBowen:
    def test_hand_values(self):
        s = rot4()
        assert bowen_distance(s, 0, 1, 1) == 0.25
        # after one step the pair (0, 2) stays opposite
        assert bowen_distance(s, 0, 2, 3) == 0.5

    def test_index_and_n_validated(self):
        s = swap2()
        with pytest.raises(ValueError):
            bowen_distance(s, 0, 5, 1)
        with pytest.raises(ValueError):
            bowen_distance(s, 0, 1, 0)

    @settings(max_examples=30, deadline=None)
    @given(n1=st.integers(1, 6), n2=st.integers(1, 6))
    def test_monotone_in_n(self, n1, n2):
        dist, fmap = oracles.truncated_shift_sample(2)
        s = FiniteSampledSystem.from_arrays(dist, fmap)
        if n1 > n2:
            n1, n2 = n2, n1
        assert bowen_distance(s, 3, 17, n1) <= bowen_distance(s, 3, 17, n2)


class TestExpansiveEstimate:
    def test_two_point_swap(self):
        s = swap2()
        for n in (1, 2, 3):
            for k in (0, 1, 4):
                assert expansive_constant_estimate(s, n, horizon=k) == 1.0

    def test_rotation_is_isometry(self):
        s = rot4()
        for n in range(1, 5):
            assert expansive_constant_estimate(s, n, horizon=4) == 0.25

    def test_truncation_edge_pair_dominates(self):
        # the pair differing only at the window's top position collides
        # after one step, freezing the estimate at the edge distance 2^-W
        dist, fmap = oracles.truncated_shift_sample(5)
        s = FiniteSampledSystem.from_arrays(dist, fmap)
        for n in (1, 2, 3, 4):
            assert expansive_constant_estimate(s, n, horizon=8) == 2.0**-5

    def test_horizon_widening_shrinks(self):
        s = circle(16)
        vals = [expansive_constant_estimate(s, 1, horizon=k) for k in range(6)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a

    def test_validation(self):
        s = swap2()
        with pytest.raises(ValueError):
            expansive_constant_estimate(s, 0, horizon=1)
        with pytest.raises(ValueError):
            expansive_constant_estimate(s, 1, horizon=-1)
        single = FiniteSampledSystem.from_arrays([[0.0]], [0])
        with pytest.raises(ValueError):
            expansive_constant_estimate(single, 1, horizon=1)

    def test_sequence_kind_and_source(self):
        seq = gamma_estimate_sequence(rot4(), 3, horizon=4)
        assert seq.kind == "estimate"
        assert "horizon=4" in seq.source
        assert seq.entries == {1: 0.25, 2: 0.25, 3: 0.25}


class TestLipschitz:
    def test_rotation_is_one(self):
        assert lipschitz_constant_estimate(rot4()) == 1.0

    def test_doubling_on_circle(self):
        ang = np.arange(8) / 8
        diff = np.abs(ang[:, None] - ang[None, :])
        dist = np.minimum(diff, 1.0 - diff)
        double = [(2 * i) % 8 for i in range(8)]
        s = FiniteSampledSystem.from_arrays(dist, double)
        assert lipschitz_constant_estimate(s) == pytest.approx(2.0, abs=1e-12)

    def test_zero_distance_pair_rejected(self):
        d = [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
        s = FiniteSampledSystem.from_arrays(d, [0, 1, 2])
        with pytest.raises(ValueError):
            lipschitz_constant_estimate(s)


class TestLebesgue:
    def test_rotation_adjacent_cover(self):
        cover = OpenCoverSpec.from_lists([[0, 1], [1, 2], [2, 3], [3, 0]])
        seq = lebesgue_sequence(rot4(), cover, 5)
        assert seq.kind == "estimate"
        assert all(v == 0.25 for v in seq.entries.values())

    def test_whole_space_element_is_sentinel(self):
        cover = OpenCoverSpec.from_lists([[0, 1, 2, 3]])
        seq = lebesgue_sequence(rot4(), cover, 3)
        assert all(v == INF for v in seq.entries.values())

    def test_truncated_shift_matches_cylinder_formula(self):
        dist, fmap = oracles.truncated_shift_sample(5)
        s = FiniteSampledSystem.from_arrays(dist, fmap)
        cover = OpenCoverSpec.from_lists([
            [i for i in range(2048) if not (i >> 5) & 1],
            [i for i in range(2048) if (i >> 5) & 1],
        ])
        seq = lebesgue_sequence(s, cover, 4)
        space = SymbolicSpace(
            matrix=TransitionMatrix.from_rows([[1, 1], [1, 1]]), q=2.0, sided="two"
        )
        for n in range(1, 5):
            assert seq.entries[n] == cylinder_lebesgue_exact(space, n)

    def test_cover_validation(self):
        s = rot4()
        with pytest.raises(ValueError):
            lebesgue_sequence(s, OpenCoverSpec.from_lists([]), 2)
        with pytest.raises(ValueError):
            lebesgue_sequence(s, OpenCoverSpec.from_lists([[0, 1], []]), 2)
        with pytest.raises(ValueError):
            lebesgue_sequence(s, OpenCoverSpec.from_lists([[0, 9]]), 2)
        with pytest.raises(ValueError):
            lebesgue_sequence(s, OpenCoverSpec.from_lists([[0, 1], [1, 2]]), 2)
        with pytest.raises(ValueError):
            lebesgue_sequence(s, OpenCoverSpec.from_lists([[0, 1, 2, 3]]), 0)


class TestBoxDimension:
    def test_circle_dimension_one(self):
        s = circle(256)
        est = box_dimension_estimate(s, [2.0**-k for k in range(2, 7)])
        assert est.covering_counts == (2, 4, 8, 16, 32)
        assert est.slope_lower == pytest.approx(1.0, abs=1e-12)
        assert est.slope_upper == pytest.approx(1.0, abs=1e-12)
        assert 0.9 <= est.slope_lower <= est.slope_upper <= 1.1

    def test_torus_dimension_two(self):
        s = torus_grid(64)
        est = box_dimension_estimate(s, [2.0**-k for k in range(1, 5)])
        assert est.covering_counts == (2, 8, 32, 128)
        assert est.slope_lower == pytest.approx(2.0, abs=1e-12)
        assert est.slope_upper == pytest.approx(2.0, abs=1e-12)
        assert 1.8 <= est.slope_lower <= est.slope_upper <= 2.2

    def test_counts_nondecreasing(self):
        s = circle(64)
        est = box_dimension_estimate(s, [0.3, 0.21, 0.11, 0.06, 0.03])
        assert list(est.covering_counts) == sorted(est.covering_counts)

    def test_scale_below_resolution_rejected(self):
        s = circle(32)  # resolution 1/32
        with pytest.raises(ValueError):
            box_dimension_estimate(s, [0.25, 2.0**-6])

    def test_too_few_scales_rejected(self):
        with pytest.raises(ValueError):
            box_dimension_estimate(circle(32), [0.25])

    def test_nondescending_rejected(self):
        with pytest.raises(ValueError):
            box_dimension_estimate(circle(32), [0.25, 0.25])
        with pytest.raises(ValueError):
            box_dimension_estimate(circle(32), [0.125, 0.25])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            box_dimension_estimate(circle(32), [0.25, 0.0])

    def test_coincident_points_rejected(self):
        d = np.zeros((3, 3))
        s = FiniteSampledSystem.from_arrays(d, [0, 1, 2])
        with pytest.raises(ValueError):
            box_dimension_estimate(s, [0.5, 0.25])

    def test_single_point_rejected(self):
        s = FiniteSampledSystem.from_arrays([[0.0]], [0])
        with pytest.raises(ValueError):
            box_dimension_estimate(s, [0.5, 0.25])


class TestJson:
    def test_round_trip(self):
        s = rot4()
        doc = system_to_json(s)
        back = system_from_json(doc)
        assert back.point_count == 4
        assert np.array_equal(back.dist, s.dist)
        assert np.array_equal(back.map, s.map)
        assert np.array_equal(back.inverse_map, s.inverse_map)

    def test_missing_field(self):
        with pytest.raises(ValueError):
            system_from_json({"points": 2, "dist": [[0, 1], [1, 0]]})

    def test_points_mismatch(self):
        with pytest.raises(ValueError):
            system_from_json(
                {"points": 3, "dist": [[0, 1], [1, 0]], "map": [1, 0]}
            )

    def test_bad_points_type(self):
        with pytest.raises(ValueError):
            system_from_json(
                {"points": True, "dist": [[0]], "map": [0]}
            )

    def test_inverse_length_checked(self):
        with pytest.raises(ValueError):
            system_from_json(
                {
                    "points": 2,
                    "dist": [[0, 1], [1, 0]],
                    "map": [1, 0],
                    "inverse_map": [0],
                }
            )
