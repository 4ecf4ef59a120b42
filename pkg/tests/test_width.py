import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqgpe import (
    DensityArgs,
    WidthStatus,
    classify_region,
    cubic_residual,
    solve_width,
    solve_width_arrays,
    weak_width,
    width_map,
)
from oracles import bisect_width

coupling_floats = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)

# frozen from the bisection oracle in oracles.py (200 halvings)
S_AT_1_1 = 1.672487836616587


class TestSolveWidth:
    def test_origin(self):
        sol = solve_width(DensityArgs(0.0, 0.0))
        assert sol.status is WidthStatus.VALID
        assert sol.s == pytest.approx(1.0, abs=1e-14)

    def test_repulsive_point(self):
        sol = solve_width(DensityArgs(1.0, 1.0))
        assert sol.s == pytest.approx(S_AT_1_1, rel=1e-12)
        assert abs(sol.residual) <= 1e-12 * max(1.0, sol.s**3)

    def test_collapse_boundary(self):
        sol = solve_width(DensityArgs(-1.0, 0.0))
        assert sol.status is WidthStatus.NO_POSITIVE_ROOT
        assert np.isnan(sol.s)

    def test_cubic_only_exact_law(self):
        for a3 in np.linspace(0.0, 10.0, 37):
            sol = solve_width(DensityArgs(float(a3), 0.0))
            assert abs(sol.s - np.sqrt(1.0 + a3)) <= 1e-12

    @given(coupling_floats, coupling_floats)
    @settings(max_examples=300)
    def test_residual_and_oracle_agreement(self, a3, a5):
        sol = solve_width(DensityArgs(a3, a5))
        root = bisect_width(a3, a5)
        if sol.status is WidthStatus.VALID:
            assert root is not None
            assert abs(sol.s - root) <= 1e-10
            assert abs(cubic_residual(sol.s, a3, a5)) <= 1e-12 * max(1.0, sol.s**3)
        else:
            assert root is None

    @given(coupling_floats.filter(lambda v: v >= 0), coupling_floats.filter(lambda v: v >= 0))
    @settings(max_examples=200)
    def test_monotone_in_repulsive_quadrant(self, a3, a5):
        base = solve_width(DensityArgs(a3, a5)).s
        assert solve_width(DensityArgs(a3 + 0.1, a5)).s >= base - 1e-12
        assert solve_width(DensityArgs(a3, a5 + 0.1)).s >= base - 1e-12

    def test_continuity_at_origin(self):
        for eps in (1e-3, 1e-6, 1e-9):
            s = solve_width(DensityArgs(eps, eps)).s
            assert abs(s - 1.0) < 3.0 * eps

    def test_array_and_scalar_paths_agree(self):
        rng = np.random.default_rng(11)
        a3 = rng.uniform(-2, 2, 64)
        a5 = rng.uniform(-2, 2, 64)
        batch = solve_width_arrays(a3, a5)
        for i in range(64):
            single = solve_width(DensityArgs(a3[i], a5[i]))
            if np.isnan(batch[i]):
                assert single.status is WidthStatus.NO_POSITIVE_ROOT
            else:
                assert batch[i] == single.s

    def test_rejects_non_finite_args(self):
        with pytest.raises(ValueError):
            DensityArgs(np.nan, 0.0)


class TestWeakWidth:
    def test_values(self):
        assert weak_width(DensityArgs(0.0, 0.0)) == 1.0
        assert weak_width(DensityArgs(0.1, 0.1)) == pytest.approx(1.0583333333333333)
        assert weak_width(DensityArgs(1.0, 1.0)) == pytest.approx(1.5833333333333333)

    def test_second_order_agreement_with_exact(self):
        errors = []
        for eps in (0.1, 0.05, 0.025):
            sigma = np.sqrt(solve_width(DensityArgs(eps, eps)).s)
            errors.append(abs(sigma - weak_width(DensityArgs(eps, eps))))
        assert 3.5 <= errors[0] / errors[1] <= 4.5
        assert 3.5 <= errors[1] / errors[2] <= 4.5


class TestClassifyRegion:
    def test_reference_points(self):
        assert classify_region(DensityArgs(0.0, 0.0)) is WidthStatus.VALID
        assert classify_region(DensityArgs(-1.0, 0.0)) is WidthStatus.NO_POSITIVE_ROOT
        # sign scan of the cubic shows a strictly positive minimum here
        assert classify_region(DensityArgs(-0.5, -0.5)) is WidthStatus.NO_POSITIVE_ROOT

    def test_positive_quintic_always_valid(self):
        for a3 in (-5.0, -1.0, 0.0, 2.0):
            assert classify_region(DensityArgs(a3, 0.3)) is WidthStatus.VALID

    @given(coupling_floats, coupling_floats)
    @settings(max_examples=200)
    def test_matches_solve_width(self, a3, a5):
        expected = solve_width(DensityArgs(a3, a5)).status
        assert classify_region(DensityArgs(a3, a5)) is expected


class TestWidthMap:
    def test_unit_square_all_valid(self):
        table = width_map((0.0, 1.0), (0.0, 1.0), 2)
        assert len(table) == 4
        assert table.valid.all()
        assert table.s[0] == pytest.approx(1.0, abs=1e-14)  # (0, 0) corner

    def test_row_major_order(self):
        table = width_map((0.0, 1.0), (0.0, 2.0), 3)
        assert np.allclose(table.a3[:3], 0.0)
        assert np.allclose(table.a5[:3], [0.0, 1.0, 2.0])
        assert np.allclose(table.a3[3:6], 0.5)

    def test_degenerate_range(self):
        table = width_map((0.0, 0.0), (0.0, 0.0), 2)
        assert len(table) == 4
        assert np.allclose(table.s, 1.0)

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            width_map((0.0, 1.0), (0.0, 1.0), 1)

    def test_mixed_validity_against_oracle(self):
        table = width_map((-2.0, 2.0), (-2.0, 2.0), 21)
        for a3, a5, s, status in table.rows():
            root = bisect_width(a3, a5)
            assert (status is WidthStatus.VALID) == (root is not None)
            if root is not None:
                assert s == pytest.approx(root, abs=1e-10)
