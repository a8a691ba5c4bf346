"""Tests for quantile peeling, peel-to-beta trajectories, and covering."""

import numpy as np
import pytest
from oracles import greedy_single_point_peeling

from betamode.boxes import Box, containment_mask, volume
from betamode.errors import (
    CannotPeelError,
    DomainError,
    InsufficientPointsError,
    InvalidInputError,
)
from betamode.prim import (
    bounding_box,
    empirical_quantile,
    peel,
    prim_cover,
    prim_peel_to_beta,
)
from betamode.stats import Dataset


def make_data(values, ids=None):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if ids is None:
        ids = tuple(f"x{j + 1}" for j in range(values.shape[1]))
    return Dataset(values, ids)


class TestEmpiricalQuantile:
    def test_median_of_five(self):
        assert empirical_quantile([1, 2, 3, 4, 5], 0.5) == 3.0

    def test_low_level_gives_minimum(self):
        assert empirical_quantile([9.0, 4.0, 7.0, 1.0], 0.2) == 1.0

    def test_single_element(self):
        assert empirical_quantile([7.0], 0.3) == 7.0

    def test_matches_sorted_rank_brute_force(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            m = int(rng.integers(1, 60))
            values = rng.standard_normal(m)
            q = float(rng.uniform(0.01, 0.99))
            rank = int(np.ceil(q * m - 1e-9))
            rank = min(max(rank, 1), m)
            assert empirical_quantile(values, q) == np.sort(values)[rank - 1]

    def test_empty_input(self):
        with pytest.raises(InvalidInputError):
            empirical_quantile([], 0.5)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.5])
    def test_level_domain(self, q):
        with pytest.raises(DomainError):
            empirical_quantile([1.0, 2.0], q)


class TestBoundingBox:
    def test_contains_all_points_half_open(self):
        rng = np.random.default_rng(29)
        data = make_data(rng.standard_normal((50, 3)))
        box = bounding_box(data)
        assert containment_mask(box, data.values).all()

    def test_tight_upper_edges(self):
        data = make_data([[0.0, -1.0], [2.0, 5.0]])
        box = bounding_box(data)
        assert box.intervals[0][1] == 2.0
        assert box.intervals[1][1] == 5.0


class TestPeel:
    def test_outlier_cluster_low_side_wins(self):
        # one far-low outlier plus a tight cluster: cutting the low slab
        # reclaims the empty gap, so its post-removal density dominates.
        # 20 points, alpha=0.1 -> each slab removes ceil(2)=2 points.
        values = np.concatenate([
            [0.0, 0.5],
            np.linspace(0.52, 0.98, 16),
            [0.99, 1.0],
        ])
        data = make_data(values)
        box = bounding_box(data)
        new_box, step = peel(data, box, 0.1)
        # low candidate: cut at 2nd smallest = 0.5, density 18/(1.0-0.5) = 36
        # high candidate: cut at 18th smallest = 0.98, density 18/0.98 = 18.4
        assert step.side == "low"
        assert step.dim == 0
        assert step.cut == 0.5
        assert step.removed_count == 2
        assert step.density_after == pytest.approx(18 / 0.5, rel=1e-12)
        assert new_box.intervals[0] == (0.5, 1.0)

    def test_exact_tie_prefers_low_then_lowest_dim(self):
        # inside the box (1, 6] the five points 2..6 make the low and high
        # candidates exact mirror images: both remove 1 point and leave
        # width 4, so the tie rule decides.
        data = make_data([2.0, 3.0, 4.0, 5.0, 6.0])
        box = Box((0,), ((1.0, 6.0),))
        _, step = peel(data, box, 0.2)
        assert step.side == "low"
        assert step.cut == 2.0

    def test_dim_tie_takes_lowest_dim(self):
        # two identical columns: candidates in dim 0 and dim 1 are bitwise
        # identical, so dimension order decides
        rng = np.random.default_rng(37)
        col = rng.uniform(0.0, 1.0, size=30)
        data = make_data(np.column_stack([col, col]))
        _, step = peel(data, bounding_box(data), 0.1)
        assert step.dim == 0

    def test_removed_count_five_of_hundred(self):
        rng = np.random.default_rng(39)
        data = make_data(rng.uniform(0.0, 1.0, size=100))
        _, step = peel(data, bounding_box(data), 0.05)
        assert step.removed_count == 5

    def test_volume_shrinks_and_count_never_grows(self):
        rng = np.random.default_rng(49)
        data = make_data(rng.standard_normal((120, 3)))
        box = bounding_box(data)
        count = data.n
        for _ in range(15):
            new_box, step = peel(data, box, 0.07)
            assert volume(new_box) < volume(box)
            new_count = int(np.count_nonzero(containment_mask(new_box, data.values)))
            assert new_count <= count
            assert new_count == count - step.removed_count
            box, count = new_box, new_count

    def test_too_few_points(self):
        data = make_data([1.0, 2.0])
        box = Box((0,), ((5.0, 6.0),))  # empty box
        with pytest.raises(CannotPeelError):
            peel(data, box, 0.1)

    def test_alpha_domain(self):
        data = make_data([1.0, 2.0, 3.0])
        with pytest.raises(DomainError):
            peel(data, bounding_box(data), 0.5)


class TestPeelToBeta:
    def test_beta_one_returns_bounding_box(self):
        rng = np.random.default_rng(51)
        data = make_data(rng.standard_normal((40, 2)))
        traj = prim_peel_to_beta(data, 1.0, 0.05)
        assert traj.steps == ()
        assert traj.final_mass == 1.0
        assert traj.final_box == bounding_box(data)

    def test_final_count_window(self):
        rng = np.random.default_rng(57)
        data = make_data(rng.standard_normal((300, 4)))
        traj = prim_peel_to_beta(data, 0.1, 0.05)
        count = round(traj.final_mass * 300)
        assert 300 * (0.1 - 0.05) < count <= 300 * 0.1

    def test_one_dimensional_normal_centers_near_zero(self):
        rng = np.random.default_rng(63)
        data = make_data(rng.standard_normal(100_000))
        traj = prim_peel_to_beta(data, 0.1, 0.05)
        lo, hi = traj.final_box.intervals[0]
        assert abs(0.5 * (lo + hi)) < 0.1

    def test_mass_window_and_monotone_volume_random(self):
        rng = np.random.default_rng(69)
        for _ in range(30):
            n = int(rng.integers(60, 200))
            p = int(rng.integers(1, 4))
            beta = float(rng.uniform(0.05, 0.5))
            alpha = float(rng.uniform(max(0.02, 1.5 / n), 0.2))
            data = make_data(rng.standard_normal((n, p)))
            traj = prim_peel_to_beta(data, beta, alpha)
            assert beta - alpha < traj.final_mass <= beta
            volumes = [step.density_after for step in traj.steps]
            assert all(v > 0 for v in volumes)
            assert traj.final_volume <= volume(bounding_box(data))

    def test_target_too_small(self):
        data = make_data([1.0, 2.0, 3.0])
        with pytest.raises(InvalidInputError):
            prim_peel_to_beta(data, 0.1, 0.05)  # n*beta = 0.3 < 1

    def test_greedy_oracle_equivalence_single_point_peels(self):
        rng = np.random.default_rng(73)
        for _ in range(25):
            n = int(rng.integers(10, 31))
            p = int(rng.integers(1, 3))
            beta = float(rng.uniform(0.15, 0.5))
            data = make_data(rng.standard_normal((n, p)))
            alpha = 0.5 / n  # every peel removes exactly one point
            traj = prim_peel_to_beta(data, beta, alpha)
            lowers, uppers, alive = greedy_single_point_peeling(data.values, beta)
            for j in range(p):
                lo, hi = traj.final_box.intervals[j]
                assert lo == lowers[j]
                assert hi == uppers[j]
            mask = containment_mask(traj.final_box, data.values)
            np.testing.assert_array_equal(np.nonzero(mask)[0], alive)


class TestCover:
    def test_single_round_matches_peel_to_beta(self):
        rng = np.random.default_rng(79)
        data = make_data(rng.standard_normal((150, 2)))
        report = prim_cover(data, 0.1, 0.05, 1)
        traj = prim_peel_to_beta(data, 0.1, 0.05)
        assert report.entries[0].box == traj.final_box
        assert report.entries[0].mass == traj.final_mass

    def test_masses_disjoint_and_bounded(self):
        rng = np.random.default_rng(83)
        data = make_data(rng.standard_normal((400, 3)))
        report = prim_cover(data, 0.1, 0.05, 5)
        total = sum(e.mass for e in report.entries)
        assert total <= 1.0
        assert report.beta_T == pytest.approx(total)
        # each round claims beta of what remained: masses decay geometrically
        masses = [e.mass for e in report.entries]
        for k, m in enumerate(masses):
            assert m <= 0.1 * (1 - 0.05) ** k + 0.02

    def test_claimed_points_disjoint(self):
        rng = np.random.default_rng(89)
        data = make_data(rng.standard_normal((300, 2)))
        report = prim_cover(data, 0.15, 0.05, 4)
        claimed = np.zeros(data.n, dtype=bool)
        for entry in report.entries:
            mask = containment_mask(entry.box, data.values) & ~claimed
            assert int(np.count_nonzero(mask)) == entry.count
            claimed |= mask

    def test_density_recomputable(self):
        rng = np.random.default_rng(97)
        data = make_data(rng.standard_normal((200, 2)))
        report = prim_cover(data, 0.1, 0.05, 3)
        claimed = np.zeros(data.n, dtype=bool)
        for entry in report.entries:
            mask = containment_mask(entry.box, data.values) & ~claimed
            count = int(np.count_nonzero(mask))
            claimed |= mask
            assert entry.density == pytest.approx(count / volume(entry.box), rel=1e-12)

    def test_insufficient_points_names_round(self):
        rng = np.random.default_rng(101)
        data = make_data(rng.standard_normal((12, 1)))
        with pytest.raises(InsufficientPointsError) as exc_info:
            prim_cover(data, 0.4, 0.2, 8)
        assert exc_info.value.round_index >= 2
