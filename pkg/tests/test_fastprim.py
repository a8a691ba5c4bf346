"""Tests for component selection, the one-step quantile box, the covering
schedule, subset volume scans, and the optimality cross-check."""

import itertools
import math

import numpy as np
import pytest

from betamode.boxes import containment_mask, volume
from betamode.errors import DegenerateDataError, DomainError
from betamode.fastprim import (
    beta_schedule,
    fastprim_box,
    fastprim_cover,
    pettiest_optimality_check,
    select_components,
    subset_volume_scan,
)
from betamode.stats import Dataset, EigenBasis, eigh


def basis_from_eigenvalues(values):
    values = np.asarray(sorted(values), dtype=float)
    return EigenBasis(values, np.eye(len(values)))


def make_data(values, ids=None):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if ids is None:
        ids = tuple(f"x{j + 1}" for j in range(values.shape[1]))
    return Dataset(values, ids)


class TestSelectComponents:
    def test_pettiest_takes_smallest(self):
        sel = select_components(basis_from_eigenvalues([0.3, 1.7]), 1, "pettiest")
        assert sel.dims == (0,)
        assert sel.variances == (0.3,)

    def test_principal_takes_largest(self):
        sel = select_components(basis_from_eigenvalues([4.0, 20.0]), 1, "principal")
        assert sel.dims == (1,)
        assert sel.variances == (20.0,)

    def test_full_selection_both_modes(self):
        basis = basis_from_eigenvalues([1.0, 2.0, 3.0])
        pett = select_components(basis, 3, "pettiest")
        prin = select_components(basis, 3, "principal")
        assert sorted(pett.dims) == sorted(prin.dims) == [0, 1, 2]
        assert pett.dims == (0, 1, 2)
        assert prin.dims == (2, 1, 0)  # descending variance

    def test_p_prime_out_of_range(self):
        basis = basis_from_eigenvalues([1.0, 2.0])
        with pytest.raises(DomainError):
            select_components(basis, 3, "pettiest")
        with pytest.raises(DomainError):
            select_components(basis, 0, "principal")

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            select_components(basis_from_eigenvalues([1.0]), 1, "tiniest")


class TestFastprimBox:
    def test_bounds_sit_at_rank_order_statistics(self):
        rng = np.random.default_rng(7)
        n = 500
        data = make_data(rng.standard_normal((n, 2)))
        beta = 0.1
        box = fastprim_box(data, (0, 1), beta)
        marginal = math.sqrt(beta)
        lo_rank = math.ceil(0.5 * (1 - marginal) * n - 1e-9)
        hi_rank = math.ceil(0.5 * (1 + marginal) * n - 1e-9)
        for pos, d in enumerate(box.dims):
            col = np.sort(data.values[:, d])
            assert box.intervals[pos] == (col[lo_rank - 1], col[hi_rank - 1])

    def test_standard_normal_interval(self):
        rng = np.random.default_rng(11)
        data = make_data(rng.standard_normal(200_000))
        box = fastprim_box(data, (0,), 0.1)
        lo, hi = box.intervals[0]
        # population quantiles at (1 -/+ 0.1)/2 are -/+0.12566
        assert lo == pytest.approx(-0.12566134685507403, abs=0.01)
        assert hi == pytest.approx(0.12566134685507403, abs=0.01)

    def test_beta_near_one_spans_data_range(self):
        rng = np.random.default_rng(13)
        data = make_data(rng.standard_normal(1000))
        box = fastprim_box(data, (0,), 1.0 - 1e-12)
        col = data.values[:, 0]
        assert box.intervals[0] == (col.min(), col.max())

    def test_mass_approaches_beta(self):
        rng = np.random.default_rng(17)
        n = 100_000
        for p_prime in (1, 2, 3):
            data = make_data(rng.standard_normal((n, p_prime)))
            box = fastprim_box(data, tuple(range(p_prime)), 0.1)
            mass = np.count_nonzero(containment_mask(box, data.values)) / n
            assert abs(mass - 0.1) <= 0.01

    def test_widths_scale_with_sigma(self):
        rng = np.random.default_rng(19)
        n = 100_000
        sigmas = np.array([0.5, 2.0, 3.5])
        data = make_data(rng.standard_normal((n, 3)) * sigmas)
        box = fastprim_box(data, (0, 1, 2), 0.1)
        widths = np.array(box.widths)
        ratios = widths / sigmas
        assert np.max(ratios) / np.min(ratios) <= 1.05

    def test_degenerate_ties(self):
        data = make_data(np.ones(50))
        with pytest.raises(DegenerateDataError):
            fastprim_box(data, (0,), 0.1)

    def test_accepts_component_selection(self):
        rng = np.random.default_rng(23)
        data = make_data(rng.standard_normal((200, 3)))
        basis = eigh(np.diag([1.0, 2.0, 3.0]))
        sel = select_components(basis, 2, "pettiest")
        box = fastprim_box(data, sel, 0.2)
        assert box.dims == (0, 1)

    def test_beta_domain(self):
        data = make_data(np.linspace(0, 1, 50))
        with pytest.raises(DomainError):
            fastprim_box(data, (0,), 1.0)


class TestBetaSchedule:
    def test_single_step(self):
        assert beta_schedule(0.1, 1) == pytest.approx(0.1, abs=1e-15)

    def test_ten_steps_closed_form(self):
        assert beta_schedule(0.1, 10) == pytest.approx(0.6513215599, abs=1e-10)

    def test_monotone_and_bounded(self):
        values = [beta_schedule(0.1, t) for t in range(1, 200)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] < 1.0
        assert beta_schedule(0.1, 2000) == pytest.approx(1.0, abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_schedule(0.0, 3)
        with pytest.raises(DomainError):
            beta_schedule(0.1, 0)


class TestFastprimCover:
    def test_single_step_matches_box(self):
        rng = np.random.default_rng(29)
        data = make_data(rng.standard_normal((500, 2)))
        report = fastprim_cover(data, (0, 1), 0.1, 1)
        assert report.entries[0].box == fastprim_box(data, (0, 1), 0.1)

    def test_boxes_nested(self):
        rng = np.random.default_rng(31)
        data = make_data(rng.standard_normal((800, 2)))
        report = fastprim_cover(data, (0, 1), 0.1, 8)
        for prev, cur in zip(report.entries, report.entries[1:]):
            for (lo_a, hi_a), (lo_b, hi_b) in zip(prev.box.intervals, cur.box.intervals):
                assert lo_b <= lo_a
                assert hi_b >= hi_a

    def test_shells_partition_final_box(self):
        rng = np.random.default_rng(37)
        data = make_data(rng.standard_normal((1000, 2)))
        report = fastprim_cover(data, (0, 1), 0.1, 6)
        final_count = np.count_nonzero(
            containment_mask(report.entries[-1].box, data.values)
        )
        assert sum(e.count for e in report.entries) == final_count
        assert report.beta_T == pytest.approx(final_count / 1000)

    def test_beta_T_tracks_schedule(self):
        rng = np.random.default_rng(41)
        n = 50_000
        data = make_data(rng.standard_normal((n, 2)))
        report = fastprim_cover(data, (0, 1), 0.1, 10)
        assert report.beta_T == pytest.approx(beta_schedule(0.1, 10), abs=0.01)

    def test_shell_densities_recomputable(self):
        rng = np.random.default_rng(43)
        data = make_data(rng.standard_normal((2000, 2)))
        report = fastprim_cover(data, (0, 1), 0.1, 5)
        prev_count, prev_vol = 0, 0.0
        for entry in report.entries:
            count = int(np.count_nonzero(containment_mask(entry.box, data.values)))
            vol = volume(entry.box)
            shell_count = count - prev_count
            shell_vol = vol - prev_vol
            assert entry.count == shell_count
            assert entry.volume == pytest.approx(shell_vol, rel=1e-12)
            if shell_count:
                assert entry.density == pytest.approx(shell_count / shell_vol, rel=1e-12)
            prev_count, prev_vol = count, vol


class TestSubsetVolumeScan:
    def test_small_example(self):
        result = subset_volume_scan((1.0, 2.0, 3.0), 0.1, 2)
        assert result.argmin_subset == (0, 1)
        assert len(result.entries) == 3

    def test_five_choose_two(self):
        result = subset_volume_scan((0.5, 1.0, 2.0, 3.0, 4.0), 0.1, 2)
        assert len(result.entries) == 10
        assert result.argmin_subset == (0, 1)

    def test_full_subset(self):
        result = subset_volume_scan((2.0, 1.0), 0.3, 2)
        assert len(result.entries) == 1
        assert result.argmin_subset == (0, 1)

    def test_argmin_is_smallest_sigmas_random(self):
        rng = np.random.default_rng(47)
        for _ in range(50):
            p = int(rng.integers(3, 9))
            p_prime = int(rng.integers(1, min(p, 4)))
            sigmas = rng.uniform(0.1, 5.0, size=p)
            while len(np.unique(sigmas)) != p:
                sigmas = rng.uniform(0.1, 5.0, size=p)
            beta = float(rng.uniform(0.02, 0.9))
            result = subset_volume_scan(sigmas, beta, p_prime)
            expected = tuple(sorted(np.argsort(sigmas)[:p_prime]))
            assert tuple(sorted(result.argmin_subset)) == expected

    def test_volumes_match_brute_force(self):
        sigmas = (0.8, 1.3, 2.1, 0.4)
        result = subset_volume_scan(sigmas, 0.2, 2)
        from betamode.boxes import analytic_box_volume

        expected = {
            subset: analytic_box_volume([sigmas[i] for i in subset], 0.2)
            for subset in itertools.combinations(range(4), 2)
        }
        assert dict(result.entries) == expected

    def test_tie_flag(self):
        result = subset_volume_scan((1.0, 1.0, 1.0), 0.1, 2)
        assert result.is_tied
        assert result.argmin_subset == (0, 1)

    def test_size_cap(self):
        with pytest.raises(DomainError):
            subset_volume_scan([1.0] * 21, 0.1, 2)


class TestOptimalityCheck:
    def test_diagonal_pair(self):
        report = pettiest_optimality_check(
            np.diag([1.0, 4.0]), 0.1, 1, n_mc=20_000, seed=5
        )
        assert report.analytic_argmin_is_pettiest
        assert report.empirical_argmin_is_pettiest
        assert report.masses_within_slack
        assert report.passed
        # half widths scale with sigma: the variance-4 box is twice as wide
        vols = dict((tuple(s), v) for s, v, _ in report.empirical_entries)
        assert vols[(1,)] / vols[(0,)] == pytest.approx(2.0, rel=0.1)

    def test_correlated_pair(self):
        report = pettiest_optimality_check(
            np.array([[1.0, 0.7], [0.7, 1.0]]), 0.1, 1, n_mc=20_000, seed=7
        )
        assert report.eigenvalues == pytest.approx((0.3, 1.7), abs=1e-10)
        assert report.passed

    def test_identity_flags_tie(self):
        report = pettiest_optimality_check(np.eye(3), 0.1, 2, n_mc=20_000, seed=9)
        assert report.analytic_tie
        assert report.passed

    def test_non_psd_rejected(self):
        with pytest.raises(DomainError):
            pettiest_optimality_check(np.diag([1.0, -0.5]), 0.1, 1, n_mc=1000, seed=3)

    def test_p_cap(self):
        with pytest.raises(DomainError):
            pettiest_optimality_check(np.eye(9), 0.1, 2, n_mc=1000, seed=3)
