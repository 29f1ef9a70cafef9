"""Covering schedule, two-phase construction, coverage checks, and bounds."""

import math

import numpy as np
import pytest

from qsc import (
    Covering,
    PureState,
    SeededSampler,
    build_internal_covering,
    coverage_verify,
    covering_schedule,
    default_packing_ratio,
    external_covering_lower_bound,
    internal_covering_bounds,
    trace_distance,
)


class TestCoveringSchedule:
    def test_worked_example(self):
        # independent arithmetic: eps_R = (2/3)(1/2), eps_P = eps_R/2,
        # J_R = ceil(2/eps_R^2 * ln 2)
        sched = covering_schedule(2, 0.5, 2.0)
        assert sched.epsilon_r == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert sched.epsilon_p == pytest.approx(1.0 / 6.0, abs=1e-15)
        assert sched.j_r == math.ceil(2.0 / (1.0 / 3.0) ** 2 * math.log(2.0))
        assert sched.j_r == 13

    def test_unit_ratio_gives_empty_phase_one(self):
        sched = covering_schedule(2, 1.0, 1.0)
        assert sched.epsilon_r == pytest.approx(0.5)
        assert sched.epsilon_p == pytest.approx(0.5)
        assert sched.j_r == 0

    def test_default_ratio(self):
        assert default_packing_ratio(3) == pytest.approx(4.0 * math.log(4.0), abs=1e-12)
        assert default_packing_ratio(2) == pytest.approx(2.0 * math.log(2.0), abs=1e-12)
        sched = covering_schedule(3, 0.5)
        ratio = sched.epsilon_r / sched.epsilon_p
        assert ratio == pytest.approx(4.0 * math.log(4.0), rel=1e-12)

    def test_radii_sum_to_epsilon(self):
        for d in (2, 3, 5):
            for eps in (0.3, 0.5, 0.9, 1.0):
                for x in (1.0, 2.0, 5.545):
                    sched = covering_schedule(d, eps, x)
                    assert sched.epsilon_r + sched.epsilon_p == pytest.approx(eps, abs=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            covering_schedule(1, 0.5)
        with pytest.raises(ValueError):
            covering_schedule(2, 0.0)
        with pytest.raises(ValueError):
            covering_schedule(2, 1.5)
        with pytest.raises(ValueError):
            covering_schedule(2, 0.5, 0.5)


class TestCoveringType:
    def test_meta_consistency_enforced(self):
        elements = [PureState.basis(2, 0), PureState.basis(2, 1)]
        meta = {
            "J_R": 1,
            "J_P": 1,
            "epsilon_R": 0.3,
            "epsilon_P": 0.2,
            "x": 1.5,
            "seed": 0,
            "fail_streak_limit": 10,
        }
        Covering(2, 0.5, elements, meta)
        with pytest.raises(ValueError, match="radius"):
            Covering(2, 0.6, elements, meta)
        with pytest.raises(ValueError, match="J_R"):
            Covering(2, 0.5, elements[:1], meta)

    def test_element_dimension_checked(self):
        with pytest.raises(ValueError, match="dimension"):
            Covering(2, 0.5, [PureState.basis(3, 0)])

    def test_radius_domain(self):
        with pytest.raises(ValueError):
            Covering(2, 0.0, [])
        with pytest.raises(ValueError):
            Covering(2, 1.5, [])

    def test_json_roundtrip(self, tmp_path):
        book = build_internal_covering(2, 0.7, sampler=SeededSampler(21))
        path = tmp_path / "book.json"
        book.save(path)
        again = Covering.load(path)
        assert again.dim == book.dim
        assert again.radius == book.radius
        assert again.construction_meta == book.construction_meta
        assert len(again) == len(book)
        for a, b in zip(again.elements, book.elements):
            assert trace_distance(a, b) < 1e-12

    def test_labels_must_be_contiguous(self):
        book = Covering(2, 0.5, [PureState.basis(2, 0)])
        doc = book.to_json()
        doc["elements"][0]["label"] = 3
        with pytest.raises(ValueError, match="labels"):
            Covering.from_json(doc)


class TestBuildInternalCovering:
    def test_degenerate_radius_one(self):
        book = build_internal_covering(2, 1.0, x=1.0, sampler=SeededSampler(0))
        assert len(book) >= 1
        report = coverage_verify(book, 1.0, 20_000, SeededSampler(1))
        assert report.covered_fraction >= 1.0 - 1e-3

    def test_half_radius_covering_covers(self):
        book = build_internal_covering(2, 0.5, sampler=SeededSampler(7))
        report = coverage_verify(book, 0.5, 50_000, SeededSampler(8))
        assert report.covered_fraction >= 0.999

    @pytest.mark.parametrize("eps", [0.5, 0.7, 1.0])
    def test_size_within_lemma_bound(self, eps):
        book = build_internal_covering(2, eps, sampler=SeededSampler(9))
        assert len(book) <= internal_covering_bounds(2, eps).upper

    def test_packing_separations_hold(self):
        book = build_internal_covering(2, 0.5, sampler=SeededSampler(10))
        meta = book.construction_meta
        j_r = meta["J_R"]
        phase1 = book.elements[:j_r]
        phase2 = book.elements[j_r:]
        min_sep = meta["epsilon_R"] + meta["epsilon_P"]
        min_gap = 2.0 * meta["epsilon_P"]
        for i, p in enumerate(phase2):
            for q in phase1:
                assert trace_distance(p, q) >= min_sep - 1e-10
            for r in phase2[i + 1 :]:
                assert trace_distance(p, r) >= min_gap - 1e-10

    def test_radius_is_sum_of_phase_radii(self):
        book = build_internal_covering(2, 0.6, sampler=SeededSampler(11))
        meta = book.construction_meta
        assert book.radius == pytest.approx(meta["epsilon_R"] + meta["epsilon_P"], abs=1e-15)
        assert book.radius <= 0.6 + 1e-12

    def test_requires_sampler(self):
        with pytest.raises(ValueError, match="Sampler"):
            build_internal_covering(2, 0.5)

    def test_fail_streak_validation(self):
        with pytest.raises(ValueError):
            build_internal_covering(2, 0.5, fail_streak_limit=0, sampler=SeededSampler(0))

    def test_deterministic_given_seed(self):
        a = build_internal_covering(2, 0.5, sampler=SeededSampler(12))
        b = build_internal_covering(2, 0.5, sampler=SeededSampler(12))
        assert len(a) == len(b)
        for x, y in zip(a.elements, b.elements):
            assert np.array_equal(x.amplitudes, y.amplitudes)


class TestCoverageVerify:
    def test_single_state_covers_at_radius_one(self):
        book = Covering(2, 1.0, [PureState.basis(2, 0)])
        report = coverage_verify(book, 1.0, 20_000, SeededSampler(13))
        assert report.covered_fraction == 1.0

    def test_too_small_radius_leaves_gaps(self):
        book = build_internal_covering(2, 0.5, sampler=SeededSampler(14))
        report = coverage_verify(book, book.radius / 2.0, 50_000, SeededSampler(15))
        assert report.covered_fraction < 1.0

    def test_monotone_in_radius_on_shared_samples(self):
        book = build_internal_covering(2, 0.5, sampler=SeededSampler(16))
        small = coverage_verify(book, 0.3, 20_000, SeededSampler(17))
        large = coverage_verify(book, 0.45, 20_000, SeededSampler(17))
        assert large.covered_fraction >= small.covered_fraction
        assert large.worst_gap == small.worst_gap

    def test_empty_covering(self):
        report = coverage_verify(Covering(2, 0.5, []), 0.5, 100, SeededSampler(18))
        assert report.covered_fraction == 0.0
        assert report.worst_gap == 1.0

    def test_worst_gap_bounds_covered_fraction(self):
        book = build_internal_covering(2, 0.5, sampler=SeededSampler(19))
        report = coverage_verify(book, 0.5, 20_000, SeededSampler(20))
        if report.worst_gap < 0.5:
            assert report.covered_fraction == 1.0


class TestCoveringNumberBounds:
    def test_internal_reference_values(self):
        bounds = internal_covering_bounds(2, 0.5)
        assert bounds.lower == pytest.approx(4.0, abs=1e-12)
        assert bounds.upper == pytest.approx(10.0 * math.log(2.0) * 4.0, abs=1e-12)
        assert internal_covering_bounds(4, 0.5).lower == pytest.approx(64.0, abs=1e-12)
        assert internal_covering_bounds(3, 1.0).lower == 1.0

    def test_internal_domain(self):
        with pytest.raises(ValueError):
            internal_covering_bounds(1, 0.5)
        with pytest.raises(ValueError):
            internal_covering_bounds(2, 0.0)

    def test_external_reference_values(self):
        assert external_covering_lower_bound(2, 0.25) == pytest.approx(4.0, abs=1e-12)
        assert external_covering_lower_bound(4, 0.5) == pytest.approx(64.0, abs=1e-12)
        assert external_covering_lower_bound(1, 0.1) == 1.0

    def test_external_domain(self):
        with pytest.raises(ValueError):
            external_covering_lower_bound(2, 0.6)
        with pytest.raises(ValueError):
            external_covering_lower_bound(0, 0.3)
