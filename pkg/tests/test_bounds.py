"""Each inequality against frozen hand-checked values, the iid/general
identity, optimizer guarantees, and the evaluate_all surface."""

from __future__ import annotations

import math

import numpy as np
import pytest

from assocbounds.bounds import (
    BoundResult,
    SkippedBound,
    boppona_spencer,
    boutsikas_koutras,
    entries_to_json,
    evaluate_all,
    independent_lower,
    janson_basic,
    janson_ratio,
    lv_general,
    lv_iid,
    lv_optimal,
    tightest_upper,
)
from assocbounds.family import FamilySummary
from assocbounds.models import (
    FIRST_PRINCIPLES,
    PAPER_AS_PRINTED,
    hypergraph_summary,
    runs_summary,
)
from assocbounds.oracles import runs_zero_exact


def homog(count, p, delta, cov_sum):
    return FamilySummary.homogeneous(count=count, p=p, delta=delta, cov_sum=cov_sum)


class TestJansonBasic:
    def test_empty_family_is_vacuous_one(self):
        r = janson_basic(homog(1, 0.0, 0.0, 0.0))
        assert r.value.linear == 1.0
        assert r.vacuous

    def test_unit_lambda(self):
        r = janson_basic(homog(10, 0.1, 0.0, 0.0))
        assert r.value.linear == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_runs_instance(self):
        r = janson_basic(runs_summary(10, 2, 0.5, PAPER_AS_PRINTED))
        assert r.value.log_value == pytest.approx(-1.875, rel=1e-14)
        assert r.value.linear == pytest.approx(0.15335496684492846, rel=1e-12)


class TestJansonRatio:
    def test_forms_agree_at_unit_delta_bar(self):
        s = homog(10, 0.1, 0.0, 0.0)  # lambda=1, delta_bar=1
        printed = janson_ratio(s, form="printed")
        standard = janson_ratio(s, form="standard")
        assert printed.value.linear == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert standard.value.linear == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_forms_diverge_at_lambda_four(self):
        s = homog(40, 0.1, 0.0, 0.0)  # lambda=4, delta_bar=4
        assert janson_ratio(s, form="printed").value.log_value == pytest.approx(-0.25)
        assert janson_ratio(s, form="standard").value.log_value == pytest.approx(-4.0)

    def test_zero_delta_bar_rejected(self):
        with pytest.raises(ValueError, match="delta_bar"):
            janson_ratio(homog(10, 0.0, 0.0, 0.0))

    def test_printed_form_is_not_an_upper_bound(self):
        # documents the defect in the printed exponent: at small lambda the
        # printed value collapses below the true probability, while the
        # standard form stays above it
        s = runs_summary(20, 4, 0.05, FIRST_PRINCIPLES)
        truth = runs_zero_exact(20, 4, 0.05).linear
        printed = janson_ratio(s, form="printed").value.linear
        standard = janson_ratio(s, form="standard").value.linear
        assert printed < truth - 1e-9
        assert standard >= truth - 1e-9


class TestBopponaSpencer:
    def test_zero_delta_reduces_to_independent_product(self):
        s = homog(12, 0.3, 0.0, 0.0)
        bs = boppona_spencer(s).value.log_value
        lower = independent_lower(s).value.log_value
        assert bs == pytest.approx(lower, rel=1e-12)

    def test_runs_instance(self):
        r = boppona_spencer(runs_summary(10, 2, 0.5, PAPER_AS_PRINTED))
        assert r.value.linear == pytest.approx(0.12957603967793504, rel=1e-12)

    def test_certain_indicator_rejected(self):
        with pytest.raises(ValueError, match="max mean"):
            boppona_spencer(homog(5, 1.0, 0.0, 0.0))


class TestBoutsikasKoutras:
    def test_zero_cov_reduces_to_product(self):
        s = homog(7, 0.2, 0.1, 0.0)
        r = boutsikas_koutras(s)
        assert r.value.linear == pytest.approx(0.8**7, rel=1e-12)

    def test_frozen_example(self):
        r = boutsikas_koutras(homog(10, 0.1, 0.1, 0.05))
        assert r.value.linear == pytest.approx(0.3986784401, rel=1e-12)

    def test_large_cov_vacuous(self):
        r = boutsikas_koutras(homog(10, 0.1, 1.5, 1.2))
        assert r.vacuous

    def test_negative_cov_rejected(self):
        with pytest.raises(ValueError, match="associat"):
            boutsikas_koutras(homog(10, 0.1, 0.1, -0.01))


class TestLvBounds:
    def test_frozen_example_both_forms(self):
        s = homog(10, 0.25, 1.25, 0.625)
        g = lv_general(s, 1.0)
        i = lv_iid(s, 1.0)
        assert g.value.linear == pytest.approx(0.8040463429350806, rel=1e-12)
        assert i.value.log_value == g.value.log_value
        assert g.t == 1.0

    def test_independent_limit_large_t(self):
        s = homog(10, 0.3, 0.0, 0.0)
        r = lv_general(s, 50.0)
        assert r.value.log_value == pytest.approx(10 * math.log(0.7), rel=1e-6)

    def test_tiny_t_approaches_one(self):
        s = homog(10, 0.3, 0.0, 0.0)
        r = lv_general(s, 1e-9)
        assert r.value.log_value == pytest.approx(0.0, abs=1e-8)
        assert not r.vacuous  # just below 1 from the product side

    def test_p_zero_is_one_plus_cov_term(self):
        r = lv_iid(homog(10, 0.0, 0.5, 0.5), 2.0)
        assert r.value.linear == pytest.approx(1.0 + 4.0 * 0.5, rel=1e-12)
        assert r.vacuous

    def test_heterogeneous_general_vs_manual(self):
        s = FamilySummary.heterogeneous([0.1, 0.2, 0.4], delta=0.05, cov_sum=0.01)
        t = 1.7
        expected = math.fsum(
            math.log(1 - p + p * math.exp(-t)) for p in (0.1, 0.2, 0.4)
        )
        expected = math.log(math.exp(expected) + t * t * 0.01)
        assert lv_general(s, t).value.log_value == pytest.approx(expected, rel=1e-12)

    def test_iid_requires_homogeneous(self):
        s = FamilySummary.heterogeneous([0.1, 0.2], delta=0.0, cov_sum=0.0)
        with pytest.raises(ValueError, match="homogeneous"):
            lv_iid(s, 1.0)

    def test_iid_rejects_certain_indicator(self):
        with pytest.raises(ValueError, match="p < 1"):
            lv_iid(homog(3, 1.0, 0.0, 0.0), 1.0)

    def test_nonpositive_t_rejected(self):
        s = homog(3, 0.1, 0.0, 0.0)
        for bad in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError):
                lv_general(s, bad)
        with pytest.raises(ValueError):
            lv_general(s)  # neither t nor log_t

    def test_log_form_override_matches_linear_t(self):
        s = homog(10, 0.25, 1.25, 0.625)
        via_t = lv_general(s, 1e-4)
        via_log = lv_general(s, log_t=math.log(1e-4))
        assert via_log.value.log_value == pytest.approx(
            via_t.value.log_value, rel=1e-12
        )

    def test_log_form_reaches_subnormal_exponents(self):
        # t = e^{-1000} underflows in linear form; the covariance term keeps
        # its exact exponent 2*(-1000) + ln(cov), and the product term
        # saturates to exactly 1
        s = homog(10, 0.25, 1.25, 0.625)
        r = lv_general(s, log_t=-1000.0)
        assert r.t == 0.0 and r.log_t == -1000.0
        assert r.value.log_value == 0.0

    def test_smallest_linear_t_stays_below_one(self):
        # t = 1e-300 is representable: the product term keeps its tiny
        # negative log and the bound stays (barely) non-vacuous
        s = homog(10, 0.25, 1.25, 0.625)
        r = lv_general(s, 1e-300)
        assert r.value.log_value < 0.0
        assert not r.vacuous

    def test_identity_on_random_homogeneous_summaries(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            p = rng.uniform(0.001, 0.99)
            count = int(rng.integers(1, 500))
            cov = rng.uniform(0.0, 2.0)
            delta = cov * (1.0 + rng.uniform(0.0, 1.0)) + 1e-6
            t = math.exp(rng.uniform(math.log(1e-6), math.log(50.0)))
            s = homog(count, p, delta, cov)
            a = lv_general(s, t).value.log_value
            b = lv_iid(s, t).value.log_value
            assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1e-300)

    def test_product_term_nonincreasing_in_t(self):
        s = homog(40, 0.15, 0.0, 0.0)  # cov 0 isolates the product term
        ts = np.exp(np.linspace(math.log(1e-6), math.log(50.0), 80))
        values = [lv_general(s, float(t)).value.log_value for t in ts]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestLvOptimal:
    def test_zero_cov_recovers_independent_product(self):
        s = homog(25, 0.2, 0.0, 0.0)
        r = lv_optimal(s)
        target = 25 * math.log(0.8)
        assert r.value.log_value == pytest.approx(target, rel=1e-6)
        assert r.t > 40.0  # pushed to the grid cap

    def test_never_exceeds_any_grid_point(self):
        s = runs_summary(10, 2, 0.5, FIRST_PRINCIPLES)
        r = lv_optimal(s)
        grid = np.exp(np.linspace(math.log(1e-12), math.log(50.0), 200))
        for t in grid:
            assert r.value.log_value <= lv_general(s, float(t)).value.log_value + 1e-15

    def test_below_sanity_grid(self):
        s = runs_summary(12, 3, 0.4, FIRST_PRINCIPLES)
        r = lv_optimal(s)
        for t in (0.01, 0.1, 1.0, 10.0):
            assert r.value.log_value <= lv_general(s, t).value.log_value + 1e-15

    def test_negative_cov_rejected(self):
        s = hypergraph_summary(6, 2, 16)
        assert s.cov_sum < 0
        with pytest.raises(ValueError, match="associat"):
            lv_optimal(s)


class TestIndependentLower:
    def test_frozen_product(self):
        r = independent_lower(homog(10, 0.1, 0.0, 0.0))
        assert r.value.linear == pytest.approx(0.3486784401, rel=1e-13)

    def test_p_zero_gives_one(self):
        assert independent_lower(homog(4, 0.0, 0.0, 0.0)).value.linear == 1.0

    def test_certain_indicator_gives_zero(self):
        s = FamilySummary.heterogeneous([0.2, 1.0], delta=0.0, cov_sum=0.0)
        assert independent_lower(s).value.is_zero


class TestEvaluateAll:
    def test_runs_instance_yields_seven_results(self):
        entries = evaluate_all(runs_summary(10, 2, 0.5))
        assert len(entries) == 7
        assert all(isinstance(e, BoundResult) for e in entries)
        assert [e.method for e in entries] == [
            "janson-basic",
            "janson-ratio",
            "boppona-spencer",
            "boutsikas-koutras",
            "lv-iid",
            "lv-optimal",
            "independent-lower",
        ]

    def test_explicit_t_adds_lv_general(self):
        entries = evaluate_all(runs_summary(10, 2, 0.5), t=0.7)
        methods = [e.method for e in entries]
        assert "lv-general" in methods
        by = {e.method: e for e in entries}
        assert by["lv-general"].t == 0.7
        assert by["lv-iid"].t == 0.7
        assert by["lv-optimal"].t != 0.7

    def test_certain_indicator_skips_boppona_spencer(self):
        entries = evaluate_all(homog(3, 1.0, 0.0, 0.0))
        by = {e.method: e for e in entries}
        assert isinstance(by["boppona-spencer"], SkippedBound)
        assert "max mean" in by["boppona-spencer"].reason

    def test_zero_cov_all_present_and_lv_near_product(self):
        s = homog(12, 0.2, 0.0, 0.0)
        entries = evaluate_all(s)
        assert all(isinstance(e, BoundResult) for e in entries)
        by = {e.method: e for e in entries}
        assert by["lv-optimal"].value.log_value == pytest.approx(
            by["independent-lower"].value.log_value, rel=1e-6
        )

    def test_heterogeneous_skips_lv_iid(self):
        s = FamilySummary.heterogeneous([0.1, 0.3], delta=0.02, cov_sum=0.01)
        by = {e.method: e for e in evaluate_all(s)}
        assert isinstance(by["lv-iid"], SkippedBound)
        assert isinstance(by["lv-optimal"], BoundResult)

    def test_negative_cov_skips_additive_bounds_only(self):
        s = hypergraph_summary(6, 2, 16)
        by = {e.method: e for e in evaluate_all(s)}
        for method in ("boutsikas-koutras", "lv-iid", "lv-optimal"):
            assert isinstance(by[method], SkippedBound)
        for method in ("janson-basic", "janson-ratio", "boppona-spencer",
                       "independent-lower"):
            assert isinstance(by[method], BoundResult)

    def test_json_shape(self):
        rows = entries_to_json(evaluate_all(runs_summary(10, 2, 0.5)))
        for row in rows:
            assert {"method", "log_value", "value", "t", "vacuous",
                    "skipped_reason"} <= set(row)

    def test_tightest_upper_excludes_lower_and_vacuous(self):
        s = runs_summary(10, 2, 0.5)
        entries = evaluate_all(s)
        best = tightest_upper(entries)
        assert best is not None and best.method != "independent-lower"
        assert not best.vacuous
        all_vacuous = evaluate_all(homog(2, 0.0, 0.0, 0.0))
        assert tightest_upper(all_vacuous) is None


class TestDominationSpotChecks:
    """Bounds against the exact oracle on one associated-family instance."""

    @pytest.mark.parametrize("variant", [FIRST_PRINCIPLES, PAPER_AS_PRINTED])
    def test_runs_bounds_bracket_truth(self, variant):
        s = runs_summary(10, 2, 0.5, variant)
        truth = runs_zero_exact(10, 2, 0.5).linear
        entries = evaluate_all(s, eq2_form="standard")
        for e in entries:
            assert isinstance(e, BoundResult)
            if e.method == "independent-lower":
                assert e.value.linear <= truth + 1e-9
            elif not e.vacuous:
                assert e.value.linear >= truth - 1e-9
