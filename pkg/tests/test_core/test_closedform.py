import math

import pytest

from core.closedform import (
    OutageCurvePoint,
    exact_direct_outage,
    first_order_outage,
    first_order_outage_raw,
    fit_diversity_order,
    select_resolved_tail,
    sum_outage_capacity,
    theorem1_outage,
    theorem1_outage_raw,
)
from core.model import PowerAllocation, Scheme, power_from_snr_db
from infra.error_handler import ModelError


class TestTheorem1:
    def test_single_relay_hand_value(self, make_topology):
        topo = make_topology(1)
        power = PowerAllocation(p_source=100.0, p_relay=(100.0,))
        # t = 3, zeta = 0.01 on every link: 3^2/2 * 0.01 * (0.01 + 0.01)
        assert theorem1_outage(topo, power, 1.0) == pytest.approx(9e-4)

    def test_later_relays_contribute_only_relay_to_destination(self, make_topology):
        base = make_topology(2)
        weak = make_topology(2, overrides={"s->2": 0.01})
        power = PowerAllocation(p_source=1e3, p_relay=(1e3, 1e3))
        assert theorem1_outage_raw(weak, power, 1.0) == pytest.approx(theorem1_outage_raw(base, power, 1.0))

    def test_clamped_to_one(self, make_topology):
        topo = make_topology(2, m=4)
        power = power_from_snr_db(0.0, 2, 4)
        assert theorem1_outage_raw(topo, power, 1.0) > 1.0
        assert theorem1_outage(topo, power, 1.0) == 1.0

    def test_needs_a_relay(self, make_topology):
        with pytest.raises(ModelError):
            theorem1_outage(make_topology(0), PowerAllocation(p_source=1.0), 1.0)

    def test_decreases_with_order_k_plus_one(self, make_topology):
        topo = make_topology(2, m=2)
        low = theorem1_outage_raw(topo, power_from_snr_db(30.0, 2, 2), 1.0)
        high = theorem1_outage_raw(topo, power_from_snr_db(40.0, 2, 2), 1.0)
        assert low / high == pytest.approx(1000.0)


class TestFirstOrder:
    def test_matches_theorem1_with_one_relay_and_symbol(self, make_topology):
        topo = make_topology(1, overrides={"s->1": 2.0, "1->d": 0.5})
        power = power_from_snr_db(25.0, 1, 1)
        assert first_order_outage_raw(topo, power, Scheme.STNC_OHAF, 1.0) == pytest.approx(
            theorem1_outage_raw(topo, power, 1.0)
        )

    def test_power_split_inflation(self, make_topology):
        topo = make_topology(1, m=3)
        power = power_from_snr_db(30.0, 1, 3)
        ratio = first_order_outage_raw(topo, power, Scheme.STNC_OHAF, 1.0) / theorem1_outage_raw(topo, power, 1.0)
        assert ratio == pytest.approx(3.0)

    @pytest.mark.parametrize("m, expected", [(1, 4.0 / 3.0), (2, 52.0 / 9.0)])
    def test_both_relays_blocked_at_source(self, make_topology, two_relay_variances, m, expected):
        # zeta_s1*zeta_s2 / ((zeta_1d + zeta_s1) * zeta_2d) = 2/3 on these variances
        topo = make_topology(2, m=m, overrides=two_relay_variances)
        power = power_from_snr_db(30.0, 2, m)
        ratio = first_order_outage_raw(topo, power, Scheme.STNC_OHAF, 1.0) / theorem1_outage_raw(topo, power, 1.0)
        assert ratio == pytest.approx(expected)

    def test_single_relay_schemes_agree(self, make_topology):
        topo = make_topology(1, m=2, overrides={"s->d": 3.0})
        power = power_from_snr_db(20.0, 1, 2)
        assert first_order_outage_raw(topo, power, Scheme.STNC_OHAF, 1.0) == pytest.approx(
            first_order_outage_raw(topo, power, Scheme.STNC_AF, 1.0)
        )

    def test_direct_link_is_linear_term(self, make_topology):
        power = PowerAllocation(p_source=100.0)
        assert first_order_outage_raw(make_topology(0, m=2), power, Scheme.STNC_AF, 1.0) == pytest.approx(0.03)

    def test_af_pays_for_missing_overhearing(self, make_topology):
        topo = make_topology(3, m=2)
        power = power_from_snr_db(30.0, 3, 2)
        assert first_order_outage(topo, power, Scheme.STNC_AF, 1.0) > first_order_outage(
            topo, power, Scheme.STNC_OHAF, 1.0
        )


class TestDirectAndCapacity:
    def test_exact_direct_outage(self):
        assert exact_direct_outage(0.1, 1.0) == pytest.approx(1.0 - math.exp(-0.1))

    def test_exact_direct_outage_rejects_bad_input(self):
        with pytest.raises(ModelError):
            exact_direct_outage(0.0, 1.0)

    def test_sum_outage_capacity(self):
        assert sum_outage_capacity(0.25, 4, bandwidth=2.0, rate=1.5) == pytest.approx(9.0)
        assert sum_outage_capacity(1.0, 7) == 0.0

    def test_sum_outage_capacity_rejects_probability_outside_unit_interval(self):
        with pytest.raises(ModelError):
            sum_outage_capacity(1.2, 2)

    @pytest.mark.parametrize("k", [2, 3])
    def test_closed_form_capacity_peaks_at_interior_m(self, make_topology, k):
        capacities = []
        for m in range(1, 11):
            topo = make_topology(k, m=m)
            power = power_from_snr_db(25.0, k, m)
            capacities.append(sum_outage_capacity(theorem1_outage(topo, power, 1.0), m))
        best = max(range(10), key=lambda i: capacities[i])
        assert best + 1 == 3
        assert all(b <= a for a, b in zip(capacities[best:], capacities[best + 1 :]))
        assert capacities[0] == pytest.approx(1.0, abs=1e-3)


class TestDiversityFit:
    def test_exact_power_law(self):
        points = [OutageCurvePoint(snr, 10 ** (-3 * snr / 10.0)) for snr in (10.0, 15.0, 20.0, 25.0)]
        assert fit_diversity_order(points) == pytest.approx(3.0)

    def test_zero_points_are_dropped(self):
        points = [OutageCurvePoint(snr, 10 ** (-2 * snr / 10.0)) for snr in (10.0, 20.0, 30.0)]
        points.append(OutageCurvePoint(40.0, 0.0))
        assert fit_diversity_order(points) == pytest.approx(2.0)

    def test_needs_three_points(self):
        with pytest.raises(ModelError):
            fit_diversity_order([OutageCurvePoint(10.0, 0.1), OutageCurvePoint(20.0, 0.01)])

    def test_needs_increasing_snr(self):
        points = [OutageCurvePoint(s, p) for s, p in ((10.0, 0.1), (5.0, 0.01), (20.0, 0.001))]
        with pytest.raises(ModelError):
            fit_diversity_order(points)

    def test_point_rejects_bad_probability(self):
        with pytest.raises(ModelError):
            OutageCurvePoint(10.0, 1.5)


def test_select_resolved_tail_keeps_contiguous_high_snr_run():
    points = [
        OutageCurvePoint(10.0, 1e-1, 0.09, 0.11),
        OutageCurvePoint(20.0, 1e-2, 0.0, 0.05),
        OutageCurvePoint(30.0, 1e-3, 0.0009, 0.0011),
        OutageCurvePoint(40.0, 1e-4, 0.00009, 0.00011),
        OutageCurvePoint(50.0, 0.0, 0.0, 1e-6),
    ]
    tail = select_resolved_tail(points)
    assert [p.snr_db for p in tail] == [30.0, 40.0]


def test_exact_direct_outage_examples():
    assert exact_direct_outage(1.0, 0.0) == 0.0
    assert exact_direct_outage(1.0, math.log(2.0)) == pytest.approx(0.5)


def test_capacity_examples():
    assert sum_outage_capacity(0.0, 4) == 4.0
    assert sum_outage_capacity(0.25, 3) == pytest.approx(2.25)


def test_direct_link_tail_has_unit_slope():
    points = [
        OutageCurvePoint(snr, exact_direct_outage(10 ** (-snr / 10.0), 1.0)) for snr in (30.0, 35.0, 40.0, 45.0)
    ]
    assert fit_diversity_order(points) == pytest.approx(1.0, abs=1e-3)


def test_homogeneity_in_power(make_topology):
    topo = make_topology(3, m=2, variance=2.0)
    power = PowerAllocation(p_source=10.0, p_relay=(20.0, 30.0, 40.0))
    doubled = PowerAllocation(p_source=20.0, p_relay=(40.0, 60.0, 80.0))
    assert theorem1_outage_raw(topo, power, 1.0) / theorem1_outage_raw(topo, doubled, 1.0) == pytest.approx(16.0)
