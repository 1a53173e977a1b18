import numpy as np
import pytest

from sparselab.grid import DyadicCube, GridWindow, Signal
from sparselab.weights import (
    Weight,
    ap_characteristic,
    check_ww_conditions,
    default_family,
    dual_weight,
    power_weight,
    reverse_holder_scan,
    rh_characteristic,
    single_scale_sparse_bound,
    weighted_lp_norm,
)


def _brute_force_ap(w: Weight, p: float, family) -> float:
    best = 0.0
    for q in family:
        lo, hi = q.interval()
        vals = w.values[lo - w.window.lo : hi - w.window.lo]
        best = max(best, np.mean(vals) * np.mean(vals ** (1.0 / (1.0 - p))) ** (p - 1))
    return best


def _brute_force_rh(w: Weight, r: float, family) -> float:
    best = 0.0
    for q in family:
        lo, hi = q.interval()
        vals = w.values[lo - w.window.lo : hi - w.window.lo]
        best = max(best, np.mean(vals**r) ** (1.0 / r) / np.mean(vals))
    return best


class TestApCharacteristic:
    def test_constant_weight_is_one(self):
        w = Weight(GridWindow(-16, 16), np.ones(32))
        family = default_family(w.window)
        assert ap_characteristic(w, 2.0, family) == pytest.approx(1.0, abs=1e-12)

    def test_two_point_cube_formula(self):
        # w = (1, t) on a two-point window, p = 2: A_2 value ((1+t)/2)((1+1/t)/2)
        t = 3.7
        window = GridWindow(0, 2)
        w = Weight(window, np.array([1.0, t]))
        two_point = [q for q in default_family(window) if q.side == 2]
        assert two_point
        expected = ((1 + t) / 2) * ((1 + 1 / t) / 2)
        assert ap_characteristic(w, 2.0, two_point) == pytest.approx(expected, abs=1e-12)

    def test_matches_brute_force_on_power_weight(self):
        window = GridWindow(-256, 257)
        w = power_weight(0.5, window)
        family = default_family(window)
        fast = ap_characteristic(w, 2.0, family)
        slow = _brute_force_ap(w, 2.0, family)
        assert fast == pytest.approx(slow, abs=1e-10)

    def test_monotone_in_q(self):
        # A_q characteristics decrease in q on random weights
        rng = np.random.default_rng(0)
        window = GridWindow(0, 64)
        family = default_family(window)
        for _ in range(100):
            w = Weight(window, rng.lognormal(0.0, 1.0, size=64))
            chars = [ap_characteristic(w, q, family) for q in (1.5, 2.0, 3.0, 5.0)]
            assert all(a >= b - 1e-10 for a, b in zip(chars, chars[1:]))

    def test_report_carries_argmax_cube(self):
        window = GridWindow(-32, 33)
        w = power_weight(1.0, window)
        family = default_family(window)
        rep = ap_characteristic(w, 2.0, family, report=True)
        assert rep.value == pytest.approx(ap_characteristic(w, 2.0, family))
        assert rep.argmax_cube in family
        assert rep.to_json()["characteristic"] == "A_p"

    def test_growth_detects_out_of_class_weight(self):
        # a = 1/2 stays A_2-stable as the window grows; a = 1.5 does not
        def char(a, n):
            window = GridWindow(-n, n + 1)
            return ap_characteristic(power_weight(a, window), 2.0, default_family(window))

        stable = [char(0.5, 1 << e) for e in (8, 10, 12)]
        growing = [char(1.5, 1 << e) for e in (8, 10, 12)]
        assert stable[-1] / stable[0] < 1.5
        assert growing[-1] / growing[0] > 2.0

    def test_rejects_p_at_most_one(self):
        w = Weight(GridWindow(0, 4), np.ones(4))
        with pytest.raises(ValueError):
            ap_characteristic(w, 1.0, default_family(w.window))


class TestRhCharacteristic:
    def test_constant_weight_is_one(self):
        w = Weight(GridWindow(0, 32), np.ones(32))
        assert rh_characteristic(w, 2.0, default_family(w.window)) == pytest.approx(1.0)

    def test_single_point_cubes_give_one(self):
        rng = np.random.default_rng(1)
        window = GridWindow(0, 16)
        w = Weight(window, rng.lognormal(size=16))
        points = [q for q in default_family(window) if q.side == 1]
        assert rh_characteristic(w, 3.0, points) == pytest.approx(1.0, abs=1e-12)

    def test_matches_brute_force(self):
        window = GridWindow(-128, 129)
        w = power_weight(0.75, window)
        family = default_family(window)
        fast = rh_characteristic(w, 1.5, family)
        slow = _brute_force_rh(w, 1.5, family)
        assert fast == pytest.approx(slow, abs=1e-10)

    def test_scan_finds_moderate_exponent(self):
        window = GridWindow(-64, 65)
        w = power_weight(0.5, window)
        r = reverse_holder_scan(w, default_family(window))
        assert r > 1.0
        assert rh_characteristic(w, r, default_family(window)) <= 4.0


class TestDualWeight:
    def test_p_two_gives_reciprocal(self):
        rng = np.random.default_rng(2)
        w = Weight(GridWindow(0, 8), rng.lognormal(size=8))
        sigma = dual_weight(w, 2.0)
        np.testing.assert_allclose(sigma.values, 1.0 / w.values, atol=1e-12)

    def test_involution(self):
        rng = np.random.default_rng(3)
        w = Weight(GridWindow(0, 8), rng.lognormal(size=8))
        p = 2.7
        pprime = p / (p - 1)
        back = dual_weight(dual_weight(w, p), pprime)
        np.testing.assert_allclose(back.values, w.values, rtol=1e-12)

    def test_duality_identity_for_characteristics(self):
        # [sigma]_{A_{p'}} = [w]_{A_p}^{p'-1} cube by cube, so also for sups
        window = GridWindow(-64, 65)
        w = power_weight(0.5, window)
        family = default_family(window)
        p = 2.5
        pprime = p / (p - 1)
        lhs = ap_characteristic(dual_weight(w, p), pprime, family)
        rhs = ap_characteristic(w, p, family) ** (pprime - 1)
        assert lhs == pytest.approx(rhs, abs=1e-10)


class TestPowerWeight:
    def test_zero_exponent_is_constant(self):
        w = power_weight(0.0, GridWindow(-5, 6))
        np.testing.assert_array_equal(w.values, np.ones(11))

    def test_pointwise_value(self):
        w = power_weight(1.0, GridWindow(-5, 6))
        assert w.values[3 - (-5)] == 4.0  # (1 + |3|)


class TestCheckWWConditions:
    def test_constant_weight_all_ones(self):
        window = GridWindow(-32, 33)
        w = Weight(window, np.ones(65))
        rep = check_ww_conditions(w, 2.0, 0.5, 1.6)
        for val in (rep.ap_power, rep.ap_dual_route, rep.ap, rep.rh_w, rep.rh_sigma):
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_rejects_out_of_range_parameters(self):
        w = Weight(GridWindow(0, 8), np.ones(8))
        with pytest.raises(ValueError):
            check_ww_conditions(w, 2.0, 1.2, 1.6)
        with pytest.raises(ValueError):
            check_ww_conditions(w, 1.1, 0.5, 1.6)
        with pytest.raises(ValueError):
            check_ww_conditions(w, 2.0, 0.5, 1.2)

    def test_power_condition_trend_tracks_membership(self):
        # the power-characteristic route and the plain A_p route grow together
        # for an out-of-class weight and are jointly stable for an in-class one
        alpha, p, r = 0.5, 2.0, 1.6

        def route_values(a, n):
            window = GridWindow(-n, n + 1)
            rep = check_ww_conditions(power_weight(a, window), p, alpha, r)
            return rep.ap_power, rep.ap

        small = route_values(0.2, 1 << 8)
        big = route_values(0.2, 1 << 11)
        assert big[0] / small[0] < 1.5 and big[1] / small[1] < 1.5
        small_bad = route_values(1.4, 1 << 8)
        big_bad = route_values(1.4, 1 << 11)
        assert big_bad[0] / small_bad[0] > 2.0 and big_bad[1] / small_bad[1] > 1.5


class TestWeightedLpNorm:
    def test_constant_weight_is_plain_norm(self):
        rng = np.random.default_rng(4)
        window = GridWindow(-16, 16)
        w = Weight(window, np.ones(32))
        f = Signal(-8, rng.standard_normal(16))
        assert weighted_lp_norm(f, w, 2.0) == pytest.approx(np.linalg.norm(f.values))

    def test_delta_picks_up_weight_value(self):
        window = GridWindow(-4, 5)
        w = power_weight(1.0, window)
        assert weighted_lp_norm(Signal.delta(2), w, 3.0) == pytest.approx(3.0 ** (1 / 3))

    def test_support_outside_window_rejected(self):
        w = Weight(GridWindow(0, 4), np.ones(4))
        with pytest.raises(ValueError):
            weighted_lp_norm(Signal.delta(10), w, 2.0)

    def test_hoelder_duality(self):
        # sum |f| |g| sigma^{1/p} w^{1/p'} <= ||f||_{L^p(sigma)} ||g||_{L^{p'}(w)}
        rng = np.random.default_rng(5)
        window = GridWindow(-32, 33)
        w = power_weight(0.5, window)
        p = 2.5
        pprime = p / (p - 1)
        sigma = dual_weight(w, p)
        for _ in range(50):
            f = Signal(-16, rng.standard_normal(32))
            g = Signal(-16, rng.standard_normal(32))
            fv = np.abs(f.window_values(window.lo, window.hi))
            gv = np.abs(g.window_values(window.lo, window.hi))
            lhs = np.sum(fv * gv * sigma.values ** (1 / p) * w.values ** (1 / pprime))
            rhs = weighted_lp_norm(f, sigma, p) * weighted_lp_norm(g, w, pprime)
            assert lhs <= rhs + 1e-9


class TestSingleScaleSparseBound:
    def test_flat_pair_on_one_cube(self):
        window = GridWindow(-64, 65)
        w = Weight(window, np.ones(129))
        q = DyadicCube(3, 3, 0)
        lo, hi = q.interval()
        f = Signal(lo, np.ones(hi - lo))
        rep = single_scale_sparse_bound(f, f, w, 2.0, 1.25, 3)
        assert rep.ratio <= 1.0
        assert rep.lhs > 0

    def test_ratio_bounded_for_random_pairs(self):
        rng = np.random.default_rng(6)
        window = GridWindow(-128, 129)
        w = power_weight(0.5, window)
        family = default_family(window)
        sup = 0.0
        for _ in range(50):
            f = Signal(-32, rng.standard_normal(64))
            g = Signal(-32, rng.standard_normal(64))
            rep = single_scale_sparse_bound(f, g, w, 2.0, 1.25, 5, family=family)
            sup = max(sup, rep.ratio)
        assert sup <= 4.0

    def test_exponent_window_enforced(self):
        window = GridWindow(0, 16)
        w = Weight(window, np.ones(16))
        f = Signal(4, np.ones(4))
        with pytest.raises(ValueError):
            single_scale_sparse_bound(f, f, w, 10.0, 1.25, 2)
