"""Extortion response, stationary optimum, cycle deviation, and k calibration."""

import pytest

from cournotlab.errors import DomainError, NoRealResponse, OutOfBoundsResponse, UnsupportedCycleLength
from cournotlab.extortion import (
    ExtortionConfig,
    _solve_numeric,
    cycle_payoff,
    deviation_curve,
    find_best_cycle,
    max_valid_k,
    response_surface,
    solve_response,
    stationary_best_response,
    stationary_payoff,
)
from cournotlab.market import MarketParams, profit_pair


def cfg(k, clamp="unclamped"):
    return ExtortionConfig(k=k, s_n=40.0, clamp=clamp)


class TestSolveResponse:
    def test_fair_collusion_reproduces_jpm(self):
        assert solve_response(0.1, cfg(1.0)) == pytest.approx(0.1, abs=1e-9)

    def test_mild_extortion_pair(self):
        assert solve_response(0.1, cfg(1.2)) == pytest.approx(0.1093, abs=5e-4)

    def test_experiment_extortion_pair(self):
        assert solve_response(0.1, cfg(1.296)) == pytest.approx(0.1135, abs=5e-4)

    def test_upper_corner_with_zero_discriminant(self):
        # at k=1 the discriminant factors to 4*(x-6)^2, so x=6 touches zero
        assert solve_response(6.0, cfg(1.0)) == pytest.approx(6.0, abs=1e-6)

    def test_nash_is_on_every_response_curve(self):
        for k in (1.0, 1.2, 1.296, 2.0, 3.0):
            assert solve_response(3.0, cfg(k)) == pytest.approx(3.0, abs=1e-9)

    def test_plus_root_is_far_outside_bounds(self):
        y = solve_response(0.1, ExtortionConfig(k=1.0, s_n=40.0, root="plus", clamp="unclamped"))
        assert y == pytest.approx(11.9, abs=1e-3)

    def test_clamp_to_bounds(self):
        # response to large rival quantities exceeds the algorithm interval
        raw = solve_response(6.0, cfg(1.296))
        assert raw > 3.0
        clamped = solve_response(6.0, cfg(1.296, clamp="clamp_to_bounds"))
        assert clamped == 3.0

    def test_error_mode_carries_raw_root(self):
        with pytest.raises(OutOfBoundsResponse) as exc_info:
            solve_response(6.0, cfg(1.296, clamp="error_on_out_of_bounds"))
        assert exc_info.value.raw == pytest.approx(solve_response(6.0, cfg(1.296)))

    def test_rejects_non_positive_rival_quantity(self):
        with pytest.raises(DomainError):
            solve_response(0.0, cfg(1.2))

    def test_k_below_one_rejected(self):
        with pytest.raises(DomainError):
            ExtortionConfig(k=0.5)


class TestExtortionIdentity:
    @pytest.mark.parametrize("k", [1.0, 1.1, 1.296])
    def test_residual_on_grid(self, k):
        params = MarketParams()
        c = cfg(k)
        lo, hi = params.x_bounds
        y_lo, y_hi = params.y_bounds
        checked = 0
        for i in range(1000):
            x = lo + (hi - lo) * i / 999
            y = solve_response(x, c, params)
            if not (y_lo <= y <= y_hi):
                continue
            s_x, s_y = profit_pair(x, y, params, relaxed=True)
            assert abs((s_y - 40.0) - k * (s_x - 40.0)) < 1e-8
            checked += 1
        assert checked > 100

    @pytest.mark.parametrize("k", [1.0, 1.1, 1.2, 1.296])
    def test_closed_form_matches_numeric_root(self, k):
        params = MarketParams()
        c = cfg(k)
        lo, hi = params.x_bounds
        for i in range(60):
            x = lo + (hi - lo) * i / 59
            closed = solve_response(x, c, params)
            numeric = _solve_numeric(x, c, params)
            if k == 1.0 and x == hi:
                # tangent root: the residual only touches zero, which limits
                # any numeric locator to ~1e-6 (same bound the closed-form
                # corner example carries)
                assert abs(closed - numeric) < 1e-6
            else:
                assert abs(closed - numeric) < 1e-8


class TestStationary:
    def test_fair_collusion_payoff(self):
        x_c, payoff = stationary_best_response(cfg(1.0))
        assert x_c == pytest.approx(0.1)
        assert payoff == pytest.approx(69.0, abs=1e-6)

    def test_experiment_parameter_payoff(self):
        x_c, payoff = stationary_best_response(cfg(1.296))
        assert x_c == pytest.approx(0.1)
        assert payoff == pytest.approx(65.203, abs=5e-3)

    def test_heavy_extortion_payoff(self):
        x_c, payoff = stationary_best_response(cfg(3.0))
        assert x_c == pytest.approx(0.1)
        assert payoff == pytest.approx(54.3383, abs=1e-3)

    @pytest.mark.parametrize("k", [1.0, 1.05, 1.15, 1.296])
    def test_optimum_sits_at_lower_bound_in_valid_range(self, k):
        x_c, _ = stationary_best_response(cfg(k))
        assert x_c == pytest.approx(0.1)


class TestCyclePayoff:
    def test_jumping_beats_stationary_at_k3(self):
        assert cycle_payoff([0.1, 0.9], cfg(3.0)) == pytest.approx(59.9146, abs=1e-3)
        assert cycle_payoff([0.1, 0.1], cfg(3.0)) == pytest.approx(54.3383, abs=1e-3)

    def test_constant_cycle_degenerates_to_stationary(self):
        for k in (1.0, 1.2, 3.0):
            for x in (0.1, 0.5, 2.0):
                assert cycle_payoff([x, x], cfg(k)) == pytest.approx(
                    stationary_payoff(x, cfg(k)), abs=1e-12
                )

    def test_rotation_invariance(self):
        c = cfg(1.5)
        xs = [0.2, 1.3, 0.7, 4.1]
        base = cycle_payoff(xs, c)
        for shift in range(1, len(xs)):
            rotated = xs[shift:] + xs[:shift]
            assert cycle_payoff(rotated, c) == pytest.approx(base, abs=1e-12)

    def test_empty_and_out_of_bounds_rejected(self):
        with pytest.raises(DomainError):
            cycle_payoff([], cfg(1.2))
        with pytest.raises(DomainError):
            cycle_payoff([0.05], cfg(1.2))


class TestFindBestCycle:
    def test_period_one_equals_stationary(self):
        ev = find_best_cycle(1, cfg(1.2))
        assert ev.xs == (pytest.approx(0.1),)
        assert ev.mean_payoff == pytest.approx(66.321, abs=5e-3)

    def test_period_two_deviation_at_k3(self):
        ev = find_best_cycle(2, cfg(3.0))
        assert ev.mean_payoff >= 59.9146 - 1e-6
        assert sorted(ev.xs)[0] == pytest.approx(0.1, abs=1e-3)
        assert sorted(ev.xs)[1] == pytest.approx(0.9, abs=0.05)

    def test_period_three_deviation_even_at_fair_collusion(self):
        ev = find_best_cycle(3, cfg(1.0))
        assert ev.mean_payoff > 69.0 + 1e-4

    def test_no_profitable_deviation_below_threshold(self):
        for k in (1.05, 1.15, 1.29):
            _, stationary = stationary_best_response(cfg(k))
            ev = find_best_cycle(2, cfg(k))
            assert ev.mean_payoff <= stationary + 1e-6

    def test_responses_follow_wraparound_convention(self):
        ev = find_best_cycle(2, cfg(3.0))
        assert ev.ys[0] == pytest.approx(solve_response(ev.xs[-1], cfg(3.0)))
        assert ev.ys[1] == pytest.approx(solve_response(ev.xs[0], cfg(3.0)))
        recomputed = cycle_payoff(list(ev.xs), cfg(3.0))
        assert ev.mean_payoff == pytest.approx(recomputed, abs=1e-9)

    def test_unsupported_lengths(self):
        with pytest.raises(UnsupportedCycleLength):
            find_best_cycle(5, cfg(1.2))
        with pytest.raises(DomainError):
            find_best_cycle(0, cfg(1.2))


class TestMaxValidK:
    def test_default_market_threshold(self):
        k_max = max_valid_k()
        assert 1.291 <= k_max <= 1.301

    def test_heavy_extortion_declared_invalid(self):
        k_max = max_valid_k()
        c = cfg(3.0)
        _, stationary = stationary_best_response(c)
        assert find_best_cycle(2, c).mean_payoff > stationary + 1e-9
        assert 3.0 > k_max

    def test_constant_cycle_optimal_just_below_threshold(self):
        k_max = max_valid_k()
        c = cfg(k_max - 0.002)
        ev = find_best_cycle(2, c)
        assert ev.xs[0] == pytest.approx(ev.xs[1], abs=1e-4)

    def test_other_orders_rejected(self):
        with pytest.raises(DomainError):
            max_valid_k(n=3)


class TestPlotTables:
    def test_surface_rows_at_known_points(self):
        rows = dict(response_surface(1.296, 0.01))
        assert rows[0.1] == pytest.approx(0.1135, abs=5e-4)
        fair = dict(response_surface(1.0, 0.01))
        assert fair[0.1] == pytest.approx(0.1, abs=1e-9)

    def test_surface_monotone_in_k_at_collusive_corner(self):
        y_by_k = [dict(response_surface(k, 0.1))[0.1] for k in (1.0, 1.2, 1.296)]
        assert y_by_k[0] < y_by_k[1] < y_by_k[2]

    def test_deviation_curve_branches(self):
        rows = deviation_curve((1.0, 3.0), 0.1, k_step=0.5)
        by_k = {round(k, 3): (x2, payoff) for k, x2, payoff in rows}
        assert by_k[1.0][0] == pytest.approx(0.1, abs=1e-4)
        assert by_k[3.0][0] == pytest.approx(0.9, abs=0.05)
        assert by_k[3.0][1] == pytest.approx(59.9146, abs=1e-2)

    def test_deviation_curve_boundary_matches_stationary(self):
        k_max = max_valid_k()
        (_, _, payoff), = deviation_curve((k_max, k_max), 0.1, k_step=1.0)
        _, stationary = stationary_best_response(cfg(k_max))
        assert payoff == pytest.approx(stationary, abs=1e-3)


class TestCustomPriceFallback:
    def test_numeric_solver_satisfies_identity(self):
        params = MarketParams(
            price_fn=lambda z: 30.0 - 2.0 * z,
            x_bounds=(0.1, 6.0),
            y_bounds=(0.1, 6.0),
        )
        # Nash for this market: q = 10/3, profit = a + (30 - 2*20/3 - 10)*10/3
        q_n = 10.0 / 3.0
        s_n = 10.0 + (30.0 - 2.0 * (2 * q_n) - 10.0) * q_n
        c = ExtortionConfig(k=1.1, s_n=s_n, clamp="unclamped")
        y = solve_response(2.0, c, params)
        s_x, s_y = profit_pair(2.0, y, params, relaxed=True)
        assert abs((s_y - s_n) - 1.1 * (s_x - s_n)) < 1e-8

    def test_no_real_response_raises(self):
        # price pinned at cost: both sides always earn exactly a, so the
        # identity has no solution once k != 1 shifts the target
        params = MarketParams(
            price_fn=lambda z: 10.0,
            x_bounds=(0.1, 6.0),
            y_bounds=(0.1, 6.0),
        )
        c = ExtortionConfig(k=1.5, s_n=40.0, clamp="unclamped")
        with pytest.raises(NoRealResponse):
            solve_response(1.0, c, params)
