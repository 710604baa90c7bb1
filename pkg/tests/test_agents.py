"""Simulated rival behaviors: determinism, bounds, and kind semantics."""

import pytest

from cournotlab.agents import AgentSpec, decide, validate_spec
from cournotlab.engine import GameConfig, RoundRecord, run_session
from cournotlab.errors import DomainError
from cournotlab.extortion import ExtortionConfig
from cournotlab.market import MarketParams

MARKET = MarketParams()
CFG = ExtortionConfig(k=1.296, s_n=40.0)


def record(round_no, x, y, s_x=50.0, s_y=50.0):
    return RoundRecord(round=round_no, x=x, y=y, s_x=s_x, s_y=s_y, cum_x=s_x * round_no)


def test_stationary_always_plays_its_value():
    spec = AgentSpec(kind="stationary", params={"x": 3.0})
    assert decide(spec, [], MARKET, CFG) == 3.0
    assert decide(spec, [record(1, 3.0, 3.0)], MARKET, CFG) == 3.0


def test_collusive_plays_stationary_optimum_every_round():
    spec = AgentSpec(kind="collusive")
    assert decide(spec, [], MARKET, CFG) == pytest.approx(0.1)
    hist = [record(1, 0.1, 0.11)]
    assert decide(spec, hist, MARKET, CFG) == pytest.approx(0.1)


def test_myopic_best_response_to_last_algorithm_quantity():
    spec = AgentSpec(kind="myopic_best_response")
    assert decide(spec, [record(1, 2.0, 3.0)], MARKET, CFG) == pytest.approx(3.0)
    # opening round: midpoint of the rival interval
    assert decide(spec, [], MARKET, CFG) == pytest.approx(3.05)


def test_cycle_follows_round_parity():
    spec = AgentSpec(kind="cycle", params={"sequence": [0.1, 0.9]})
    hist = []
    for t in range(1, 7):
        x = decide(spec, hist, MARKET, CFG)
        assert x == (0.1 if t % 2 == 1 else 0.9)
        hist.append(record(t, x, 0.11))


def test_random_uniform_is_seeded_and_in_bounds():
    spec = AgentSpec(kind="random_uniform", seed=42)
    hist = [record(1, 3.05, 0.5)]
    draws = {decide(spec, hist, MARKET, CFG) for _ in range(5)}
    assert len(draws) == 1  # same history, same decision
    hist2 = hist + [record(2, 1.0, 0.5)]
    vals = [decide(spec, hist, MARKET, CFG), decide(spec, hist2, MARKET, CFG)]
    assert vals[0] != vals[1]
    for v in vals:
        assert 0.1 <= v <= 6.0


def test_identical_spec_and_history_identical_decision():
    for kind, params in [
        ("stationary", {"x": 1.5}),
        ("collusive", {}),
        ("myopic_best_response", {}),
        ("cycle", {"sequence": [0.3, 0.7, 2.0]}),
        ("random_uniform", {}),
        ("epsilon_greedy_learner", {}),
    ]:
        spec = AgentSpec(kind=kind, params=params, seed=9)
        hist = [record(1, 0.5, 0.6), record(2, 0.7, 0.65)]
        assert decide(spec, hist, MARKET, CFG) == decide(spec, list(hist), MARKET, CFG)


def test_all_decisions_stay_in_bounds_over_a_session():
    for kind, params in [
        ("random_uniform", {}),
        ("epsilon_greedy_learner", {"horizon": 80}),
        ("myopic_best_response", {}),
    ]:
        spec = AgentSpec(kind=kind, params=params, seed=5)
        session = run_session(GameConfig(rounds=80), spec, seed=5)
        for rec in session.rounds_log:
            assert 0.1 <= rec.x <= 6.0


def test_collusive_versus_extorter_reaches_steady_profits():
    session = run_session(GameConfig(rounds=10), AgentSpec(kind="collusive"), seed=0)
    for rec in session.rounds_log[1:]:
        raw = (rec.x, rec.y)
        assert raw == (0.1, 0.11)
    # unrounded steady profits at the collusive corner
    from cournotlab.market import profit_pair
    from cournotlab.extortion import solve_response
    y = solve_response(0.1, ExtortionConfig(k=1.296, s_n=40.0, clamp="unclamped"))
    s_x, s_y = profit_pair(0.1, y, relaxed=True)
    assert s_x == pytest.approx(65.203, abs=5e-3)
    assert s_y == pytest.approx(72.662, abs=5e-3)


def test_learner_visits_arms_then_exploits():
    spec = AgentSpec(kind="epsilon_greedy_learner", params={"horizon": 600}, seed=11)
    session = run_session(GameConfig(rounds=600), spec, seed=11)
    xs = [rec.x for rec in session.rounds_log]
    tail = sorted(xs[-100:])
    median_tail = tail[49:51]
    assert sum(median_tail) / 2 < 0.3


def test_history_must_be_monotone():
    spec = AgentSpec(kind="stationary", params={"x": 1.0})
    bad = [record(2, 1.0, 1.0), record(1, 1.0, 1.0)]
    with pytest.raises(DomainError):
        decide(spec, bad, MARKET, CFG)


def test_validate_spec_rejects_bad_parameters():
    with pytest.raises(DomainError):
        validate_spec(AgentSpec(kind="stationary", params={"x": 9.0}), MARKET)
    with pytest.raises(DomainError):
        validate_spec(AgentSpec(kind="cycle", params={"sequence": []}), MARKET)
    with pytest.raises(DomainError):
        validate_spec(AgentSpec(kind="cycle", params={"sequence": [0.01]}), MARKET)
    with pytest.raises(DomainError):
        AgentSpec(kind="nonsense")
