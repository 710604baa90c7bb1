"""Game loop: rounding convention, profits from displayed quantities, logging."""

import pytest

from cournotlab.agents import AgentSpec
from cournotlab.engine import (
    GameConfig,
    SessionRecord,
    dump_session,
    load_session,
    replay,
    round_half_up,
    run_session,
    step,
)
from cournotlab.errors import DomainError, LogParseError, RejectedDecision, SessionClosed
from cournotlab.extortion import ExtortionConfig
from cournotlab.market import MarketParams, profit_pair


def fresh_session(**kwargs) -> SessionRecord:
    cfg = GameConfig(**kwargs)
    return SessionRecord(session_id="t", config=cfg, agent="human", seed=0)


def test_round_half_up_convention():
    assert round_half_up(0.115, 2) == 0.12
    assert round_half_up(0.125, 2) == 0.13  # not banker's rounding
    assert round_half_up(0.114999, 2) == 0.11
    assert round_half_up(2.0, 2) == 2.0
    assert round_half_up(0.113514, 2) == 0.11


def test_first_round_responds_to_this_submission():
    s = fresh_session(rounds=5)
    rec = step(s, 3.0)
    assert rec.round == 1
    assert rec.y == 3.0  # response to x=3 is exactly 3 at any k
    assert rec.s_x == rec.s_y == pytest.approx(40.0)


def test_steady_state_matches_display_convention():
    s = fresh_session(rounds=5)
    for _ in range(5):
        rec = step(s, 0.1)
    assert (rec.x, rec.y) == (0.1, 0.11)
    assert rec.s_x == pytest.approx(66.14, abs=0.01)
    assert rec.s_y == pytest.approx(71.75, abs=0.01)
    # profits computed from the stored rounded quantities exactly
    assert (rec.s_x, rec.s_y) == profit_pair(rec.x, rec.y)


def test_profits_use_rounded_not_raw_quantities():
    s = fresh_session(rounds=2)
    rec = step(s, 0.104)  # rounds down to 0.10
    assert rec.x == 0.1
    assert (rec.s_x, rec.s_y) == profit_pair(0.1, rec.y)


def test_cum_is_exact_prefix_sum():
    s = fresh_session(rounds=50)
    for i in range(50):
        step(s, 0.1 + 0.01 * (i % 7))
    acc = 0.0
    for rec in s.rounds_log:
        acc += rec.s_x
        assert rec.cum_x == acc  # bitwise: same summation order


def test_out_of_bounds_rejected_without_consuming_round():
    s = fresh_session(rounds=3)
    step(s, 1.0)
    with pytest.raises(RejectedDecision):
        step(s, 6.5)
    with pytest.raises(RejectedDecision):
        step(s, 0.05)
    assert len(s.rounds_log) == 1
    rec = step(s, 1.0)
    assert rec.round == 2


def test_session_closes_after_final_round():
    s = fresh_session(rounds=2)
    step(s, 1.0)
    step(s, 1.0)
    assert s.status == "finished"
    with pytest.raises(SessionClosed):
        step(s, 1.0)


def test_pinned_algorithm_nash_control():
    cfg = GameConfig(rounds=600, pin_y=3.0)
    session = run_session(cfg, AgentSpec(kind="stationary", params={"x": 3.0}), seed=1)
    assert session.rounds_log[-1].cum_x == 24000.0
    assert all(rec.s_x == 40.0 for rec in session.rounds_log)


def test_fixed_opening_response_option():
    s = fresh_session(rounds=3, first_y=0.5)
    rec = step(s, 3.0)
    assert rec.y == 0.5
    rec2 = step(s, 3.0)
    assert rec2.y == 3.0  # memory-one from round 2 onward


def test_collusive_session_total():
    session = run_session(GameConfig(rounds=600), AgentSpec(kind="collusive"), seed=2)
    assert session.rounds_log[-1].cum_x == pytest.approx(600 * 66.142857, abs=1.0)


def test_stationary_rival_converges_to_rounded_response():
    session = run_session(GameConfig(rounds=4), AgentSpec(kind="stationary", params={"x": 3.0}), seed=0)
    assert all(rec.y == 3.0 for rec in session.rounds_log)


def test_identical_seed_identical_bytes():
    cfg = GameConfig(rounds=40)
    spec = AgentSpec(kind="random_uniform", seed=77)
    a = dump_session(run_session(cfg, spec, seed=77))
    b = dump_session(run_session(cfg, spec, seed=77))
    assert a == b


def test_replay_reproduces_log():
    cfg = GameConfig(rounds=30)
    spec = AgentSpec(kind="epsilon_greedy_learner", params={"horizon": 30}, seed=4)
    session = run_session(cfg, spec, seed=4)
    assert replay(session) == session


def test_serialization_round_trip_is_exact():
    cfg = GameConfig(rounds=25)
    spec = AgentSpec(kind="random_uniform", seed=13)
    session = run_session(cfg, spec, seed=13)
    text = dump_session(session)
    loaded = load_session(text)
    assert loaded == session
    assert dump_session(loaded) == text


def test_loader_reports_corrupt_line_number():
    session = run_session(GameConfig(rounds=3), AgentSpec(kind="collusive"), seed=0)
    lines = dump_session(session).splitlines()
    lines[2] = '{"round": 2, "x": broken'
    with pytest.raises(LogParseError) as exc_info:
        load_session("\n".join(lines) + "\n")
    assert exc_info.value.line_no == 3


def test_loader_tolerates_torn_tail_only_when_asked():
    session = run_session(GameConfig(rounds=3), AgentSpec(kind="collusive"), seed=0)
    text = dump_session(session)
    torn = text[:-20]  # cut into the final line
    with pytest.raises(LogParseError):
        load_session(torn)
    loaded = load_session(torn, tolerate_torn_tail=True)
    assert len(loaded.rounds_log) == 2


def test_config_validation():
    with pytest.raises(DomainError):
        GameConfig(rounds=0)
    with pytest.raises(DomainError):
        GameConfig(pin_y=5.0)  # outside algorithm bounds


def test_custom_price_sessions_cannot_be_serialized():
    cfg = GameConfig(
        market=MarketParams(price_fn=lambda z: 120.0 / z),
        extortion=ExtortionConfig(),
        rounds=2,
    )
    session = run_session(cfg, AgentSpec(kind="stationary", params={"x": 1.0}), seed=0)
    with pytest.raises(DomainError):
        dump_session(session)
