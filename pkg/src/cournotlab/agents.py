"""Simulated rivals standing in for human subjects.

Each agent is a pure function of (spec, history): identical inputs produce
identical decisions, so sessions replay exactly. None of these model human
cognition; the learner exists only to reproduce the qualitative session shape
of quantities declining toward the collusive corner.
"""

import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError
from .extortion import ExtortionConfig, stationary_best_response
from .market import MarketParams, best_response

AGENT_KINDS = (
    "stationary",
    "collusive",
    "myopic_best_response",
    "cycle",
    "random_uniform",
    "epsilon_greedy_learner",
)

LEARNER_ARM_COUNT = 60


@dataclass(frozen=True)
class AgentSpec:
    """Declarative description of a simulated rival.

    params by kind:
      stationary: {"x": quantity}
      cycle: {"sequence": [q, q, ...]}
      epsilon_greedy_learner: {"epsilon_start", "epsilon_end", "horizon"} (optional)
      collusive / myopic_best_response / random_uniform: none
    """

    kind: str
    params: Mapping = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise DomainError(f"unknown agent kind {self.kind!r}")


def validate_spec(spec: AgentSpec, market: MarketParams) -> None:
    """Reject specs that could ever produce an out-of-bounds quantity."""
    lo, hi = market.x_bounds
    if spec.kind == "stationary":
        x = spec.params.get("x")
        if x is None or not (lo <= x <= hi):
            raise DomainError(f"stationary agent needs x within {market.x_bounds}")
    elif spec.kind == "cycle":
        seq = spec.params.get("sequence")
        if not seq:
            raise DomainError("cycle agent needs a non-empty sequence")
        for q in seq:
            if not (lo <= q <= hi):
                raise DomainError(f"cycle value {q} outside rival bounds {market.x_bounds}")


def _check_history(history) -> None:
    prev = 0
    for rec in history:
        if rec.round <= prev:
            raise DomainError("history round numbers must be strictly increasing")
        prev = rec.round


def _round_rng(seed: int, round_no: int) -> random.Random:
    # string-seeded so each round draws from an independent, reproducible stream
    return random.Random(f"{seed}:{round_no}")


def _learner_arms() -> list[float]:
    # 0.1, 0.2, ..., 6.0 -- exactly the 2-decimal grid the engine stores
    return [(i + 1) / 10 for i in range(LEARNER_ARM_COUNT)]


def _arm_index(arms: list[float], x: float) -> int | None:
    idx = int(round((x - arms[0]) * 10))
    if 0 <= idx < len(arms) and abs(arms[idx] - x) < 1e-9:
        return idx
    return None


def _learner_decide(spec: AgentSpec, history, market: MarketParams) -> float:
    arms = _learner_arms()
    eps_start = spec.params.get("epsilon_start", 0.3)
    eps_end = spec.params.get("epsilon_end", 0.01)
    horizon = spec.params.get("horizon", 600)
    round_no = len(history) + 1

    # The response answers the previous round, so a round's payoff describes
    # an arm only when that arm was also the previous play. Anything else is a
    # transition artifact and would systematically bias the estimates.
    sums = [0.0] * len(arms)
    counts = [0] * len(arms)
    for prev, rec in zip(history, history[1:]):
        if prev.x != rec.x:
            continue
        idx = _arm_index(arms, rec.x)
        if idx is not None:
            sums[idx] += rec.s_x
            counts[idx] += 1

    rng = _round_rng(spec.seed, round_no)
    frac = min(max((round_no - 1) / max(horizon - 1, 1), 0.0), 1.0)
    epsilon = eps_start + (eps_end - eps_start) * frac

    unvisited = [i for i, n in enumerate(counts) if n == 0]
    if unvisited:
        # two-round stationary test per arm: play it, then repeat it once
        last_idx = _arm_index(arms, history[-1].x) if history else None
        if last_idx is not None and counts[last_idx] == 0 and (
            len(history) < 2 or history[-2].x != history[-1].x
        ):
            return arms[last_idx]
        return arms[unvisited[rng.randrange(len(unvisited))]]
    if rng.random() < epsilon:
        return arms[rng.randrange(len(arms))]
    means = [s / n for s, n in zip(sums, counts)]
    return arms[max(range(len(arms)), key=means.__getitem__)]


def decide(
    spec: AgentSpec,
    history,
    market: MarketParams,
    cfg: ExtortionConfig | None = None,
) -> float:
    """Next rival quantity for the given history of round records.

    The empty history defines each kind's start: agents with a fixed point
    (stationary, collusive) open there, the cycle opens on its first element,
    and the rest open at the midpoint of the rival interval.
    """
    _check_history(history)
    lo, hi = market.x_bounds
    midpoint = 0.5 * (lo + hi)
    round_no = len(history) + 1

    if spec.kind == "stationary":
        return float(spec.params["x"])
    if spec.kind == "collusive":
        if cfg is None:
            raise DomainError("collusive agent needs the extortion config")
        x_c, _ = stationary_best_response(cfg, market)
        return x_c
    if spec.kind == "myopic_best_response":
        if not history:
            return midpoint
        return best_response(history[-1].y, market)
    if spec.kind == "cycle":
        seq = spec.params["sequence"]
        return float(seq[(round_no - 1) % len(seq)])
    if spec.kind == "random_uniform":
        if not history:
            return midpoint
        return _round_rng(spec.seed, round_no).uniform(lo, hi)
    if spec.kind == "epsilon_greedy_learner":
        if not history:
            return midpoint
        return _learner_decide(spec, history, market)
    raise DomainError(f"unknown agent kind {spec.kind!r}")
