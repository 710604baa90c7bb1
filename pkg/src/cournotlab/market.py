"""Static Cournot duopoly market: prices, profits, and reference equilibria.

Two producers choose quantities x (rival) and y (algorithm); the market price
is a decreasing function of the total quantity z = x + y and each side earns

    profit = a + (P(z) - c) * own_quantity

with marginal cost c and an additive constant a for income unrelated to this
market. The default parameterization is a = c = 10, P(z) = 120/z, rival
interval [0.1, 6] and algorithm interval [0.1, 3].
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import CalibrationError, DomainError
from .scalar_search import maximize_scalar


@dataclass(frozen=True)
class MarketParams:
    """Supply-demand environment for one duopoly market.

    `demand_scale` is the numerator of the hyperbolic price P(z) = demand_scale/z.
    A custom strictly decreasing `price_fn` may replace it; closed-form solver
    shortcuts then deactivate and numeric fallbacks run instead.
    """

    a: float = 10.0
    c: float = 10.0
    demand_scale: float = 120.0
    x_bounds: tuple[float, float] = (0.1, 6.0)
    y_bounds: tuple[float, float] = (0.1, 3.0)
    price_fn: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.c < 0:
            raise DomainError(f"marginal cost must be non-negative, got {self.c}")
        if self.price_fn is None and self.demand_scale <= 0:
            raise DomainError("demand_scale must be positive for the hyperbolic price")
        for name, (lo, hi) in (("x_bounds", self.x_bounds), ("y_bounds", self.y_bounds)):
            if lo <= 0:
                raise DomainError(f"{name} lower bound must be positive, got {lo}")
            if lo >= hi:
                raise DomainError(f"{name} must satisfy low < high, got ({lo}, {hi})")

    @property
    def hyperbolic(self) -> bool:
        return self.price_fn is None

    @property
    def max_total_quantity(self) -> float:
        return self.x_bounds[1] + self.y_bounds[1]


DEFAULT_MARKET = MarketParams()


@dataclass(frozen=True)
class EquilibriumPoint:
    """Per-player quantity with the implied market price and per-player profit."""

    q: float
    price: float
    profit: float


@dataclass(frozen=True)
class WalrasianPoint:
    """Fully competitive benchmark: price equals marginal cost, profit equals a.

    `q_total` is the total quantity at which price would equal cost, clamped to
    the largest total the bounds can express.
    """

    q_total: float
    price: float
    profit: float


@dataclass(frozen=True)
class ReferencePoints:
    nash: EquilibriumPoint
    jpm: EquilibriumPoint
    walrasian: WalrasianPoint


def price(z: float, params: MarketParams = DEFAULT_MARKET) -> float:
    """Market price at total quantity z."""
    if z <= 0:
        raise DomainError(f"total quantity must be positive, got {z}")
    if params.price_fn is not None:
        return params.price_fn(z)
    return params.demand_scale / z


def profit_pair(
    x: float, y: float, params: MarketParams = DEFAULT_MARKET, relaxed: bool = False
) -> tuple[float, float]:
    """Profits (rival, algorithm) at quantities (x, y).

    By default both quantities must lie in their intervals; `relaxed=True`
    accepts any positive quantities, which calibration sweeps rely on.
    """
    if x <= 0 or y <= 0:
        raise DomainError(f"quantities must be positive, got ({x}, {y})")
    if not relaxed:
        if not (params.x_bounds[0] <= x <= params.x_bounds[1]):
            raise DomainError(f"x={x} outside rival bounds {params.x_bounds}")
        if not (params.y_bounds[0] <= y <= params.y_bounds[1]):
            raise DomainError(f"y={y} outside algorithm bounds {params.y_bounds}")
    margin = price(x + y, params) - params.c
    return params.a + margin * x, params.a + margin * y


def best_response(opponent_q: float, params: MarketParams = DEFAULT_MARKET) -> float:
    """Rival quantity maximizing rival profit against a fixed opponent quantity.

    For the hyperbolic price the interior optimum is sqrt(demand_scale*q/c) - q;
    the result is clamped to the rival interval. Other price functions are
    maximized numerically.
    """
    if opponent_q <= 0:
        raise DomainError(f"opponent quantity must be positive, got {opponent_q}")
    return _best_response_in(opponent_q, params.x_bounds, params)


def _best_response_in(
    opponent_q: float, bounds: tuple[float, float], params: MarketParams
) -> float:
    lo, hi = bounds
    if params.hyperbolic and params.c > 0:
        interior = math.sqrt(params.demand_scale * opponent_q / params.c) - opponent_q
        return min(max(interior, lo), hi)
    own = lambda q: params.a + (price(q + opponent_q, params) - params.c) * q
    q, _ = maximize_scalar(own, lo, hi, step=1e-3, xtol=1e-9)
    return q


def competitive_total_quantity(params: MarketParams = DEFAULT_MARKET) -> float:
    """Total quantity at which price equals marginal cost (not clamped to bounds)."""
    if params.c <= 0:
        raise CalibrationError("price never meets a non-positive marginal cost")
    if params.hyperbolic:
        return params.demand_scale / params.c
    lo, hi = 1e-9, params.max_total_quantity
    f = lambda z: price(z, params) - params.c
    if f(hi) > 0:
        return hi  # price stays above cost everywhere in range
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reference_points(params: MarketParams = DEFAULT_MARKET) -> ReferencePoints:
    """Nash, joint-profit-maximum and Walrasian reference triples.

    Nash is the symmetric best-response fixed point over the interval both
    players share, found by damped iteration and validated analytically for
    the hyperbolic price. The JPM point maximizes joint profit over symmetric
    quantity pairs. The Walrasian point records the competitive benchmark.
    """
    lo = max(params.x_bounds[0], params.y_bounds[0])
    hi = min(params.x_bounds[1], params.y_bounds[1])
    if lo >= hi:
        raise CalibrationError("rival and algorithm intervals do not overlap")

    q = 0.5 * (lo + hi)
    for _ in range(500):
        nxt = _best_response_in(q, (lo, hi), params)
        moved = min(max(0.5 * (q + nxt), lo), hi)
        if abs(moved - q) < 1e-12:
            q = moved
            break
        q = moved
    if abs(_best_response_in(q, (lo, hi), params) - q) > 1e-7:
        raise CalibrationError("no symmetric best-response fixed point within bounds")
    if params.hyperbolic and params.c > 0:
        analytic = params.demand_scale / (4.0 * params.c)
        analytic = min(max(analytic, lo), hi)
        if abs(q - analytic) > 1e-6:
            raise CalibrationError(
                f"numeric Nash {q} disagrees with analytic {analytic}"
            )
        q = analytic
    nash_price = price(2 * q, params)
    nash = EquilibriumPoint(q, nash_price, params.a + (nash_price - params.c) * q)

    joint = lambda s: 2 * (params.a + (price(2 * s, params) - params.c) * s)
    q_c, _ = maximize_scalar(joint, lo, hi, step=1e-4, xtol=1e-10)
    jpm_price = price(2 * q_c, params)
    jpm = EquilibriumPoint(q_c, jpm_price, params.a + (jpm_price - params.c) * q_c)

    q_w = min(competitive_total_quantity(params), params.max_total_quantity)
    walrasian = WalrasianPoint(q_w, params.c, params.a)

    return ReferencePoints(nash=nash, jpm=jpm, walrasian=walrasian)
