"""Linear extortion response strategy, its calibration, and deviation analysis.

The algorithm side pins its own normalized profit to a fixed multiple k of the
rival's: given the rival's previous quantity x, it plays the y solving

    S_y(x, y) - s_n = k * (S_x(x, y) - s_n)

where s_n is the per-player Nash profit. For the hyperbolic price this reduces
to a quadratic in y with roots

    y = (B +- sqrt(B^2 - 4*C)) / 2
    B = (d - m + m*k)/c + (k - 1)*x
    C = x * ((d*k + m*(1 - k))/c - k*x)

with d the demand scale and m = s_n - a. The minus root reproduces the
collusive-side response; the plus root is the economically irrelevant branch.

Calibration answers the question: for which k can no periodic rival sequence
out-earn the rival's best stationary play? Searches here use unclamped
responses and relaxed-domain profits throughout.
"""

import functools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, NoRealResponse, OutOfBoundsResponse, UnsupportedCycleLength
from .market import MarketParams, DEFAULT_MARKET, price, profit_pair, reference_points
from .scalar_search import bisect_root, golden_section_max, maximize_scalar, scan_sign_change

ROOTS = ("minus", "plus")
CLAMP_MODES = ("clamp_to_bounds", "error_on_out_of_bounds", "unclamped")

#: residual tolerance of the numeric root fallback
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ExtortionConfig:
    """Extortion parameter k with the Nash reference profit and solve policy.

    k = 1 is fair collusion, k > 1 extorts the rival. `clamp` controls what
    happens when the solved response leaves the algorithm's interval: live play
    clamps, calibration works unclamped, and `error_on_out_of_bounds` raises
    with the raw root attached.
    """

    k: float = 1.296
    s_n: float = 40.0
    root: str = "minus"
    clamp: str = "clamp_to_bounds"

    def __post_init__(self):
        if self.k < 1.0:
            raise DomainError(f"extortion parameter must be >= 1, got {self.k}")
        if self.root not in ROOTS:
            raise DomainError(f"root must be one of {ROOTS}, got {self.root!r}")
        if self.clamp not in CLAMP_MODES:
            raise DomainError(f"clamp must be one of {CLAMP_MODES}, got {self.clamp!r}")


@dataclass(frozen=True)
class CycleEvaluation:
    """A periodic rival sequence, the responses it induces, and its mean payoff.

    ys[t] is the response to xs[t-1] with wrap-around, so ys[0] answers xs[-1].
    """

    xs: tuple[float, ...]
    mean_payoff: float
    ys: tuple[float, ...]


@functools.lru_cache(maxsize=32)
def nash_profit(params: MarketParams) -> float:
    return reference_points(params).nash.profit


def config_for_market(k: float, params: MarketParams, clamp: str = "clamp_to_bounds") -> ExtortionConfig:
    """Build a config whose Nash reference profit matches the given market."""
    return ExtortionConfig(k=k, s_n=nash_profit(params), clamp=clamp)


def _quadratic_roots(x, cfg: ExtortionConfig, params: MarketParams):
    """Closed-form response roots for the hyperbolic price; x may be an ndarray.

    Returns (minus, plus); entries are NaN where no real root exists.
    """
    d, c, a = params.demand_scale, params.c, params.a
    m = cfg.s_n - a
    k = cfg.k
    b_lin = (d - m + m * k) / c + (k - 1.0) * x
    c_lin = x * ((d * k + m * (1.0 - k)) / c - k * x)
    disc = b_lin * b_lin - 4.0 * c_lin
    # touch points can dip a hair below zero in floating point
    eps = 1e-9 * np.maximum(1.0, b_lin * b_lin)
    disc = np.where((disc < 0.0) & (disc > -eps), 0.0, disc)
    z = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
    return 0.5 * (b_lin - z), 0.5 * (b_lin + z)


def _residual(x: float, y: float, cfg: ExtortionConfig, params: MarketParams) -> float:
    s_x, s_y = profit_pair(x, y, params, relaxed=True)
    return (s_y - cfg.s_n) - cfg.k * (s_x - cfg.s_n)


def _solve_numeric(x_prev: float, cfg: ExtortionConfig, params: MarketParams) -> float:
    """Bracketing root search for non-hyperbolic price functions.

    A tangent root (the residual touches zero without crossing) has no
    bracket; it is located instead as the residual-magnitude minimum, with
    position accuracy around 1e-6.
    """
    y_lo, y_hi = params.y_bounds
    if cfg.clamp == "unclamped":
        lo = min(y_lo, 1e-3)
        hi = max(y_hi, params.x_bounds[1] + y_hi)
    else:
        lo, hi = y_lo, y_hi
    f = lambda y: _residual(x_prev, y, cfg, params)
    bracket = scan_sign_change(f, lo, hi, segments=512, from_high=(cfg.root == "plus"))
    if bracket is not None:
        return bisect_root(f, bracket[0], bracket[1], ytol=RESIDUAL_TOL)
    y, neg_abs = maximize_scalar(lambda v: -abs(f(v)), lo, hi, step=1e-3, xtol=1e-9)
    if -neg_abs <= RESIDUAL_TOL:
        return y
    raise NoRealResponse(x_prev, cfg.k, "no bracketing root in the search interval")


def _raw_response(x_prev: float, cfg: ExtortionConfig, params: MarketParams) -> float:
    if x_prev <= 0:
        raise DomainError(f"rival quantity must be positive, got {x_prev}")
    if params.hyperbolic and params.c > 0:
        minus, plus = _quadratic_roots(float(x_prev), cfg, params)
        y = minus if cfg.root == "minus" else plus
        if math.isnan(y):
            raise NoRealResponse(x_prev, cfg.k)
        return float(y)
    return _solve_numeric(x_prev, cfg, params)


def solve_response(
    x_prev: float, cfg: ExtortionConfig, params: MarketParams = DEFAULT_MARKET
) -> float:
    """Algorithm quantity answering the rival's previous quantity.

    Honors cfg.clamp: the raw root is clamped to the algorithm interval,
    returned untouched, or rejected with the raw value attached.
    """
    y = _raw_response(x_prev, cfg, params)
    lo, hi = params.y_bounds
    if cfg.clamp == "clamp_to_bounds":
        return min(max(y, lo), hi)
    if cfg.clamp == "error_on_out_of_bounds" and not (lo <= y <= hi):
        raise OutOfBoundsResponse(y, params.y_bounds)
    return y


def _unclamped(cfg: ExtortionConfig) -> ExtortionConfig:
    return cfg if cfg.clamp == "unclamped" else replace(cfg, clamp="unclamped")


def stationary_payoff(x: float, cfg: ExtortionConfig, params: MarketParams = DEFAULT_MARKET) -> float:
    """Rival profit when it repeats x forever against the unclamped response."""
    y = _raw_response(x, cfg, params)
    return profit_pair(x, y, params, relaxed=True)[0]


def _stationary_grid(cfg: ExtortionConfig, params: MarketParams, step: float):
    lo, hi = params.x_bounds
    n = int(math.ceil((hi - lo) / step))
    xs = np.linspace(lo, hi, n + 1)
    ys, _ = _quadratic_roots(xs, cfg, params)
    if np.isnan(ys).any():
        bad = float(xs[int(np.argmax(np.isnan(ys)))])
        raise NoRealResponse(bad, cfg.k)
    margin = params.demand_scale / (xs + ys) - params.c
    return xs, params.a + margin * xs


def stationary_best_response(
    cfg: ExtortionConfig, params: MarketParams = DEFAULT_MARKET
) -> tuple[float, float]:
    """Rival quantity maximizing its stationary payoff, with that payoff.

    Grid scan at step 1e-3 over the rival interval plus golden-section
    refinement; the response is always the unclamped root.
    """
    ucfg = _unclamped(cfg)
    lo, hi = params.x_bounds
    if params.hyperbolic and params.c > 0:
        xs, payoffs = _stationary_grid(ucfg, params, 1e-3)
        i = int(np.argmax(payoffs))
        best_x, best_v = float(xs[i]), float(payoffs[i])
        a = float(xs[max(i - 1, 0)])
        b = float(xs[min(i + 1, len(xs) - 1)])
        if b > a:
            x, v = golden_section_max(lambda t: stationary_payoff(t, ucfg, params), a, b, 1e-7)
            if v > best_v:
                best_x, best_v = x, v
        return best_x, best_v
    return maximize_scalar(lambda t: stationary_payoff(t, ucfg, params), lo, hi, 1e-3, 1e-7)


def cycle_payoff(
    xs, cfg: ExtortionConfig, params: MarketParams = DEFAULT_MARKET
) -> float:
    """Mean rival profit over one period of the cyclic sequence xs.

    Round t earns the rival S_x(xs[t], response(xs[t-1])) with wrap-around,
    so a constant cycle degenerates to the stationary payoff.
    """
    xs = list(xs)
    if not xs:
        raise DomainError("cycle must contain at least one quantity")
    lo, hi = params.x_bounds
    for x in xs:
        if not (lo <= x <= hi):
            raise DomainError(f"cycle quantity {x} outside rival bounds {params.x_bounds}")
    ucfg = _unclamped(cfg)
    total = 0.0
    for t, x in enumerate(xs):
        y = _raw_response(xs[t - 1], ucfg, params)
        total += profit_pair(x, y, params, relaxed=True)[0]
    return total / len(xs)


def _responses(xs, cfg: ExtortionConfig, params: MarketParams) -> tuple[float, ...]:
    ucfg = _unclamped(cfg)
    return tuple(_raw_response(xs[t - 1], ucfg, params) for t in range(len(xs)))


def _payoff_matrix(grid: np.ndarray, cfg: ExtortionConfig, params: MarketParams) -> np.ndarray:
    """M[i, j] = rival profit playing grid[i] after having played grid[j].

    Any cycle's mean payoff over grid points is a mean of entries of M.
    """
    ucfg = _unclamped(cfg)
    if params.hyperbolic and params.c > 0:
        ys, _ = _quadratic_roots(grid, ucfg, params)
        if np.isnan(ys).any():
            bad = float(grid[int(np.argmax(np.isnan(ys)))])
            raise NoRealResponse(bad, cfg.k)
    else:
        ys = np.array([_raw_response(float(x), ucfg, params) for x in grid])
    x_now = grid[:, None]
    margin = params.demand_scale / (x_now + ys[None, :]) - params.c if params.hyperbolic \
        else np.array([[price(float(x + y), params) - params.c for y in ys] for x in grid])
    return params.a + margin * x_now


def _coordinate_scan(xs, i, cfg, params, step=1e-3):
    """Best value for coordinate i with the others fixed: vector scan + golden."""
    lo, hi = params.x_bounds
    n = len(xs)
    ucfg = _unclamped(cfg)
    f = _single_coordinate_objective(xs, i, ucfg, params)
    if params.hyperbolic and params.c > 0 and n >= 2:
        m = int(math.ceil((hi - lo) / step))
        grid = np.linspace(lo, hi, m + 1)
        ys = [_raw_response(x, ucfg, params) for x in xs]
        fixed = sum(
            profit_pair(xs[t], ys[t - 1], params, relaxed=True)[0]
            for t in range(n)
            if t != i and t != (i + 1) % n
        )
        y_prev = ys[(i - 1) % n]
        own = params.a + (params.demand_scale / (grid + y_prev) - params.c) * grid
        resp, _ = _quadratic_roots(grid, ucfg, params)
        x_next = xs[(i + 1) % n]
        if (i + 1) % n == i:  # n == 1: both terms collapse to the stationary payoff
            vals = params.a + (params.demand_scale / (grid + resp) - params.c) * grid
        else:
            nxt = params.a + (params.demand_scale / (x_next + resp) - params.c) * x_next
            vals = own + nxt + fixed
        vals = vals / n
        j = int(np.argmax(vals))
        best_x, best_v = float(grid[j]), float(vals[j])
        a = float(grid[max(j - 1, 0)])
        b = float(grid[min(j + 1, len(grid) - 1)])
        if b > a:
            x, v = golden_section_max(f, a, b, 1e-7)
            if v > best_v:
                best_x, best_v = x, v
        return best_x, best_v
    return maximize_scalar(f, lo, hi, step, 1e-7)


def _single_coordinate_objective(xs, i, cfg, params):
    base = list(xs)

    def f(v):
        trial = base.copy()
        trial[i] = v
        return cycle_payoff(trial, cfg, params)

    return f


def _polish_cycle(xs, cfg, params, max_passes=30):
    xs = list(xs)
    best = cycle_payoff(xs, cfg, params)
    for _ in range(max_passes):
        improved = False
        for i in range(len(xs)):
            x_new, v_new = _coordinate_scan(xs, i, cfg, params)
            if v_new > best + 1e-13:
                xs[i] = x_new
                best = v_new
                improved = True
        if not improved:
            break
    return xs, best


def _grid_candidates(n: int, cfg: ExtortionConfig, params: MarketParams, step: float):
    """Coarse-grid argmax plus the best clearly non-constant grid cycle."""
    lo, hi = params.x_bounds
    m = int(math.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, m + 1)
    mat = _payoff_matrix(grid, cfg, params)
    if n == 2:
        c = 0.5 * (mat + mat.T)
        spread = np.abs(grid[:, None] - grid[None, :])
        idx = np.unravel_index(int(np.argmax(c)), c.shape)
        cands = [[grid[idx[0]], grid[idx[1]]]]
        off = np.where(spread >= 0.15, c, -np.inf)
        j = np.unravel_index(int(np.argmax(off)), off.shape)
        if np.isfinite(off[j]):
            cands.append([grid[j[0]], grid[j[1]]])
        return cands
    if n == 3:
        mt = mat.T
        c = (mat[:, None, :] + mt[:, :, None] + mt[None, :, :]) / 3.0
        idx = np.unravel_index(int(np.argmax(c)), c.shape)
        cands = [[grid[idx[0]], grid[idx[1]], grid[idx[2]]]]
        g0 = grid[:, None, None]
        g1 = grid[None, :, None]
        g2 = grid[None, None, :]
        spread = np.maximum(np.abs(g0 - g1), np.maximum(np.abs(g1 - g2), np.abs(g0 - g2)))
        off = np.where(spread >= 0.15, c, -np.inf)
        j = np.unravel_index(int(np.argmax(off)), off.shape)
        if np.isfinite(off[j]):
            cands.append([grid[j[0]], grid[j[1]], grid[j[2]]])
        return cands
    # n == 4: accumulate chunk-wise over the first index to bound memory
    mt = mat.T
    best_val, best_idx = -np.inf, None
    off_val, off_idx = -np.inf, None
    g1 = grid[None, :, None]
    g2 = grid[None, None, :]
    for i0 in range(len(grid)):
        c0 = (mat[i0, None, None, :] + mat[:, i0][:, None, None] + mt[:, :, None] + mt[None, :, :]) / 4.0
        j = np.unravel_index(int(np.argmax(c0)), c0.shape)
        if c0[j] > best_val:
            best_val, best_idx = float(c0[j]), (i0, *j)
        spread = np.maximum(np.abs(grid[i0] - g1), np.abs(g1 - g2))
        off0 = np.where(spread >= 0.15, c0, -np.inf)
        jo = np.unravel_index(int(np.argmax(off0)), off0.shape)
        if off0[jo] > off_val:
            off_val, off_idx = float(off0[jo]), (i0, *jo)
    cands = [[grid[t] for t in best_idx]]
    if off_idx is not None and math.isfinite(off_val):
        cands.append([grid[t] for t in off_idx])
    return cands


def find_best_cycle(
    n: int, cfg: ExtortionConfig, params: MarketParams = DEFAULT_MARKET
) -> CycleEvaluation:
    """Heuristic global search for the rival cycle of period n with highest mean payoff.

    Coarse grid (0.01 for n <= 2, 0.05 for n = 3, 0.1 for n = 4) followed by
    coordinate-wise golden-section polish of the leading candidates. Not a
    certified global optimum, but the grids are chosen so the known deviation
    counterexamples and the validity boundary are resolved.
    """
    if n < 1:
        raise DomainError(f"cycle length must be >= 1, got {n}")
    if n > 4:
        raise UnsupportedCycleLength(
            f"period {n} exceeds the supported exhaustive-grid range (max 4)"
        )
    if n == 1:
        x, v = stationary_best_response(cfg, params)
        return CycleEvaluation(xs=(x,), mean_payoff=v, ys=_responses([x], cfg, params))

    step = 0.01 if n == 2 else (0.05 if n == 3 else 0.1)
    candidates = _grid_candidates(n, cfg, params, step)
    x_c, _ = stationary_best_response(cfg, params)
    candidates.append([x_c] * n)

    best_xs, best_v = None, -math.inf
    for cand in candidates:
        xs, v = _polish_cycle([float(x) for x in cand], cfg, params)
        if v > best_v:
            best_xs, best_v = xs, v
    xs = tuple(float(x) for x in best_xs)
    return CycleEvaluation(xs=xs, mean_payoff=best_v, ys=_responses(xs, cfg, params))


def max_valid_k(params: MarketParams = DEFAULT_MARKET, n: int = 2) -> float:
    """Largest extortion parameter no period-n rival cycle can profitably deviate from.

    Bisection over k in [1, 4] to width 1e-4; a k is valid when the best
    period-n cycle exceeds the stationary optimum by at most 1e-9. Only the
    n = 2 analysis is supported.
    """
    if n != 2:
        raise DomainError(f"validity analysis is defined for n=2 only, got n={n}")
    s_n = nash_profit(params)

    def is_valid(k: float) -> bool:
        cfg = ExtortionConfig(k=k, s_n=s_n, clamp="unclamped")
        _, stationary = stationary_best_response(cfg, params)
        best = find_best_cycle(n, cfg, params).mean_payoff
        return best <= stationary + 1e-9

    lo, hi = 1.0, 4.0
    if not is_valid(lo):
        return lo
    if is_valid(hi):
        return hi
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        if is_valid(mid):
            lo = mid
        else:
            hi = mid
    return lo


def response_surface(
    k: float, grid_step: float, params: MarketParams = DEFAULT_MARKET
) -> list[tuple[float, float]]:
    """Unclamped response tabulated over the rival interval, for plotting.

    Grid points with no real response are omitted.
    """
    if grid_step <= 0:
        raise DomainError(f"grid step must be positive, got {grid_step}")
    cfg = ExtortionConfig(k=k, s_n=nash_profit(params), clamp="unclamped")
    lo, hi = params.x_bounds
    n = int(math.ceil((hi - lo) / grid_step))
    rows = []
    for i in range(n + 1):
        x = min(lo + i * grid_step, hi)
        try:
            rows.append((x, _raw_response(x, cfg, params)))
        except NoRealResponse:
            continue
    return rows


def deviation_curve(
    k_range: tuple[float, float],
    x1: float,
    params: MarketParams = DEFAULT_MARKET,
    k_step: float = 0.01,
) -> list[tuple[float, float, float]]:
    """Best second leg of the 2-cycle [x1, x2] across a sweep of k values.

    Each row is (k, x2, mean payoff); below the validity boundary the best x2
    collapses onto x1, above it the deviating branch takes over.
    """
    lo, hi = params.x_bounds
    if not (lo <= x1 <= hi):
        raise DomainError(f"x1={x1} outside rival bounds {params.x_bounds}")
    k_lo, k_hi = k_range
    if k_lo < 1.0 or k_hi < k_lo:
        raise DomainError(f"invalid k range {k_range}")
    s_n = nash_profit(params)
    rows = []
    steps = max(int(round((k_hi - k_lo) / k_step)), 0)
    for i in range(steps + 1):
        k = min(k_lo + i * k_step, k_hi)
        cfg = ExtortionConfig(k=k, s_n=s_n, clamp="unclamped")
        x2, payoff = _coordinate_scan([x1, x1], 1, cfg, params)
        rows.append((k, x2, payoff))
    return rows
