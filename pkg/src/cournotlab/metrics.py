"""Session analysis: collusion degree, welfare loss, payouts, and significance tests.

All operations are pure functions over immutable session data. The two
hypothesis tests are self-contained (no scipy): the rank-sum test enumerates
its exact null distribution for small tie-free samples and otherwise uses the
tie-corrected normal approximation with continuity correction; the paired
t-test evaluates the Student-t tail through the regularized incomplete beta
function computed by continued fraction.
"""

import math
import warnings
from dataclasses import dataclass
from statistics import median

from .errors import DomainError
from .market import MarketParams, DEFAULT_MARKET, ReferencePoints

EXACT_RANKSUM_LIMIT = 8


@dataclass(frozen=True)
class SummaryStats:
    average: float
    stdev: float
    median: float


@dataclass(frozen=True)
class CollusionMetrics:
    degree: float
    dwl: float
    z_total: float
    beyond_capacity: bool = False


def degree_of_collusion(
    z_total: float, refs: ReferencePoints, per_player: bool = False
) -> float:
    """Normalized distance of quantity from Nash toward the collusive point.

    0 at the Nash quantity, 1 at full collusion. The default works on total
    quantities (both producers); `per_player=True` uses the per-player scale
    for a single producer's quantity instead.
    """
    if z_total <= 0:
        raise DomainError(f"quantity must be positive, got {z_total}")
    if per_player:
        n_q, c_q = refs.nash.q, refs.jpm.q
    else:
        n_q, c_q = 2 * refs.nash.q, 2 * refs.jpm.q
    return (n_q - z_total) / (n_q - c_q)


def deadweight_loss(z_total: float, params: MarketParams = DEFAULT_MARKET) -> float:
    """Welfare forgone by supplying z_total instead of the joint capacity.

    Integral of (price(u) - c) from z_total up to the sum of the two upper
    quantity bounds; closed form for the hyperbolic price. Totals beyond
    capacity return 0 with a warning since the bounds cannot express them.
    """
    if z_total <= 0:
        raise DomainError(f"total quantity must be positive, got {z_total}")
    b = params.max_total_quantity
    if z_total > b:
        warnings.warn(
            f"total quantity {z_total} exceeds joint capacity {b}; deadweight loss is 0",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    if not params.hyperbolic:
        n = 2000
        h = (b - z_total) / n
        acc = 0.0
        from .market import price as _price
        for i in range(n + 1):
            w = 0.5 if i in (0, n) else 1.0
            acc += w * (_price(z_total + i * h, params) - params.c)
        return acc * h
    return params.demand_scale * math.log(b / z_total) - params.c * (b - z_total)


def collusion_metrics(
    z_total: float, refs: ReferencePoints, params: MarketParams = DEFAULT_MARKET
) -> CollusionMetrics:
    beyond = z_total > params.max_total_quantity
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dwl = deadweight_loss(z_total, params)
    return CollusionMetrics(
        degree=degree_of_collusion(z_total, refs),
        dwl=dwl,
        z_total=z_total,
        beyond_capacity=beyond,
    )


def payout_yuan(total_profit: float) -> float:
    """Cash conversion of a session's cumulative profit (in yuan).

    1.2 * (total/600 - 30) + 5: average per-round profit against a baseline of
    30, scaled, plus the show-up fee. May be negative for poor sessions; the
    experiment service clamps at zero by default.
    """
    if total_profit < 0:
        raise DomainError(f"total profit must be non-negative, got {total_profit}")
    return 1.2 * (total_profit / 600.0 - 30.0) + 5.0


# --- windowed summaries ------------------------------------------------------


def _window_records(session, window: tuple[int, int]):
    lo, hi = window
    n = len(session.rounds_log)
    if lo < 1 or hi > n or lo > hi:
        raise DomainError(f"window {window} invalid for a session of {n} rounds")
    return session.rounds_log[lo - 1:hi]


def _sample_stdev(values) -> float:
    n = len(values)
    if n < 2 or min(values) == max(values):
        return 0.0
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def _cross_stats(values) -> SummaryStats:
    return SummaryStats(
        average=sum(values) / len(values),
        stdev=_sample_stdev(values),
        median=median(values),
    )


def per_session_means(sessions, window: tuple[int, int], field: str) -> list[float]:
    """Stage one of the summary: each session's mean of a record field over the window."""
    if not sessions:
        raise DomainError("need at least one session")
    out = []
    for s in sessions:
        recs = _window_records(s, window)
        out.append(sum(getattr(r, field) for r in recs) / len(recs))
    return out


def summarize(sessions, window: tuple[int, int]) -> dict[str, SummaryStats]:
    """Two-stage summary: per-session means first, then cross-session statistics.

    Returns average / sample stdev / median of the per-session mean rival
    quantity and profit (keys "quantity", "profit"), plus the algorithm-side
    counterparts under "algorithm_quantity" and "algorithm_profit".
    """
    fields = {
        "quantity": "x",
        "profit": "s_x",
        "algorithm_quantity": "y",
        "algorithm_profit": "s_y",
    }
    return {
        name: _cross_stats(per_session_means(sessions, window, attr))
        for name, attr in fields.items()
    }


def median_timeseries(sessions, field: str, params: MarketParams | None = None,
                      refs: ReferencePoints | None = None) -> list[tuple[int, float]]:
    """Per-round median across sessions of x, total quantity, degree, or dwl."""
    if not sessions:
        raise DomainError("need at least one session")
    n = len(sessions[0].rounds_log)
    for s in sessions:
        if len(s.rounds_log) != n:
            raise DomainError("sessions must share the same round count")
    if field in ("degree", "dwl"):
        params = params or sessions[0].config.market
        if refs is None:
            from .market import reference_points
            refs = reference_points(params)

    def value(rec):
        if field == "x":
            return rec.x
        if field == "total":
            return rec.x + rec.y
        if field == "degree":
            return degree_of_collusion(rec.x + rec.y, refs)
        if field == "dwl":
            return deadweight_loss(rec.x + rec.y, params)
        raise DomainError(f"unknown time-series field {field!r}")

    return [
        (r + 1, median(value(s.rounds_log[r]) for s in sessions))
        for r in range(n)
    ]


# --- rank-sum test -----------------------------------------------------------


def _midranks(pooled: list[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=pooled.__getitem__)
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _ranksum_counts(n: int, total: int) -> list[int]:
    """counts[s] = number of n-subsets of ranks 1..total with rank sum s."""
    max_sum = n * total
    dp = [[0] * (max_sum + 1) for _ in range(n + 1)]
    dp[0][0] = 1
    for r in range(1, total + 1):
        for j in range(min(r, n), 0, -1):
            row, prev = dp[j], dp[j - 1]
            for s in range(max_sum, r - 1, -1):
                if prev[s - r]:
                    row[s] += prev[s - r]
    return dp[n]


def _rank_sum_exact(a: list[float], b: list[float]) -> float:
    n, m = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    w = sum(ranks[:n])
    counts = _ranksum_counts(n, n + m)
    total = math.comb(n + m, n)
    mirror = n * (n + m + 1) - w
    w_lo, w_hi = min(w, mirror), max(w, mirror)
    lo_count = sum(c for s, c in enumerate(counts) if s <= w_lo + 1e-9)
    hi_count = sum(c for s, c in enumerate(counts) if s >= w_hi - 1e-9)
    return min(1.0, (lo_count + hi_count) / total)


def _rank_sum_normal(a: list[float], b: list[float]) -> float:
    n, m = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    w = sum(ranks[:n])
    total = n + m
    mu = n * (total + 1) / 2.0
    tie_term = 0.0
    seen = sorted(pooled)
    i = 0
    while i < len(seen):
        j = i
        while j + 1 < len(seen) and seen[j + 1] == seen[i]:
            j += 1
        t = j - i + 1
        tie_term += t ** 3 - t
        i = j + 1
    var = n * m / 12.0 * ((total + 1) - tie_term / (total * (total - 1)))
    if var <= 0:
        return 1.0
    z = max(abs(w - mu) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def rank_sum_test(sample_a, sample_b, method: str = "auto") -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value.

    `auto` enumerates the exact null distribution when the smaller sample has
    at most 8 observations and the pooled data has no ties, and otherwise
    applies the normal approximation with tie and continuity corrections.
    """
    a, b = [float(v) for v in sample_a], [float(v) for v in sample_b]
    if not a or not b:
        raise DomainError("both samples must be non-empty")
    if method not in ("auto", "exact", "approx"):
        raise DomainError(f"unknown method {method!r}")
    has_ties = len(set(a + b)) < len(a) + len(b)
    if method == "exact" or (
        method == "auto" and min(len(a), len(b)) <= EXACT_RANKSUM_LIMIT and not has_ties
    ):
        return _rank_sum_exact(a, b)
    return _rank_sum_normal(a, b)


# --- paired t-test -----------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-14:
            break
    return h


def _betai(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), absolute error below 1e-10."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T_df| >= |t|) via the incomplete beta identity."""
    if df <= 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    return _betai(df / 2.0, 0.5, df / (df + t * t))


def paired_t_test(sample_a, sample_b) -> float:
    """Two-sided paired t-test p-value on the element-wise differences.

    Zero-variance differences degenerate by convention: p = 1 when the common
    difference is zero, p = 0 otherwise.
    """
    a, b = list(sample_a), list(sample_b)
    if len(a) != len(b):
        raise DomainError(f"paired samples must have equal length ({len(a)} vs {len(b)})")
    n = len(a)
    if n < 2:
        raise DomainError("need at least two pairs")
    diffs = [float(u) - float(v) for u, v in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        return 1.0 if mean == 0.0 else 0.0
    t = mean / math.sqrt(var / n)
    return student_t_two_sided_p(t, n - 1)
