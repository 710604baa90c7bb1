"""Scalar maximization and root bracketing used by the calibration searches."""

import math
from typing import Callable

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, xtol: float = 1e-7
) -> tuple[float, float]:
    """Locate a maximum of f on [a, b] by golden-section search.

    Assumes f is unimodal on the bracket; returns (x, f(x)).
    """
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    step: float = 1e-3,
    xtol: float = 1e-7,
) -> tuple[float, float]:
    """Grid scan plus golden-section refinement; robust to multiple local maxima.

    The grid includes both endpoints. Golden refinement runs in the cell pair
    around the best grid point, and the better of grid and refined values wins.
    """
    n = max(int(math.ceil((hi - lo) / step)), 1)
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    vals = [f(x) for x in xs]
    i = max(range(len(xs)), key=vals.__getitem__)
    best_x, best_v = xs[i], vals[i]
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    if b > a:
        x, v = golden_section_max(f, a, b, xtol)
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v


def scan_sign_change(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    segments: int = 256,
    from_high: bool = False,
) -> tuple[float, float] | None:
    """First bracket [a, b] with a sign change of f, scanning low-to-high.

    `from_high=True` scans downward instead, yielding the bracket of the
    largest root. Returns None when no sign change is found.
    """
    xs = [lo + (hi - lo) * i / segments for i in range(segments + 1)]
    if from_high:
        xs = xs[::-1]
    prev_x = xs[0]
    prev_f = f(prev_x)
    if prev_f == 0.0:
        return prev_x, prev_x
    for x in xs[1:]:
        fx = f(x)
        if fx == 0.0:
            return x, x
        if (prev_f < 0) != (fx < 0):
            return (min(prev_x, x), max(prev_x, x))
        prev_x, prev_f = x, fx
    return None


def bisect_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    ytol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Bisection on a bracketing interval until |f| <= ytol or the interval collapses."""
    fa = f(a)
    if a == b or fa == 0.0:
        return a
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) <= ytol or (b - a) < 1e-15 * max(1.0, abs(mid)):
            return mid
        if (fa < 0) != (fm < 0):
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)
