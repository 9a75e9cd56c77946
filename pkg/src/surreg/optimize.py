"""Scalar minimization of convex functions on an interval.

Golden-section search followed by a few ternary refinement passes.  For a
convex objective the returned value is within ~1e-10 of the true minimum
(machine-precision limited near smooth minima); the returned argmin is the
leftmost best point seen, which matters only for flat-bottomed objectives.
"""

from __future__ import annotations

from typing import Callable

INTERVAL_TOL = 1e-12
_INVPHI = 0.6180339887498949  # (sqrt(5) - 1) / 2


def minimize_scalar_convex(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = INTERVAL_TOL,
) -> tuple[float, float]:
    """Minimize convex ``f`` on [lo, hi]; returns (argmin, value)."""
    if hi < lo:
        lo, hi = hi, lo
    best_x, best_v = lo, f(lo)
    for x in (hi,):
        v = f(x)
        if v < best_v:
            best_x, best_v = x, v

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            x, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            x, v = d, fd
        if v < best_v or (v == best_v and x < best_x):
            best_x, best_v = x, v

    # ternary passes tighten the bracket against accumulated rounding
    for _ in range(3):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1, f2 = f(m1), f(m2)
        if f1 <= f2:
            b = m2
            if f1 < best_v or (f1 == best_v and m1 < best_x):
                best_x, best_v = m1, f1
        else:
            a = m1
            if f2 < best_v or (f2 == best_v and m2 < best_x):
                best_x, best_v = m2, f2

    mid = 0.5 * (a + b)
    fm = f(mid)
    if fm < best_v or (fm == best_v and mid < best_x):
        best_x, best_v = mid, fm
    return best_x, best_v
