"""Bracketed golden-section maximisation."""

from __future__ import annotations

import math
from typing import Callable

__all__ = ["golden_section_max"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6, max_iter: int = 200):
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point seen, so the result is never
    worse than either bracket interior probe.
    """
    if not lo <= hi:
        raise ValueError("empty bracket")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
    return best[1], best[0]
