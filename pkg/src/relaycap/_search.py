"""Golden-section maximizer shared by the bound optimizers."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    """Maximize a unimodal f on [lo, hi]; returns (argmax, max).

    Also evaluates the interval ends, so a maximum on the boundary is found
    exactly even when the interior shape is flat.
    """
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        return lo, f(lo)
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    candidates = [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))]
    return max(candidates, key=lambda pair: pair[1])
