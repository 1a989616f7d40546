"""Moments of the reference laws used as targets across the package."""

from __future__ import annotations

import math
from typing import List

import numpy as np
from scipy.special import beta

__all__ = ["catalan", "law_moments", "MAX_ORDER", "LAWS"]

MAX_ORDER = 32
LAWS = ("semicircle", "quarter_circle", "haar_unitary", "geometric")


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def law_moments(law: str, order: int, r: float = None, lam: float = None) -> List[float]:
    """Moments ``m_0..m_order`` of a reference law.

    semicircle
        Semicircle on ``[-r, r]`` (default ``r = 2``): ``m_2k = C_k (r/2)^{2k}``.
    quarter_circle
        Density ``4 / (pi r^2) sqrt(r^2 - t^2)`` on ``[0, r]`` (default ``r = 1``),
        ``m_k = r^k (2/pi) B((k+1)/2, 3/2)``.
    haar_unitary
        ``phi(u^n) = delta_{n0}``.
    geometric
        Law of the number operator ``sum_j j e_jj`` under ``omega_lam``, i.e.
        ``P(j) = (1 - lam) lam^j``; moments summed until the tail is below 1e-16.
    """
    if not isinstance(order, (int, np.integer)) or order < 0:
        raise ValueError("order must be a non-negative integer")
    if order > MAX_ORDER:
        raise ValueError(f"order above {MAX_ORDER} is not supported")
    if law == "semicircle":
        r = 2.0 if r is None else float(r)
        return [catalan(n // 2) * (r / 2) ** n if n % 2 == 0 else 0.0 for n in range(order + 1)]
    if law == "quarter_circle":
        r = 1.0 if r is None else float(r)
        return [float(r ** n * 2 / math.pi * beta((n + 1) / 2, 1.5)) for n in range(order + 1)]
    if law == "haar_unitary":
        return [1.0] + [0.0] * order
    if law == "geometric":
        if lam is None or not 0 < lam < 1:
            raise ValueError("geometric law needs lam in (0, 1)")
        # j^n lam^j decays once j > n / |log lam|; sum far past the peak
        jmax = int(order / -math.log(lam) + 60 / -math.log(lam)) + 50
        j = np.arange(jmax + 1, dtype=float)
        w = (1 - lam) * lam ** j
        return [float(np.sum(w * j ** n)) for n in range(order + 1)]
    raise ValueError(f"unknown law {law!r}; expected one of {LAWS}")
