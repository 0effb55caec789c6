"""Independent reference computations the library is checked against."""

from __future__ import annotations

from fractions import Fraction
from math import comb


def _sum_of_products(m: int, n: int, p: Fraction, rho: Fraction) -> Fraction:
    # probability of one vector with m zeros, by inclusion-exclusion over the zeros
    total = Fraction(0)
    for i in range(m + 1):
        term = p
        for k in range(n - m + i - 1):
            term *= (rho * (k + 1 - p) + p) / (1 + k * rho)
        total += (-1) ** i * comb(m, i) * term
    return total


def direct_lambda(m: int, n: int, p_d: float, p_fa: float, rho1: float, rho0: float) -> float:
    """Likelihood ratio by term-by-term expansion, valid for 0 <= m <= n - 2.

    The alternating sum cancels heavily for large m, so it is evaluated in
    exact rational arithmetic on the (binary) input values and rounded once.
    """
    if not 0 <= m <= n - 2:
        raise ValueError("expansion holds for 0 <= m <= n - 2")
    num = _sum_of_products(m, n, Fraction(p_d), Fraction(rho1))
    den = _sum_of_products(m, n, Fraction(p_fa), Fraction(rho0))
    return float(num / den)


def lma_steady_rmse(s: float, window: int) -> float:
    """Standard deviation of a mean of ``window`` i.i.d. Bernoulli(s) values."""
    return (s * (1 - s) / window) ** 0.5


def ema_steady_rmse(s: float, alpha: float) -> float:
    """Stationary standard deviation of an EMA over i.i.d. Bernoulli(s) inputs."""
    return (alpha / (2 - alpha) * s * (1 - s)) ** 0.5
