"""Shapiro-Wilk W test of normality, Royston's AS R94 approximation.

The W statistic is the squared correlation between the sorted sample and a
set of weights derived from expected normal order statistics (Blom scores
with Royston's polynomial corrections to the two outermost weights). The
p-value comes from a normal approximation of a transformed W: exact for
n = 3, a three-parameter transform for 4 <= n <= 11 and a log-log transform
for larger samples. Validity range: 3 <= n <= 5000.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = ["SwTestResult", "shapiro_wilk", "UnsupportedSizeError", "ZeroVarianceError"]

N_MIN = 3
N_MAX = 5000

# Royston (1995) polynomial coefficients, highest degree first.
_C1 = (-2.706056, 4.434685, -2.071190, -0.147981, 0.221157, 0.0)
_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)
_C3 = (-0.0006714, 0.025054, -0.39978, 0.544)
_C4 = (-0.0020322, 0.062767, -0.77857, 1.3822)
_C5 = (0.0038915, -0.083751, -0.31082, -1.5861)
_C6 = (0.0030302, -0.082676, -0.4803)
_G = (0.459, -2.273)

_PI6 = 1.90985931710274  # 6/pi
_STQR = 1.04719755119660  # arcsin(sqrt(3/4))


class UnsupportedSizeError(ValueError):
    """Sample size outside the approximation's validity range [3, 5000]."""


class ZeroVarianceError(ValueError):
    """All sample values identical; W is undefined."""


@dataclass(frozen=True)
class SwTestResult:
    """W statistic, p-value, sample size and the rejection decision.

    ``reject`` is evaluated against the threshold the caller supplied
    (``alpha / m`` after a Bonferroni correction; plain ``alpha`` when m=1).
    """

    w: float
    p: float
    n: int
    reject: bool


def _weights(n: int) -> np.ndarray:
    """Full antisymmetric weight vector a, normalized so sum(a^2) ~= 1."""
    n2 = n // 2
    if n == 3:
        half = np.array([np.sqrt(0.5)])
    else:
        # Blom scores of the lower half (all negative).
        m = ndtri((np.arange(1, n2 + 1) - 0.375) / (n + 0.25))
        summ2 = 2.0 * np.dot(m, m)
        ssumm2 = np.sqrt(summ2)
        rsn = 1.0 / np.sqrt(n)
        a1 = np.polyval(_C1, rsn) - m[0] / ssumm2
        half = np.empty(n2)
        if n > 5:
            a2 = np.polyval(_C2, rsn) - m[1] / ssumm2
            fac = np.sqrt(
                (summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                / (1.0 - 2.0 * a1**2 - 2.0 * a2**2)
            )
            half[0], half[1] = a1, a2
            half[2:] = -m[2:] / fac
        else:
            fac = np.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1**2))
            half[0] = a1
            half[1:] = -m[1:] / fac
    a = np.zeros(n)
    a[:n2] = -half
    a[n - n2:] = half[::-1]
    return a


def shapiro_wilk(values: Sequence[float], alpha: float = 0.05) -> SwTestResult:
    """Test a sample against the normal family (location and scale free).

    Parameters
    ----------
    values : sequence of float
        Sample of size 3..5000, not all equal. Order is irrelevant.
    alpha : float
        Significance level for the uncorrected ``reject`` flag.

    Returns
    -------
    SwTestResult
        W in (0, 1], the approximate p-value, and ``reject = p < alpha``.

    Raises
    ------
    UnsupportedSizeError
        When the sample size falls outside [3, 5000].
    ZeroVarianceError
        When every value is identical.
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n < N_MIN or n > N_MAX:
        raise UnsupportedSizeError(f"sample size {n} outside [{N_MIN}, {N_MAX}]")
    if x[-1] - x[0] <= 0.0:
        raise ZeroVarianceError("all values are identical")

    a = _weights(n)
    xc = x - x.mean()
    w = float(np.dot(a, x) ** 2 / np.dot(xc, xc))
    w = min(w, 1.0)

    if n == 3:
        p = _PI6 * (np.arcsin(np.sqrt(w)) - _STQR)
        return SwTestResult(w, float(min(max(p, 0.0), 1.0)), n, bool(p < alpha))

    y = np.log1p(-w)  # log(1 - W)
    if n <= 11:
        gamma = np.polyval(_G, n)
        if y >= gamma:
            return SwTestResult(w, 0.0, n, True)
        y = -np.log(gamma - y)
        mu = np.polyval(_C3, n)
        sigma = np.exp(np.polyval(_C4, n))
    else:
        logn = np.log(n)
        mu = np.polyval(_C5, logn)
        sigma = np.exp(np.polyval(_C6, logn))
    p = float(1.0 - ndtr((y - mu) / sigma))
    return SwTestResult(w, p, n, bool(p < alpha))
