"""Threshold calibration: A = |log beta|, B = inverse Erlang(1, K) survival at alpha."""

import math

import numpy as np
from scipy.optimize import bisect
from scipy.special import gammaln, logsumexp

from src.models.thresholds import Thresholds
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Absolute tolerance of the bisection in x
X_TOLERANCE = 1e-12


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int | np.integer) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")


def log_erlang_survival(x: float, k: int) -> float:
    """Return log F(x) with F(x) = exp(-x) * sum_{j<k} x^j / j!.

    The sum is evaluated as a log-sum-exp over j*log(x) - log(j!) so that
    large x or k never overflow.

    Raises:
        DomainError: If x < 0 (or NaN) or k < 1.
    """
    _check_k(k)
    if not x >= 0.0:
        raise DomainError(f"x must be non-negative, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return -math.inf
    j = np.arange(k, dtype=float)
    return float(-x + logsumexp(j * math.log(x) - gammaln(j + 1.0)))


def erlang_survival(x: float, k: int) -> float:
    """Survival function of the Erlang(1, k) distribution (sum of k unit exponentials).

    Args:
        x: Point at which to evaluate, x >= 0.
        k: Number of exponential summands, k >= 1.

    Returns:
        F(x) in [0, 1], strictly decreasing in x; 0 at x = inf.

    Raises:
        DomainError: If x < 0 or k < 1.
    """
    return math.exp(log_erlang_survival(x, k))


def invert_erlang_survival(alpha: float, k: int) -> float:
    """Return B with F(B) = alpha.

    The bracket starts at [0, max(1, |log alpha|)] and doubles its upper end
    until F drops below alpha; bisection on log F then narrows it to
    ``X_TOLERANCE``.

    Raises:
        DomainError: If alpha is outside (0, 1) or k < 1.
    """
    _check_k(k)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    log_alpha = math.log(alpha)

    def gap(x: float) -> float:
        return log_erlang_survival(x, k) - log_alpha

    low, high = 0.0, max(1.0, abs(log_alpha))
    while gap(high) > 0.0:
        low, high = high, 2.0 * high
    if gap(high) == 0.0:
        return high
    return float(bisect(gap, low, high, xtol=X_TOLERANCE, maxiter=500))


def calibrate(alpha: float, beta: float, k: int) -> Thresholds:
    """Compute the thresholds (A, B) guaranteeing error probabilities alpha and beta.

    Args:
        alpha: Target type-I error probability, in (0, 1).
        beta: Target type-II error probability, in (0, 1).
        k: Number of sensors.

    Returns:
        Thresholds with a = |log beta| and b = F^-1(alpha).

    Raises:
        DomainError: If any argument is out of range.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    thresholds = Thresholds(a=abs(math.log(beta)), b=invert_erlang_survival(alpha, k))
    logger.debug(
        "Calibrated alpha=%g beta=%g k=%d -> A=%.9g B=%.9g",
        alpha,
        beta,
        k,
        thresholds.a,
        thresholds.b,
    )
    return thresholds


def threshold_ratio(alpha: float, k: int) -> float:
    """Ratio B_alpha / |log alpha|, which tends to 1 as alpha -> 0."""
    return invert_erlang_survival(alpha, k) / abs(math.log(alpha))
