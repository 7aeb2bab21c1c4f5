"""JZS Bayes factor for one-sample and paired t tests.

BF10 is the ratio of the marginal likelihood of t under a Cauchy(0, r) prior
on the standardised effect size to its likelihood under the null. Writing the
Cauchy prior as a normal scale mixture with g ~ InvGamma(1/2, 1/2) gives

    BF10 = ∫ (1 + n g r²)^(-1/2)
             [(1 + t² / ((1 + n g r²) ν)) / (1 + t² / ν)]^(-(ν+1)/2)
             (2π)^(-1/2) g^(-3/2) exp(-1 / (2g)) dg,     ν = n - 1.
"""
import logging
import math
import warnings

import numpy as np
from scipy import integrate

from src.config.config import DEFAULT_CAUCHY_SCALE
from src.exceptions import IntegrationFailure, InvalidArgument, TooFewUnits

logger = logging.getLogger(__name__)

EPS_REL = 1e-8
EPS_ABS = 1e-13


def _log_integrand(g: float, t2: float, n: int, nu: int, r: float) -> float:
    spread = 1.0 + n * g * r * r
    return (
        -0.5 * math.log(spread)
        - 0.5 * (nu + 1) * (math.log1p(t2 / (spread * nu)) - math.log1p(t2 / nu))
        - 0.5 * math.log(2.0 * math.pi)
        - 1.5 * math.log(g)
        - 1.0 / (2.0 * g)
    )


def jzs_integrand(g: float, t: float, n: int, r: float = DEFAULT_CAUCHY_SCALE) -> float:
    if g <= 0.0:
        return 0.0
    return math.exp(_log_integrand(g, t * t, n, n - 1, r))


def jzs_bf10(t: float, n: int, r: float = DEFAULT_CAUCHY_SCALE) -> float:
    """One-sample JZS Bayes factor BF10 by adaptive quadrature over g."""
    if n < 2:
        raise TooFewUnits(n, 2)
    if not r > 0:
        raise InvalidArgument(f"Cauchy scale must be positive, got {r}")
    if not math.isfinite(t):
        raise InvalidArgument("t statistic must be finite")
    total = 0.0
    # Finite head and infinite tail are integrated separately
    for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, error = integrate.quad(jzs_integrand, lo, hi, args=(t, n, r), epsabs=EPS_ABS, epsrel=EPS_REL, limit=200)
            except integrate.IntegrationWarning as exc:
                logger.error(f"JZS quadrature failed for t={t}, n={n}, r={r}: {exc}")
                raise IntegrationFailure(str(exc)) from exc
        if not math.isfinite(value):
            raise IntegrationFailure(f"non-finite integral on [{lo}, {hi}]")
        total += value
    logger.debug(f"JZS BF10(t={t}, n={n}, r={r}) = {total:.6g}")
    return total
