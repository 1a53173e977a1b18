"""Exponent calculus linking two-endpoint scale bounds to sparse-form gains.

A scale family with an l2-type bound decaying like 2**(-a k) and an l1-type
bound growing like 2**(b k) interpolates, at averaging exponent r, to a
per-scale constant 2**(-eta(r) k); the gain eta(r) is positive exactly
above the critical index r0.  For the random transform model the endpoint
pair is (a, b) = ((1 - alpha)/2, alpha) and r0 = 1 + alpha.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EndpointPair",
    "random_model_endpoints",
    "critical_index",
    "gain_exponent",
    "weighted_exponents",
    "WeightedExponentReport",
    "fit_log2_slope",
]


@dataclass(frozen=True)
class EndpointPair:
    """Gain exponent of the l2-type bound and growth exponent of the l1-type."""

    gain: float  # a > 0
    growth: float  # b >= 0

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError(f"gain exponent must be positive, got {self.gain}")
        if self.growth < 0:
            raise ValueError(f"growth exponent must be >= 0, got {self.growth}")


def random_model_endpoints(alpha: float) -> EndpointPair:
    """Endpoint pair of the random transform scale blocks at parameter alpha."""
    if not 0 < alpha < 1:
        raise ValueError(f"need 0 < alpha < 1, got {alpha}")
    return EndpointPair(gain=(1.0 - alpha) / 2.0, growth=alpha)


def critical_index(pair: EndpointPair) -> tuple[float, float]:
    """Interpolation parameter theta0 balancing the endpoints, and its r0.

    theta0 solves (1 - theta0) * b = theta0 * a; the averaging exponent is
    1/r0 = (1 - theta0) + theta0 / 2.  Above r0 the interpolated constant
    gains a positive power per scale.
    """
    theta0 = pair.growth / (pair.gain + pair.growth)
    r0 = 1.0 / ((1.0 - theta0) + theta0 / 2.0)
    return theta0, r0


def gain_exponent(pair: EndpointPair, r: float) -> float:
    """Signed per-scale exponent eta(r) = theta a - (1 - theta) b.

    theta = 2(r - 1)/r is the interpolation parameter reaching the pair
    (r, r'); eta is positive exactly for r above the critical index.
    """
    if not 1 < r < 2:
        raise ValueError(f"need 1 < r < 2, got {r}")
    theta = 2.0 * (r - 1.0) / r
    return theta * pair.gain - (1.0 - theta) * pair.growth


@dataclass(frozen=True)
class WeightedExponentReport:
    """Characteristic exponents of the weighted operator bounds at index p."""

    p: float
    sparse_exponent: float  # max{1, 1/(p-1)} for the sparse form
    composite_exponent: float | None  # 1 + 1/p for the oscillatory chain, p > 2
    sparse_constant: float
    composite_constant: float | None


def weighted_exponents(p: float, ap_char: float = 1.0) -> WeightedExponentReport:
    """Exponents of the A_p characteristic in the weighted norm bounds."""
    if p <= 1:
        raise ValueError(f"need p > 1, got {p}")
    if ap_char < 1:
        raise ValueError(f"A_p characteristic is always >= 1, got {ap_char}")
    sparse = max(1.0, 1.0 / (p - 1.0))
    composite = 1.0 + 1.0 / p if p > 2 else None
    return WeightedExponentReport(
        p=p,
        sparse_exponent=sparse,
        composite_exponent=composite,
        sparse_constant=ap_char**sparse,
        composite_constant=None if composite is None else ap_char**composite,
    )


def fit_log2_slope(ks, values) -> tuple[float, float]:
    """Least-squares slope and intercept of log2(values) against ks."""
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("slope fit needs positive values")
    slope, intercept = np.polyfit(ks, np.log2(values), 1)
    return float(slope), float(intercept)
