"""The Grenander estimator of a nonincreasing density on (0, inf)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .majorant import Majorant, StepFunction, lcm, slope

__all__ = ["GrenanderEstimate", "ecdf", "fit", "eval_density", "sup_relative_error"]


def _as_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("sample is empty")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("observations must be finite and > 0")
    return x


def ecdf(sample) -> StepFunction:
    """Empirical distribution function; ties give steps of height k/n."""
    x = _as_sample(sample)
    knots, counts = np.unique(x, return_counts=True)
    return StepFunction(knots, np.cumsum(counts) / x.size)


@dataclass(frozen=True)
class GrenanderEstimate:
    n: int
    knots: np.ndarray
    majorant: Majorant

    @property
    def support_max(self) -> float:
        return float(self.knots[-1])

    @property
    def breakpoints(self) -> np.ndarray:
        return self.majorant.vertices_x

    @property
    def levels(self) -> np.ndarray:
        return self.majorant.slopes

    def __call__(self, x, side: str = "right"):
        return slope(self.majorant, x, side)

    def at_zero(self) -> float:
        """The estimator at zero, f_n(0+)."""
        return float(self.majorant.slopes[0])

    def mass(self) -> float:
        return float(np.sum(self.majorant.slopes * np.diff(self.majorant.vertices_x)))


def fit(sample) -> GrenanderEstimate:
    """Fit the Grenander estimator: derivative of the LCM of the empirical cdf."""
    F = ecdf(sample)
    return GrenanderEstimate(n=int(np.asarray(sample).size), knots=F.knots, majorant=lcm(F))


def eval_density(est: GrenanderEstimate, x, side: str = "right"):
    return slope(est.majorant, x, side)


def sup_relative_error(est: GrenanderEstimate, family, c_upper: float) -> float:
    """``sup_{0 < x <= c_upper} |f_n(x) / f0(x) - 1|`` for the right-continuous estimator.

    ``family`` is anything with a ``density`` method, or a plain callable. The
    true density must be nonincreasing and positive on ``(0, c_upper]``; its
    value at 0 is taken as the limit from the right (possibly infinite).
    On each constant piece of the estimator the ratio is monotone, so the sup
    is attained at (one-sided limits at) piece endpoints. This is the
    essential sup: the value of the estimator at the single point
    ``c_upper`` is ignored, so a window ending at the largest observation
    sees the last level rather than the zero beyond it.
    """
    if not c_upper > 0:
        raise ValueError("c_upper must be > 0")
    f0 = family.density if hasattr(family, "density") else family
    cuts = est.breakpoints[(est.breakpoints > 0) & (est.breakpoints < c_upper)]
    left = np.concatenate(([0.0], cuts))
    right = np.append(cuts, c_upper)
    level = slope(est.majorant, left, "right")

    d_left = np.array([f0(a) for a in left], dtype=float)
    d_right = np.array([f0(b) for b in right], dtype=float)
    if np.any(d_right <= 0) or np.any(~np.isfinite(d_right)):
        raise ValueError("true density must be positive and finite on (0, c_upper]")

    with np.errstate(divide="ignore", invalid="ignore"):
        r_left = np.where(np.isinf(d_left), 0.0, level / d_left)
    r_right = level / d_right
    return float(max(np.abs(r_left - 1).max(), np.abs(r_right - 1).max()))
