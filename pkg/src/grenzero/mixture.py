"""Mixing weight and contaminating density for ``(1 - eps) U(0, 1) + eps F`` data.

Both come from the Grenander estimator ``g_n`` of the mixture density. The
right-continuous ``g_n`` vanishes on ``(X_(n), 1]``, so the level at the
upper end is read as the left limit at the largest observation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grenander import GrenanderEstimate, fit

__all__ = ["ContaminationEstimate", "estimate_epsilon", "contamination_estimate", "read_sample_csv"]


def _unit_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("sample is empty")
    if np.any(~((x > 0) & (x <= 1))):
        raise ValueError("values must lie in (0, 1]")
    return x


def _anchor_level(est: GrenanderEstimate) -> float:
    return float(est(est.support_max, side="left"))


def estimate_epsilon(sample) -> float:
    """``clip(1 - g_n^L(X_(n)), 0, 1)``."""
    est = fit(_unit_sample(sample))
    return min(1.0, max(0.0, 1.0 - _anchor_level(est)))


@dataclass(frozen=True)
class ContaminationEstimate:
    epsilon_hat: float
    anchor: float
    anchor_level: float
    grenander: GrenanderEstimate

    @property
    def degenerate(self) -> bool:
        return self.epsilon_hat == 0.0

    def density(self, y):
        """``(g_n(y) - g_n^L(anchor)) / epsilon_hat`` on ``(0, anchor)``, zero beyond."""
        if self.degenerate:
            raise ValueError("epsilon_hat is 0: the contaminating density is undefined")
        y = np.asarray(y, dtype=float)
        if np.any(~((y > 0) & (y <= 1))):
            raise ValueError("y must lie in (0, 1]")
        g = np.asarray(self.grenander(y, side="right"))
        out = np.where(y < self.anchor, (g - self.anchor_level) / self.epsilon_hat, 0.0)
        return float(out) if out.ndim == 0 else out


def contamination_estimate(sample) -> ContaminationEstimate:
    est = fit(_unit_sample(sample))
    level = _anchor_level(est)
    eps = min(1.0, max(0.0, 1.0 - level))
    return ContaminationEstimate(eps, est.support_max, level, est)


def read_sample_csv(path) -> np.ndarray:
    """One value per line, no header."""
    values = np.loadtxt(path, delimiter=",", ndmin=1, dtype=float)
    if values.ndim != 1:
        raise ValueError("expected a single column")
    return values
