"""Limit objects of the Grenander estimator at zero.

``Y_gamma = sup_{s>0} N(s) / s**(1/gamma)`` for a unit-rate Poisson process N,
its exact distribution function, and simulation of ``h_gamma``: the right
derivative of the least concave majorant of ``t -> N(t**gamma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .majorant import hull_walk

__all__ = [
    "ConvergenceError",
    "YGammaCdfResult",
    "PoissonPath",
    "HGammaControl",
    "HGammaRealization",
    "log_poisson_pmf",
    "ygamma_cdf",
    "ygamma_bounds",
    "sample_poisson_path",
    "sample_ygamma",
    "simulate_hgamma",
    "sup_statistic",
    "sup_statistic_from_pieces",
]


class ConvergenceError(RuntimeError):
    """A series or simulation did not settle within its hard cap."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def log_poisson_pmf(m, k):
    """log of ``exp(-m) m**k / k!``, with ``log p(0; 0) = 0`` and ``log p(0; k>0) = -inf``."""
    m = np.asarray(m, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(m < 0) or np.any(k < 0) or np.any(k != np.floor(k)):
        raise ValueError("need mean m >= 0 and integer count k >= 0")
    out = -m + sc.xlogy(k, m) - sc.gammaln(k + 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class YGammaCdfResult:
    x: float
    gamma: float
    cdf: float
    terms: int
    tail_bound: float
    exact: bool = False


def ygamma_bounds(x, gamma: float):
    """(lower, upper) bounds on P(Y_gamma <= x): the cdfs of 1/U**(1/gamma) and 1/T1**(1/gamma)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        z = x ** (-gamma)
    lo = np.maximum(0.0, 1.0 - z)
    hi = np.exp(-z)
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def _poisson_upper_bound(x: float, gamma: float, peak: float) -> float:
    # P(Y <= x) <= P(T_k >= (k/x)**gamma) = Q(k, (k/x)**gamma) for every k
    kmax = max(2.0, min(4.0 * peak, 1e15))
    k = np.unique(np.floor(np.geomspace(1.0, kmax, 400)))
    return float(np.min(sc.gammaincc(k, (k / x) ** gamma)))


def ygamma_cdf(x: float, gamma: float, tol: float = 1e-10, max_terms: int = 100_000) -> YGammaCdfResult:
    """Exact distribution function of ``Y_gamma`` at ``x``.

    ``gamma == 1`` uses the closed form ``1 - 1/x``. Otherwise
    ``1 - sum_k a_k`` where ``a_k`` is the probability that the process first
    returns to the boundary ``s -> x s**(1/gamma)`` at level ``k``::

        a_k = p(b_k; k) - sum_{i<k} a_i p(b_k - b_i; k - i),   b_k = (k/x)**gamma

    The series is cut at K once ``sum_{k>K} p(b_k; k)`` (which dominates the
    neglected ``a_k``) falls below ``tol``. When a Poisson upper bound on the cdf
    is already below ``tol`` the result is 0 with that bound as ``tail_bound``.
    """
    if not (0 < gamma <= 1):
        raise ValueError("gamma must lie in (0, 1]")
    if not x > 0:
        raise ValueError("x must be > 0")
    if not (0 < tol <= 1e-3):
        raise ValueError("tol must lie in (0, 1e-3]")
    x = float(x)
    if gamma == 1.0:
        return YGammaCdfResult(x, gamma, max(0.0, 1.0 - 1.0 / x), 0, 0.0, exact=True)

    # b_k > k before this index: the boundary is hard to stay under
    log_peak = -gamma / (1.0 - gamma) * math.log(x)
    peak = math.exp(min(log_peak, 700.0))
    ub = _poisson_upper_bound(x, gamma, peak)
    if ub < tol:
        return YGammaCdfResult(x, gamma, 0.0, 0, ub)

    L = 256
    while True:
        if L > 4 * max_terms:
            raise ConvergenceError(
                "Y_gamma series did not converge within the term cap",
                x=x, gamma=gamma, tol=tol, max_terms=max_terms, peak=peak,
            )
        k = np.arange(1, L + 1, dtype=float)
        b = (k / x) ** gamma
        p = np.exp(log_poisson_pmf(b, k))
        if L >= 2 * peak and p[-1] < tol * 1e-3 and p[-1] <= p[-2]:
            break
        L *= 2

    ratio = p[-1] / p[-2] if p[-2] > 0 else 0.0
    rest = p[-1] * ratio / (1.0 - ratio) if ratio < 1 else np.inf
    suffix = np.cumsum(p[::-1])[::-1] - p + rest  # suffix[k-1] = sum_{j>k} p_j
    K = int(np.argmax(suffix < tol)) + 1
    if K > max_terms:
        raise ConvergenceError(
            "Y_gamma series needs more terms than allowed",
            x=x, gamma=gamma, tol=tol, needed=K, max_terms=max_terms,
        )
    b, p = b[:K], p[:K]

    a = np.empty(K)
    lg = sc.gammaln(np.arange(1, K + 1, dtype=float) + 1.0)  # lg[m-1] = log m!
    for j in range(K):
        if j == 0:
            a[0] = p[0]
            continue
        d = b[j] - b[:j]
        m = np.arange(j, 0, -1, dtype=float)
        terms = np.exp(-d + m * np.log(d) - lg[j - 1::-1])
        a[j] = p[j] - np.dot(a[:j], terms)
    cdf = min(1.0, max(0.0, 1.0 - float(a.sum())))
    return YGammaCdfResult(x, gamma, cdf, K, float(suffix[K - 1]))


@dataclass(frozen=True)
class PoissonPath:
    arrivals: np.ndarray
    horizon: float
    stream: object = None

    @property
    def count(self) -> int:
        return int(self.arrivals.size)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.arrivals, prepend=0.0)


def sample_poisson_path(rng: np.random.Generator, count: int | None = None,
                        horizon: float | None = None, stream=None) -> PoissonPath:
    """Unit-rate Poisson arrivals: the first ``count`` of them, or all up to ``horizon``."""
    if (count is None) == (horizon is None):
        raise ValueError("give exactly one of count or horizon")
    if count is not None:
        if count < 0:
            raise ValueError("count must be >= 0")
        t = np.cumsum(rng.standard_exponential(count))
        return PoissonPath(t, float(t[-1]) if count else 0.0, stream)
    if not horizon >= 0:
        raise ValueError("horizon must be >= 0")
    chunks, last = [], 0.0
    size = max(16, int(horizon + 4 * math.sqrt(horizon) + 16))
    while last <= horizon:
        t = last + np.cumsum(rng.standard_exponential(size))
        chunks.append(t)
        last = t[-1]
    t = np.concatenate(chunks)
    return PoissonPath(t[t <= horizon], float(horizon), stream)


class _Arrivals:
    """Growable arrival sequence drawn from one RNG stream."""

    def __init__(self, rng: np.random.Generator, size: int):
        self.rng = rng
        self.t = np.cumsum(rng.standard_exponential(size))

    def grow_to(self, size: int):
        extra = size - self.t.size
        if extra > 0:
            more = self.t[-1] + np.cumsum(self.rng.standard_exponential(extra))
            self.t = np.concatenate((self.t, more))


@dataclass(frozen=True)
class HGammaControl:
    window: int = 1000          # W: consecutive non-threatening arrivals before stopping
    max_doublings: int = 16
    chunk: int = 1024


def _ygamma_settled(t: np.ndarray, gamma: float, ctl: HGammaControl):
    j = np.arange(1, t.size + 1, dtype=float)
    r = np.log(j) - np.log(t) / gamma  # log(j / T_j**(1/gamma))
    last = int(np.argmax(r))
    return math.exp(r[last]), (t.size - 1 - last) >= ctl.window


def sample_ygamma(gamma: float, rng: np.random.Generator, control: HGammaControl | None = None):
    """One draw of ``Y_gamma = max_j j / T_j**(1/gamma)`` under the window stopping rule."""
    ctl = control or HGammaControl()
    arr = _Arrivals(rng, max(ctl.chunk, ctl.window + 1))
    y, done = _ygamma_settled(arr.t, gamma, ctl)
    while not done:
        arr.grow_to(arr.t.size + ctl.chunk)
        y, done = _ygamma_settled(arr.t, gamma, ctl)
    return y


@dataclass
class HGammaRealization:
    """One simulated path of the limit process on ``[0, c]``.

    ``breaks`` are the hull vertices in s-space (``breaks[0] == 0``) up to the
    last one at or below ``c``; ``levels[i]`` is h_gamma on
    ``[breaks[i], breaks[i+1])``, the last level holding up to ``hull_end``,
    the first vertex beyond ``c``.
    """

    gamma: float
    c: float
    jumps: np.ndarray
    breaks: np.ndarray
    levels: np.ndarray
    hull_end: float
    y_gamma: float
    sup_value: float
    sup_location: float
    doublings: int
    diagnostics: dict = field(default_factory=dict)

    def h(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t >= self.hull_end):
            raise ValueError("t outside the simulated window")
        i = np.searchsorted(self.breaks, t, side="right") - 1
        out = self.levels[np.minimum(i, self.levels.size - 1)]
        return float(out) if out.ndim == 0 else out


def simulate_hgamma(gamma: float, c: float, rng: np.random.Generator,
                    control: HGammaControl | None = None) -> HGammaRealization:
    """Simulate ``h_gamma`` on ``[0, c]`` together with ``Y_gamma`` and the sup statistic.

    Arrivals are extended until the Y_gamma stopping rule holds, then doubled
    until the hull vertices up to the first one beyond ``c`` agree across two
    successive doublings.
    """
    if not (0 < gamma <= 1):
        raise ValueError("gamma must lie in (0, 1]")
    if not c > 0:
        raise ValueError("c must be > 0")
    ctl = control or HGammaControl()
    arr = _Arrivals(rng, max(ctl.chunk, ctl.window + 1))
    y, done = _ygamma_settled(arr.t, gamma, ctl)
    while not done:
        arr.grow_to(arr.t.size + ctl.chunk)
        y, done = _ygamma_settled(arr.t, gamma, ctl)

    def walk(size):
        s = arr.t[:size] ** (1.0 / gamma)
        j = np.arange(1, size + 1, dtype=float)
        vx, vy, idx = hull_walk(s, j, c)
        ok = vx[-1] > c and idx[-1] < size - 1
        return vx, vy, idx, ok

    size = arr.t.size
    prev = walk(size)
    doublings = 0
    while True:
        if doublings >= ctl.max_doublings:
            raise ConvergenceError(
                "h_gamma hull did not stabilize on [0, c]",
                gamma=gamma, c=c, arrivals=size, doublings=doublings,
            )
        size *= 2
        arr.grow_to(size)
        doublings += 1
        cur = walk(size)
        if prev[3] and cur[3] and np.array_equal(prev[2], cur[2]):
            break
        prev = cur

    vx, vy, idx, _ = cur
    levels = np.diff(vy) / np.diff(vx)
    breaks = vx[:-1]
    if gamma == 1.0:
        # N(s) - s is recurrent, so every hull slope of the full path is >= 1;
        # a slope below 1 only means the next up-crossing lies beyond the
        # simulated arrivals. Clamp and merge the resulting flat pieces.
        levels = np.maximum(levels, 1.0)
        keep = np.concatenate(([True], levels[1:] != levels[:-1]))
        breaks, levels = breaks[keep], levels[keep]
    value, loc = sup_statistic_from_pieces(breaks, levels, gamma, c)
    return HGammaRealization(
        gamma=gamma, c=c, jumps=arr.t[: idx[-1] + 1] ** (1.0 / gamma),
        breaks=breaks, levels=levels, hull_end=float(vx[-1]), y_gamma=float(levels[0]),
        sup_value=value, sup_location=loc, doublings=doublings,
        diagnostics={"arrivals": int(size)},
    )


def sup_statistic_from_pieces(breaks, levels, gamma: float, c: float):
    """``(value, location)`` of ``sup_{0<t<=c} |t**(1-gamma) h(t) / gamma - 1|``.

    ``h`` is the right-continuous step function equal to ``levels[i]`` on
    ``[breaks[i], breaks[i+1])`` (the last level extends to infinity) with
    ``breaks[0] == 0``. The function is monotone on each piece, so only piece
    endpoints are candidates; the limit ``t -> 0+`` is reported at location 0,
    and ties go to the smallest location.
    """
    breaks = np.asarray(breaks, dtype=float)
    levels = np.asarray(levels, dtype=float)
    if breaks.size != levels.size or breaks[0] != 0:
        raise ValueError("need breaks[0] == 0 and one level per break")
    ends = np.append(breaks[1:], np.inf)
    use = breaks < c
    a, e, h = breaks[use], np.minimum(ends[use], c), levels[use]
    h_at_c = levels[np.searchsorted(breaks, c, side="right") - 1]
    q = 1.0 - gamma

    def g(t, lv):
        return np.abs(t**q * lv / gamma - 1.0)

    if gamma == 1.0:
        loc = np.concatenate((a, [c]))
        val = np.concatenate((np.abs(h - 1.0), [abs(h_at_c - 1.0)]))
    else:
        loc = np.concatenate(([0.0], a[1:], e, [c]))
        val = np.concatenate(([1.0], g(a[1:], h[1:]), g(e, h), [g(c, h_at_c)]))
    order = np.argsort(loc, kind="stable")
    loc, val = loc[order], val[order]
    i = int(np.argmax(val))
    return float(val[i]), float(loc[i])


def sup_statistic(realization: HGammaRealization, c: float | None = None):
    """Sup statistic of a realization over ``[0, c]`` (defaults to its window)."""
    c = realization.c if c is None else c
    if c > realization.c:
        raise ValueError("c exceeds the realization window")
    return sup_statistic_from_pieces(realization.breaks, realization.levels, realization.gamma, c)
