"""Sampling families with nonincreasing densities and their behaviour at zero.

Each family knows its density, cdf, quantile function, sampler, tail profile
(extreme-value exponent gamma and growth constants) and normalizing sequence
``a_n`` with ``n F(a_n) -> 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .special import subbotin_isf, subbotin_pdf, subbotin_sf, upper_gamma

__all__ = [
    "TailProfile",
    "Family",
    "Uniform",
    "BetaType",
    "GammaMixture",
    "SubbotinMixture",
    "Lehmann",
    "parse_family",
    "invert_cdf",
    "validate_gnedenko",
]


@dataclass(frozen=True)
class TailProfile:
    """Growth of the density at zero.

    ``growth`` is one of ``G0`` (bounded), ``G1`` (``C1 log(1/x)**beta``),
    ``G2`` (``C2 x**-alpha``) or ``RV`` (regularly varying cdf with index 1 and
    no closed-form constant).
    """

    gamma: float
    growth: str
    alpha: float = 0.0
    beta: float = 0.0
    C1: float | None = None
    C2: float | None = None

    @property
    def C2_tilde(self) -> float | None:
        if self.C2 is None:
            return None
        return (self.C2 / (1.0 - self.alpha)) ** (1.0 / (1.0 - self.alpha))


def invert_cdf(cdf, u, lo: float, hi: float, pdf=None, log_scale: bool = True):
    """Vectorized bracketed bisection for ``cdf(x) = u`` on ``(lo, hi)``, then one Newton step.

    Bisects on ``log x`` when ``log_scale`` so deep lower-tail quantiles keep
    relative precision. The Newton step is discarded if it leaves the bracket.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("u must lie in (0, 1)")
    shape = u.shape
    u = u.ravel()
    if log_scale:
        a = np.full(u.shape, math.log(lo) if lo > 0 else -745.0)
        b = np.full(u.shape, math.log(hi))
        to_x = np.exp
    else:
        a = np.full(u.shape, float(lo))
        b = np.full(u.shape, float(hi))
        to_x = lambda t: t  # noqa: E731
    for _ in range(200):
        mid = 0.5 * (a + b)
        below = cdf(to_x(mid)) < u
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
        xa, xb = to_x(a), to_x(b)
        if np.all(xb - xa <= 1e-14 * np.maximum(np.abs(xb), 1e-300)):
            break
    x = to_x(0.5 * (a + b))
    if pdf is not None:
        d = pdf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0, (cdf(x) - u) / d, 0.0)
        cand = x - step
        ok = np.isfinite(cand) & (cand >= to_x(a)) & (cand <= to_x(b))
        x = np.where(ok, cand, x)
    return x.reshape(shape)


class Family:
    """Base class; subclasses define ``_pdf``, ``_cdf`` on the interior of the support."""

    kind = "family"
    support = (0.0, 1.0)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        if np.any(x < lo) or np.any(x > hi) or np.any(np.isnan(x)):
            raise ValueError(f"x outside the support {self.support} of {self}")
        return x

    def density(self, x):
        """Density; at x = 0 returns the right limit (``inf`` when unbounded)."""
        x = self._check(x)
        out = self._pdf(x)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x = self._check(x)
        out = self._cdf(x)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        out = invert_cdf(self._cdf, u, 1e-300, self.support[1], pdf=self._pdf)
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        u = rng.random(n)
        u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
        return np.atleast_1d(self.quantile(u))

    def tail_profile(self) -> TailProfile:
        raise NotImplementedError

    def normalizing_sequence(self, n: int) -> float:
        """``a_n`` with ``n F(a_n) -> 1``; the default uses the G2 closed form."""
        if n < 2:
            raise ValueError("n must be >= 2")
        tp = self.tail_profile()
        return 1.0 / (tp.C2_tilde * n ** (1.0 / (1.0 - tp.alpha)))

    def spec_string(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, repr=False)
class Uniform(Family):
    kind = "uniform"

    def __repr__(self):
        return "Uniform()"

    def _pdf(self, x):
        return np.ones_like(x)

    def _cdf(self, x):
        return x.copy()

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u < 1))):
            raise ValueError("u must lie in (0, 1)")
        return float(u) if u.ndim == 0 else u.copy()

    def tail_profile(self):
        return TailProfile(gamma=1.0, growth="G0", C1=1.0, C2=1.0)

    def normalizing_sequence(self, n):
        if n < 2:
            raise ValueError("n must be >= 2")
        return 1.0 / n

    def spec_string(self):
        return "uniform"


@dataclass(frozen=True)
class BetaType(Family):
    """``x**-a (1 - x) / B(1 - a, 2)`` on (0, 1]."""

    a: float
    kind = "beta"

    def __post_init__(self):
        if not (0 <= self.a < 1):
            raise ValueError("beta family needs a in [0, 1)")

    def _pdf(self, x):
        a = self.a
        with np.errstate(divide="ignore"):
            return (1 - a) * (2 - a) * x ** (-a) * (1 - x)

    def _cdf(self, x):
        a = self.a
        return (2 - a) * x ** (1 - a) - (1 - a) * x ** (2 - a)

    def tail_profile(self):
        a = self.a
        C2 = (1 - a) * (2 - a)  # 1 / B(1 - a, 2)
        if a == 0:
            return TailProfile(gamma=1.0, growth="G0", C1=C2, C2=C2)
        return TailProfile(gamma=1 - a, growth="G2", alpha=a, C2=C2)

    def spec_string(self):
        return f"beta:a={self.a!r}"


@dataclass(frozen=True)
class GammaMixture(Family):
    """Scale mixture of uniforms ``U(0, Y)`` with ``Y ~ Gamma(c, 1)``.

    ``f(x) = Gamma(c-1, x) / Gamma(c)`` and ``F(x) = P(c, x) + x f(x)``.
    """

    c: float
    kind = "gammamix"
    support = (0.0, math.inf)

    def __post_init__(self):
        if not (0 < self.c <= 1):
            raise ValueError("gamma mixture needs c in (0, 1]")

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        pos = x > 0
        out[pos] = upper_gamma(self.c - 1.0, x[pos]) / math.gamma(self.c)
        return out if out.ndim else out[()]

    def _cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        pos = x > 0
        xp = x[pos]
        fin = np.isfinite(xp)
        vals = np.ones(xp.shape)
        vals[fin] = sc.gammainc(self.c, xp[fin]) + xp[fin] * self._pdf(xp[fin])
        out[pos] = np.minimum(vals, 1.0)
        return out if out.ndim else out[()]

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        hi = 2.0
        umax = float(np.max(u)) if u.size else 0.5
        while self._cdf(np.array(hi)) <= umax and hi < 1e4:
            hi *= 2.0
        out = invert_cdf(self._cdf, u, 1e-300, hi, pdf=self._pdf)
        return float(out) if out.ndim == 0 else out

    def sample(self, n, rng):
        if n < 1:
            raise ValueError("n must be >= 1")
        c = self.c
        # Gamma(c) = Gamma(c + 1) * U**(1/c)
        y = rng.standard_gamma(c + 1.0, n) * rng.random(n) ** (1.0 / c)
        x = y * rng.random(n)
        return np.where(x > 0, x, np.nextafter(0.0, 1.0))

    def tail_profile(self):
        c = self.c
        if c == 1.0:
            return TailProfile(gamma=1.0, growth="G1", beta=1.0, C1=1.0)
        alpha = 1.0 - c
        return TailProfile(gamma=c, growth="G2", alpha=alpha, C2=1.0 / (alpha * math.gamma(1 - alpha)))

    def normalizing_sequence(self, n):
        if n < 2:
            raise ValueError("n must be >= 2")
        if self.c == 1.0:
            return 1.0 / (n * math.log(n))
        return super().normalizing_sequence(n)

    def spec_string(self):
        return f"gammamix:c={self.c!r}"


@dataclass(frozen=True)
class SubbotinMixture(Family):
    """``Y = 1 - Phi_r(X)`` for ``X ~ (1 - eps) Phi_r + eps Phi_r(. - mu)``."""

    r: float
    eps: float
    mu: float
    kind = "subbotin"

    def __post_init__(self):
        if not self.r >= 1 or not (0 < self.eps < 1) or not self.mu > 0:
            raise ValueError("subbotin mixture needs r >= 1, eps in (0, 1), mu > 0")

    def _z(self, y):
        y = np.asarray(y, dtype=float)
        inner = (y > 0) & (y < 1)
        z = np.where(y <= 0, np.inf, -np.inf)
        z[inner] = subbotin_isf(y[inner], self.r)
        return z

    def _pdf(self, y):
        r, eps, mu = self.r, self.eps, self.mu
        z = self._z(y)
        with np.errstate(invalid="ignore", over="ignore"):
            expo = -(np.abs(z - mu) ** r - np.abs(z) ** r) / r
            if r == 1.0:
                expo = np.where(np.isposinf(z), mu, expo)
            else:
                expo = np.where(np.isposinf(z), np.inf, expo)
            expo = np.where(np.isneginf(z), -np.inf, expo)
            out = 1 - eps + eps * np.exp(expo)
        return out if out.ndim else out[()]

    def _cdf(self, y):
        y = np.asarray(y, dtype=float)
        z = self._z(y)
        with np.errstate(invalid="ignore"):
            tail = np.where(np.isfinite(z), subbotin_sf(np.where(np.isfinite(z), z - self.mu, 0.0), self.r),
                            np.where(np.isposinf(z), 0.0, 1.0))
        out = (1 - self.eps) * y + self.eps * tail
        return out if out.ndim else out[()]

    def quantile(self, u):
        # invert in z = Phi_r^{-1}(1 - y): (1-eps) S(z) + eps S(z - mu) = u is
        # decreasing in z and bracketed by [S^{-1}(u), S^{-1}(u) + mu];
        # Newton steps that leave the bracket fall back to bisection
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u < 1))):
            raise ValueError("u must lie in (0, 1)")
        r, eps, mu = self.r, self.eps, self.mu
        uu = np.atleast_1d(u).ravel()
        lo = np.atleast_1d(subbotin_isf(uu, r)).astype(float)
        hi = lo + mu
        z = 0.5 * (lo + hi)
        for _ in range(200):
            val = (1 - eps) * subbotin_sf(z, r) + eps * subbotin_sf(z - mu, r) - uu
            lo = np.where(val > 0, z, lo)
            hi = np.where(val > 0, hi, z)
            dens = (1 - eps) * subbotin_pdf(z, r) + eps * subbotin_pdf(z - mu, r)
            with np.errstate(divide="ignore", invalid="ignore"):
                nz = z + val / dens
            bad = ~np.isfinite(nz) | (nz < lo) | (nz > hi)
            nz = np.where(bad, 0.5 * (lo + hi), nz)
            # residual at rounding level, or the step has stalled
            done = (np.abs(val) <= 1e-15) | (np.abs(nz - z) <= 1e-15 * np.maximum(1.0, np.abs(z)))
            z = nz
            if np.all(done):
                break
        y = np.atleast_1d(subbotin_sf(z, r)).reshape(u.shape)
        return float(y) if y.ndim == 0 else y

    def tail_profile(self):
        if self.r == 1.0:
            C1 = 1 - self.eps + self.eps * math.exp(self.mu)
            return TailProfile(gamma=1.0, growth="G0", C1=C1, C2=C1)
        return TailProfile(gamma=1.0, growth="RV")

    def normalizing_sequence(self, n, rule: str = "inverse"):
        """``a_n`` for the transformed mixture.

        ``rule="inverse"`` solves ``G(a_n) = 1/n`` exactly; ``rule="approx"``
        drops the ``(1 - eps) a_n`` term, giving
        ``1 - Phi_r(Phi_r^{-1}(1 - 1/(n eps)) + mu)``. Both agree to first order
        and coincide with the closed form when r = 1.
        """
        if n < 2:
            raise ValueError("n must be >= 2")
        if rule not in ("inverse", "approx"):
            raise ValueError("rule must be 'inverse' or 'approx'")
        r, eps, mu = self.r, self.eps, self.mu
        if r == 1.0:
            return 1.0 / (n * (1 - eps + eps * math.exp(mu)))
        if n * eps <= 1:
            raise ValueError("subbotin normalizing sequence needs n * eps > 1")
        if rule == "approx":
            return float(subbotin_sf(subbotin_isf(1.0 / (n * eps), r) + mu, r))
        return float(self.quantile(1.0 / n))

    def spec_string(self):
        return f"subbotin:r={self.r!r},eps={self.eps!r},mu={self.mu!r}"


@dataclass(frozen=True)
class Lehmann(Family):
    """``G(y) = (1 - eps) y + eps y**gl`` on (0, 1]."""

    gl: float
    eps: float
    kind = "lehmann"

    def __post_init__(self):
        if not (0 < self.gl < 1) or not (0 < self.eps < 1):
            raise ValueError("lehmann family needs gl in (0, 1) and eps in (0, 1)")

    def _pdf(self, y):
        with np.errstate(divide="ignore"):
            return (1 - self.eps) + self.eps * self.gl * y ** (self.gl - 1)

    def _cdf(self, y):
        return (1 - self.eps) * y + self.eps * y**self.gl

    def tail_profile(self):
        return TailProfile(gamma=self.gl, growth="G2", alpha=1 - self.gl, C2=self.eps * self.gl)

    def spec_string(self):
        return f"lehmann:gl={self.gl!r},eps={self.eps!r}"


_PARAMS = {
    "uniform": (Uniform, ()),
    "beta": (BetaType, ("a",)),
    "gammamix": (GammaMixture, ("c",)),
    "subbotin": (SubbotinMixture, ("r", "eps", "mu")),
    "lehmann": (Lehmann, ("gl", "eps")),
}


def parse_family(text: str) -> Family:
    """Parse ``uniform``, ``beta:a=0.5``, ``gammamix:c=0.5``,
    ``subbotin:r=2,eps=0.1,mu=1`` or ``lehmann:gl=0.5,eps=0.1``."""
    name, _, rest = text.strip().partition(":")
    if name not in _PARAMS:
        raise ValueError(f"unknown family {name!r}")
    cls, keys = _PARAMS[name]
    kwargs = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key.strip() not in keys:
            raise ValueError(f"bad parameter {item!r} for family {name!r}")
        kwargs[key.strip()] = float(val)
    missing = set(keys) - set(kwargs)
    if missing:
        raise ValueError(f"family {name!r} is missing {sorted(missing)}")
    return cls(**kwargs)


def validate_gnedenko(fam: Family, n: int, x_grid) -> float:
    """``max_x |n F(a_n x) - x**gamma|`` over the grid."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0):
        raise ValueError("grid must be positive")
    an = fam.normalizing_sequence(n)
    g = fam.tail_profile().gamma
    return float(np.max(np.abs(n * np.atleast_1d(fam.cdf(an * x)) - x**g)))
