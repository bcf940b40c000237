"""Least concave majorants of step functions and the argmax (switching) functionals.

A :class:`StepFunction` is a right-continuous nondecreasing step path on
``[0, inf)`` that stays flat after its last knot. Its least concave majorant
is the upper hull of ``(0, origin)`` and the knot points, continued with slope
zero past the last vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StepFunction",
    "Majorant",
    "SwitchingReport",
    "lcm",
    "slope",
    "argmax_affine",
    "verify_switching",
    "hull_walk",
]

COLLINEAR_RTOL = 1e-12


def _side(side: str) -> str:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return side


@dataclass(frozen=True)
class StepFunction:
    knots: np.ndarray
    values: np.ndarray
    origin: float = 0.0

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float, ndmin=1)
        values = np.array(self.values, dtype=float, ndmin=1)
        if knots.shape != values.shape or knots.ndim != 1:
            raise ValueError("knots and values must be 1-d and of equal length")
        if knots.size == 0:
            raise ValueError("a step function needs at least one knot")
        if not np.all(np.isfinite(knots)) or not np.all(np.isfinite(values)):
            raise ValueError("knots and values must be finite")
        if knots[0] < 0 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be >= 0 and strictly increasing")
        if np.any(np.diff(values) < 0) or values[0] < self.origin:
            raise ValueError("values must be nondecreasing (starting from origin)")
        knots.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", float(self.origin))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.knots, x, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], self.origin)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Majorant:
    """Piecewise-linear concave majorant.

    ``vertices_x``/``vertices_y`` hold the hull vertices (the first is always at
    x = 0); ``slopes[i]`` is the slope on ``[vertices_x[i], vertices_x[i+1]]``
    and ``terminal_slope`` applies past the last vertex.
    """

    vertices_x: np.ndarray
    vertices_y: np.ndarray
    slopes: np.ndarray
    terminal_slope: float = 0.0

    @property
    def vertices(self) -> list[tuple[float, float]]:
        return list(zip(self.vertices_x.tolist(), self.vertices_y.tolist()))

    def all_slopes(self) -> np.ndarray:
        return np.append(self.slopes, self.terminal_slope)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xs, ys = self.vertices_x, self.vertices_y
        inside = np.interp(x, xs, ys)
        out = np.where(x > xs[-1], ys[-1] + self.terminal_slope * (x - xs[-1]), inside)
        return float(out) if out.ndim == 0 else out


def _upper_hull(xs: np.ndarray, ys: np.ndarray) -> list[int]:
    # monotone chain over points already sorted by x
    hull: list[int] = []
    for k in range(len(xs)):
        xk, yk = xs[k], ys[k]
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            dxj, dyj = xs[j] - xs[i], ys[j] - ys[i]
            dxk, dyk = xk - xs[i], yk - ys[i]
            cross = dxj * dyk - dyj * dxk
            scale = abs(dxj * dyk) + abs(dyj * dxk)
            # j lies on or below the chord i -> k
            if cross >= -COLLINEAR_RTOL * scale:
                hull.pop()
            else:
                break
        hull.append(k)
    return hull


def lcm(step: StepFunction) -> Majorant:
    """Least concave majorant of ``step`` on ``[0, inf)``."""
    xs = np.concatenate(([0.0], step.knots))
    ys = np.concatenate(([step.origin], step.values))
    if step.knots[0] == 0.0:
        # a knot at zero overrides the origin value (right-continuity)
        xs, ys = xs[1:], ys[1:]
    idx = _upper_hull(xs, ys)
    # the flat tail absorbs trailing segments of slope zero
    while len(idx) >= 2 and ys[idx[-1]] <= ys[idx[-2]]:
        idx.pop()
    hx, hy = xs[idx], ys[idx]
    return Majorant(hx, hy, np.diff(hy) / np.diff(hx), 0.0)


def slope(m: Majorant, x, side: str = "right"):
    """One-sided derivative of the majorant at ``x``."""
    side = _side(side)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    if side == "left" and np.any(x == 0):
        raise ValueError("the left derivative is undefined at x = 0")
    seg = np.searchsorted(m.vertices_x, x, side="right" if side == "right" else "left") - 1
    out = m.all_slopes()[np.minimum(seg, len(m.slopes))]
    return float(out) if out.ndim == 0 else out


def argmax_affine(step: StepFunction, y, side: str = "right"):
    """Leftmost (``side='left'``) or rightmost maximizer of ``x -> step(x) - y x``.

    Maximizers lie in ``{0} ∪ knots`` because the objective decreases between
    knots when ``y > 0``.
    """
    side = _side(side)
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise ValueError("unbounded argmax: y must be > 0")
    xs = np.concatenate(([0.0], step.knots))
    ys = np.concatenate(([step.origin], step.values))
    vals = ys[None, :] - np.atleast_1d(y)[:, None] * xs[None, :]
    top = vals.max(axis=1, keepdims=True)
    tol = COLLINEAR_RTOL * (1.0 + np.abs(ys).max() + np.abs(vals).max(axis=1, keepdims=True))
    hit = vals >= top - tol
    if side == "left":
        pos = hit.argmax(axis=1)
    else:
        pos = hit.shape[1] - 1 - hit[:, ::-1].argmax(axis=1)
    out = xs[pos]
    return float(out[0]) if y.ndim == 0 else out


@dataclass
class SwitchingReport:
    n_x: int
    n_y: int
    pairs_checked: int
    s1_violations: int
    s2_violations: int
    naive_failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.s1_violations == 0 and self.s2_violations == 0


def verify_switching(step: StepFunction, x_grid, y_grid) -> SwitchingReport:
    """Check both switching relations on every (x, y) grid pair.

    S1: ``slope_left(x) < y  <=>  argmax_right(y) < x``
    S2: ``slope_right(x) <= y <=>  argmax_left(y) <= x``

    Also records the pairs where the weak/weak relation
    ``slope_left(x) <= y <=> argmax_right(y) <= x`` fails.
    """
    x = np.asarray(x_grid, dtype=float).ravel()
    y = np.asarray(y_grid, dtype=float).ravel()
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise ValueError("grids must hold positive values")
    m = lcm(step)
    fl = slope(m, x, "left")[:, None]
    fr = slope(m, x, "right")[:, None]
    kr = np.atleast_1d(argmax_affine(step, y, "right"))[None, :]
    kl = np.atleast_1d(argmax_affine(step, y, "left"))[None, :]
    X, Y = x[:, None], y[None, :]
    # slopes are ratios of differences; compare them to y with the same
    # tie tolerance that argmax_affine uses, so exact ties are not split
    tol = COLLINEAR_RTOL * np.maximum(1.0, np.abs(Y))

    s1 = (fl < Y - tol) != (kr < X)
    s2 = (fr <= Y + tol) != (kl <= X)
    lhs, rhs = fl <= Y + tol, kr <= X
    naive = lhs != rhs
    witnesses = [
        {"x": float(x[i]), "y": float(y[j]), "lhs": bool(lhs[i, j]), "rhs": bool(rhs[i, j])}
        for i, j in zip(*np.nonzero(naive))
    ]
    return SwitchingReport(
        n_x=x.size,
        n_y=y.size,
        pairs_checked=x.size * y.size,
        s1_violations=int(s1.sum()),
        s2_violations=int(s2.sum()),
        naive_failures=witnesses,
    )


def hull_walk(xs: np.ndarray, ys: np.ndarray, stop_x: float, origin=(0.0, 0.0)):
    """Upper-hull vertices of ``origin`` plus the points ``(xs, ys)``, walked
    left to right until the first vertex strictly beyond ``stop_x``.

    Gift-wrapping variant of :func:`lcm` for long point sets when only the
    hull near the origin is needed. ``xs`` must be strictly increasing and
    greater than ``origin[0]``. Returns ``(vx, vy, idx)`` where ``idx`` are
    the point indices of the vertices after the origin.
    """
    x0, y0 = origin
    vx, vy, idx = [x0], [y0], []
    start = 0
    n = len(xs)
    while start < n and x0 <= stop_x:
        sl = (ys[start:] - y0) / (xs[start:] - x0)
        top = sl.max()
        # farthest of the (near-)tied points: collinear vertices are merged
        k = start + int(np.flatnonzero(sl >= top - COLLINEAR_RTOL * abs(top))[-1])
        x0, y0 = xs[k], ys[k]
        vx.append(x0)
        vy.append(y0)
        idx.append(k)
        start = k + 1
    return np.array(vx), np.array(vy), np.array(idx, dtype=int)
