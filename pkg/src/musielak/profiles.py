"""Reference function profiles used by experiments and tests.

Each factory returns a callable on position arrays of shape (M, dim).
"""

from __future__ import annotations

import numpy as np

from .exceptions import ParameterError

__all__ = ["tent", "bump", "windowed_constant", "kovacik_f", "linear"]


def tent(center=-2.0, halfwidth=1.0, height=1.0):
    """Piecewise-linear cone: height * max(0, 1 - |x - center| / halfwidth).

    In one dimension this is the classic tent; in higher dimensions the
    profile is radial in the Euclidean norm.
    """
    if halfwidth <= 0:
        raise ParameterError("tent halfwidth must be positive")
    center = np.atleast_1d(np.asarray(center, dtype=float))

    def fn(points):
        points = np.asarray(points, dtype=float)
        d = np.sqrt(np.sum((points - center[None, :]) ** 2, axis=1))
        return height * np.maximum(0.0, 1.0 - d / halfwidth)

    return fn


def bump(center=0.0, radius=1.0, scale=1.0):
    """Smooth compactly supported bump: scale * exp(-1 / (1 - rho^2))."""
    if radius <= 0:
        raise ParameterError("bump radius must be positive")
    center = np.atleast_1d(np.asarray(center, dtype=float))

    def fn(points):
        points = np.asarray(points, dtype=float)
        rho2 = np.sum((points - center[None, :]) ** 2, axis=1) / (radius * radius)
        out = np.zeros(points.shape[0])
        inside = rho2 < 1.0
        out[inside] = scale * np.exp(-1.0 / (1.0 - rho2[inside]))
        return out

    return fn


def windowed_constant(lo, hi, value=1.0):
    """Indicator of the half-open box [lo, hi) times a constant.

    The half-open convention makes the discrete measure of the window exact
    on grids whose nodes land on the endpoints: exactly (hi - lo) / h cells
    of nodes carry the value.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if np.any(lo >= hi):
        raise ParameterError("window needs lo < hi componentwise")

    def fn(points):
        points = np.asarray(points, dtype=float)
        inside = np.all((points >= lo[None, :]) & (points < hi[None, :]), axis=1)
        return np.where(inside, float(value), 0.0)

    return fn


def kovacik_f(d, cap):
    """The profile x**(-1/d) on (0, 1), capped below ``cap`` and zero elsewhere.

    One-dimensional.  The singularity at 0 is truncated at ``cap`` (typically
    the smallest positive node of the sampling grid) so that node values stay
    finite while refinement still sees the blow-up grow without bound.
    """
    if d <= 1 or cap <= 0 or cap >= 1:
        raise ParameterError("need d > 1 and 0 < cap < 1")
    cap_value = cap ** (-1.0 / d)

    def fn(points):
        points = np.asarray(points, dtype=float)
        x = points[:, 0]
        out = np.zeros_like(x)
        mid = (x >= cap) & (x < 1.0)
        out[mid] = x[mid] ** (-1.0 / d)
        low = (x >= 0.0) & (x < cap)
        out[low] = cap_value
        return out

    return fn


def linear(slope, offset=0.0):
    """Affine profile slope . x + offset (useful as a smoothing fixed point)."""
    slope = np.atleast_1d(np.asarray(slope, dtype=float))

    def fn(points):
        points = np.asarray(points, dtype=float)
        return points @ slope + offset

    return fn
