"""Smoothing operators: translation, smooth cutoff, discrete mollification.

Conventions fixed here and relied on by the approximation pipeline:

* ``translate(u, shift)`` realizes T u(x) = u(x + shift) with the product
  zeroed wherever x or x + shift leaves the domain; shifting by +delta along
  the last axis therefore moves the support by -delta along that axis (into
  a hypograph when delta > 0).  Shifts must be integer multiples of h.
* The cutoff tau_j(x) = psi(|x| - j) uses the standard exponential glue
  psi(t) = phi(1-t) / (phi(1-t) + phi(t)) with phi(t) = exp(-1/t) for t > 0,
  so tau_j is 1 on B_j, 0 outside B_{j+1}, and its radial slope profile is
  the same for every j.
* Mollification convolves with a discrete bump: taps at integer offsets m
  with |m h| < epsilon, weights exp(-1/(1 - |m h / epsilon|^2)) renormalized
  to sum exactly to one, applied in lexicographic tap order.  Constants are
  preserved to rounding and the support inflates by strictly less than
  epsilon.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    AlignmentError,
    DomainError,
    ParameterError,
    ResolutionError,
)
from .grid import FullSpace, GridFunction, Region, _boundary_mask

__all__ = [
    "SmoothingParams",
    "translate",
    "axis_shift",
    "cutoff",
    "cutoff_values",
    "cutoff_slope",
    "mollifier_weights",
    "mollify",
    "inflate",
    "hypograph_margin",
]


@dataclass
class SmoothingParams:
    """The three stage parameters of one approximation run plus its budget."""

    delta: float
    j: int
    epsilon: float
    sigma: float

    def validate(self, h):
        if self.sigma <= 0:
            raise ParameterError("error budget sigma must be positive")
        if self.delta < h * (1.0 - 1e-12):
            raise ResolutionError("translation delta must be at least h")
        if abs(self.delta / h - round(self.delta / h)) > 1e-9:
            raise AlignmentError("delta must be an integer multiple of h")
        if int(self.j) != self.j or self.j < 1:
            raise ParameterError("cutoff index j must be a positive integer")
        if self.epsilon < 2.0 * h * (1.0 - 1e-12):
            raise ResolutionError(
                "mollification radius must be at least 2h"
            )

    def to_dict(self):
        return {
            "delta": self.delta,
            "j": int(self.j),
            "epsilon": self.epsilon,
            "sigma": self.sigma,
        }


def axis_shift(delta, dim, axis=None):
    """Shift vector +delta along one axis (the last one by default)."""
    axis = dim - 1 if axis is None else axis
    shift = [0.0] * dim
    shift[axis] = float(delta)
    return tuple(shift)


def _shift_steps(shift, h, dim):
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    if shift.shape != (dim,):
        raise ParameterError("shift must have one component per axis")
    steps = shift / h
    rounded = np.round(steps)
    if np.any(np.abs(steps - rounded) > 1e-9):
        raise AlignmentError(
            "shift %s is not an integer multiple of h = %g" % (shift, h)
        )
    return rounded.astype(int), shift


def _roll_zero(values, steps):
    """out[idx] = values[idx + steps] with zero fill, any dimension."""
    n = values.shape[0]
    out = np.zeros_like(values)
    src = []
    dst = []
    for k in steps:
        k = int(k)
        if abs(k) >= n:
            return out
        src.append(slice(max(0, k), min(n, n + k)))
        dst.append(slice(max(0, -k), min(n, n - k)))
    out[tuple(dst)] = values[tuple(src)]
    return out


def translate(gf, shift, domain=None):
    """Grid translate T u(x) = u(x + shift), zeroed outside the domain.

    The value at node x survives only when both x and x + shift lie in the
    domain; everything else is zero.  A full-space domain (or None) skips
    the masking.
    """
    steps, shift_vec = _shift_steps(shift, gf.h, gf.dim)
    out = _roll_zero(gf.values, steps)
    if domain is not None and not isinstance(domain, FullSpace):
        pts = gf.positions()
        keep = domain.contains(pts) & domain.contains(pts + shift_vec[None, :])
        flat = out.ravel()
        flat[~keep] = 0.0
        out = flat.reshape(gf.spec.shape)
    zero_outside = bool(np.all(out[_boundary_mask(gf.spec.shape)] == 0.0))
    return GridFunction(gf.spec, out, zero_outside=zero_outside)


def _phi(t):
    out = np.zeros_like(t)
    pos = t > 0.0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _psi(v):
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[v <= 0.0] = 1.0
    out[v >= 1.0] = 0.0
    mid = (v > 0.0) & (v < 1.0)
    vm = v[mid]
    a = np.exp(-1.0 / (1.0 - vm))
    b = np.exp(-1.0 / vm)
    out[mid] = a / (a + b)
    return out


def cutoff_values(j, points):
    """tau_j at arbitrary points: psi(|x| - j)."""
    if int(j) != j or j < 1:
        raise ParameterError("cutoff index j must be a positive integer")
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    r = np.sqrt(np.sum(points * points, axis=1))
    return _psi(r - float(j))


def cutoff(j, spec):
    """Sample tau_j on a grid whose box contains the closed ball B_{j+1}."""
    for a in range(spec.dim):
        if spec.lo[a] > -(j + 1.0) or spec.hi[a] < (j + 1.0):
            raise DomainError(
                "grid box must contain B_{j+1}; axis %d spans [%g, %g]"
                % (a, spec.lo[a], spec.hi[a])
            )
    vals = cutoff_values(j, spec.positions()).reshape(spec.shape)
    zero_outside = bool(np.all(vals[_boundary_mask(spec.shape)] == 0.0))
    return GridFunction(spec, vals, zero_outside=zero_outside)


def cutoff_slope(j=1, dr=1e-4):
    """Max radial slope of tau_j, by finite differences on a fine probe.

    The profile psi(r - j) does not depend on j, so this constant is shared
    by the whole cutoff family; the j argument exists so callers can verify
    that on the grid they actually use.
    """
    r = np.arange(max(0.0, j - 0.5), j + 1.5 + dr, dr)
    tau = _psi(r - float(j))
    return float(np.max(np.abs(np.diff(tau)))) / dr


def mollifier_weights(epsilon, h, dim):
    """Discrete bump taps: offsets (K, dim) and weights summing to one."""
    if epsilon < 2.0 * h * (1.0 - 1e-12):
        raise ResolutionError(
            "mollification radius %g must be at least 2h = %g" % (epsilon, 2 * h)
        )
    m_max = int(math.ceil(epsilon / h))
    offsets = []
    weights = []
    for m in itertools.product(range(-m_max, m_max + 1), repeat=dim):
        off = np.asarray(m, dtype=float) * h
        rho2 = float(np.sum(off * off)) / (epsilon * epsilon)
        if rho2 < 1.0:
            offsets.append(m)
            weights.append(math.exp(-1.0 / (1.0 - rho2)))
    offsets = np.asarray(offsets, dtype=int)
    weights = np.asarray(weights, dtype=float)
    weights = weights / np.sum(weights)
    return offsets, weights


def mollify(gf, epsilon):
    """Convolve with the discrete bump of radius epsilon (needs eps >= 2h)."""
    offsets, weights = mollifier_weights(epsilon, gf.h, gf.dim)
    out = np.zeros_like(gf.values)
    for m, w in zip(offsets, weights):
        # u_eps(x_i) = sum_m w_m u(x_{i-m}): read with offset -m.
        out = out + w * _roll_zero(gf.values, -m)
    zero_outside = bool(np.all(out[_boundary_mask(gf.spec.shape)] == 0.0))
    return GridFunction(gf.spec, out, zero_outside=zero_outside)


def inflate(region, a):
    """Region inflated by a nonnegative radius."""
    return region.inflated(a)


def hypograph_margin(region, R, domain, spacing=None):
    """Largest a in [0, R] with (region + B_a) within B_R contained in domain.

    Membership is tested node-wise on a verification grid of the given
    spacing (default: half the region's cell width) covering the region's
    bounding box padded by R; bisection stops at absolute tolerance
    spacing / 4.  The returned margin is exact at verification-grid scale.
    """
    if R <= 0:
        raise ParameterError("vicinity radius R must be positive")
    if region.is_empty:
        return float(R)
    hv = spacing if spacing is not None else region.h / 2.0
    lo_bb, hi_bb = region.bbox()
    axes = [
        np.arange(lo_bb[a] - R, hi_bb[a] + R + hv, hv)
        for a in range(region.dim)
    ]
    if region.dim == 1:
        pts = axes[0][:, None]
    else:
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
    in_ball = np.sqrt(np.sum(pts * pts, axis=1)) <= R
    pts = pts[in_ball]
    if len(pts) == 0:
        return float(R)
    dist = region.distance(pts)
    outside = ~domain.contains(pts)

    def admissible(a):
        return not bool(np.any(outside & (dist <= a)))

    if not admissible(0.0):
        return 0.0
    if admissible(float(R)):
        return float(R)
    lo, hi = 0.0, float(R)
    while hi - lo > hv / 4.0:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo
