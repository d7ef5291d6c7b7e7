"""Discrete Musielak modulars: scalar, fractional and two-point.

Quadrature convention: midpoint-at-nodes.  Every node owns a cell of volume
h^N centered on it; scalar modulars sum G over nodes, fractional modulars
sum the singular kernel over ordered node pairs with the diagonal pair
replaced by a dyadic subdivision of the (i, i) cell block.  Functions that
vanish outside the grid box contribute nothing beyond it, and their boundary
nodes are exactly zero by the grid-function invariant, so the node sum is
the full-space quadrature.

Refinement ladders subsample nodes with power-of-two strides (requested
levels are clamped so the strides divide n - 1).  The reported value is the
finest level; the error estimate is the gap to the next-coarser level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import ParameterError
from .grid import GridFunction

__all__ = [
    "ModularResult",
    "detect_divergence",
    "scalar_modular_value",
    "frac_modular_value",
    "modular_scalar",
    "modular_fractional",
    "modular_pair",
]

DEFAULT_DIAG_LEVELS = 4
DIVERGENCE_FACTOR = 1.5
DIVERGENCE_WINDOW = 3


@dataclass
class ModularResult:
    """A modular value with its refinement diagnostics."""

    value: float
    error_estimate: float
    levels: list = field(default_factory=list)  # [(n_per_axis, value)]
    diverged: bool = False
    diverged_at: int | None = None

    def to_dict(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "levels": [[int(n), float(v)] for n, v in self.levels],
            "diverged": self.diverged,
            "diverged_at": self.diverged_at,
        }


def detect_divergence(values, factor=DIVERGENCE_FACTOR, window=DIVERGENCE_WINDOW):
    """Windowed growth detector over a refinement series.

    Fires at the first index ``l`` whose last ``window`` steps all increase
    and whose value has grown by at least ``factor`` relative to
    ``values[l - window]``.  Comparing across the window rather than per
    step lets logarithmic blow-ups (per-step ratios tending to 1) still
    register, while convergent series with shrinking increments never fire.

    Returns (diverged, index or None).
    """
    v = [float(x) for x in values]
    for ell in range(window, len(v)):
        base = v[ell - window]
        if base <= 0.0:
            continue
        steps_up = all(v[k + 1] > v[k] for k in range(ell - window, ell))
        if steps_up and v[ell] >= factor * base:
            return True, ell
    return False, None


def _diag_positions(gf):
    pts = gf.positions()
    return pts[:, 0] if gf.dim == 1 else pts


def scalar_modular_value(nf, gf, lam=1.0, threads=1):
    """Single-level scalar modular sum_nodes G(x, x, |u| / lam) * h^N."""
    if lam <= 0.0:
        raise ParameterError("modular scale must be positive")
    pos = _diag_positions(gf)
    with np.errstate(over="ignore"):
        terms = nf.G_diag(pos, np.abs(gf.flat()) / lam) * gf.h ** gf.dim
    terms = np.broadcast_to(terms, (gf.spec.n_nodes,))
    return _kernels.tree_sum(terms)


def frac_modular_value(nf, gf, s, lam=1.0, diag_levels=DEFAULT_DIAG_LEVELS,
                       threads=1):
    """Single-level fractional modular at scale lam."""
    if not 0.0 < s < 1.0:
        raise ParameterError("fractional order s must lie in (0, 1)")
    if lam <= 0.0:
        raise ParameterError("modular scale must be positive")
    if not nf.supports_fractional:
        raise ParameterError(
            "family %r has no two-point structure for fractional kernels"
            % (nf.family,)
        )
    if nf.dim != gf.dim:
        raise ParameterError("N-function and grid dimensions disagree")
    vals = gf.values
    h = gf.h
    if gf.dim == 1:
        grads = np.gradient(vals, h).reshape(-1, 1)
    else:
        g0, g1 = np.gradient(vals, h, h)
        grads = np.stack([g0.ravel(), g1.ravel()], axis=-1)
    rows = _kernels.frac_rows(
        gf.positions(), vals.ravel(), grads, lam, s, h,
        nf.kernel_id, nf.kernel_params, diag_levels, threads,
    )
    return _kernels.tree_sum(rows)


def _ladder_strides(n, levels):
    """Power-of-two strides, coarse to fine, clamped to divide n - 1."""
    if levels < 1:
        raise ParameterError("levels must be at least 1")
    usable = 1
    while usable < levels and (n - 1) % (2 ** usable) == 0:
        usable += 1
    return [2 ** (usable - 1 - k) for k in range(usable)]


def _run_ladder(gf, levels, one_level):
    strides = _ladder_strides(gf.spec.n, levels)
    out_levels = []
    for stride in strides:
        sub = gf.subsample(stride)
        out_levels.append((sub.spec.n, one_level(sub)))
    values = [v for _, v in out_levels]
    diverged, at = detect_divergence(values)
    err = abs(values[-1] - values[-2]) if len(values) > 1 else math.nan
    return ModularResult(
        value=values[-1],
        error_estimate=err,
        levels=out_levels,
        diverged=diverged,
        diverged_at=at,
    )


def modular_scalar(nf, gf, levels=3, threads=1):
    """Scalar modular with a subsampling refinement ladder."""
    return _run_ladder(
        gf, levels, lambda sub: scalar_modular_value(nf, sub, 1.0, threads)
    )


def modular_fractional(nf, gf, s, levels=2, diag_levels=DEFAULT_DIAG_LEVELS,
                       threads=1):
    """Fractional modular with a subsampling refinement ladder."""
    return _run_ladder(
        gf, levels,
        lambda sub: frac_modular_value(nf, sub, s, 1.0, diag_levels, threads),
    )


def modular_pair(nf, pair_values, spec, levels=1,
                 diag_levels=DEFAULT_DIAG_LEVELS):
    """Fractional-type modular of an explicit two-point function v(x, y).

    The kernel argument is |v(x, y)| directly (no difference quotient and no
    r**s rescaling; bake those into v if needed).  One-dimensional.
    """
    if not nf.supports_fractional:
        raise ParameterError(
            "family %r has no two-point structure for fractional kernels"
            % (nf.family,)
        )
    if spec.dim != 1 or nf.dim != 1:
        raise ParameterError("pair modular is one-dimensional")

    dummy = GridFunction(spec, np.zeros(spec.shape))

    def one_level(sub):
        rows = _kernels.pair_rows(
            sub.positions(), pair_values, 1.0, sub.h,
            nf.kernel_id, nf.kernel_params, diag_levels,
        )
        return _kernels.tree_sum(rows)

    return _run_ladder(dummy, levels, one_level)
