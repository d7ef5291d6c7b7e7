"""Numpy reference implementation of the pairwise fractional-modular kernel.

The compiled backend mirrors this file operation for operation: per row the
off-diagonal terms are accumulated strictly left to right, the dyadic
diagonal correction is accumulated level by level into a separate slot, and
the two are added once at the end.  Keeping the floating-point evaluation
order aligned lets the test suite compare backends at a few ulps.
"""

from __future__ import annotations

import numpy as np

NAME = "reference"

# Direction table for the 2-D diagonal correction: (dx, dy, multiplicity) in
# units of the level width.  Axis-aligned neighbor blocks appear twice (the
# two off-diagonal children sharing that offset), diagonal blocks once.
_DIRS_2D = (
    (1.0, 0.0, 2.0),
    (-1.0, 0.0, 2.0),
    (0.0, 1.0, 2.0),
    (0.0, -1.0, 2.0),
    (1.0, 1.0, 1.0),
    (1.0, -1.0, 1.0),
    (-1.0, 1.0, 1.0),
    (-1.0, -1.0, 1.0),
)


def _eval_family(family, params, w, t):
    if family == 0:
        return t ** params[0]
    if family == 1:
        return t ** (params[0] + params[1] * np.cos(params[2] * w))
    if family == 2:
        return t ** params[0] * np.log1p(params[1] * t)
    if family == 3:
        return (
            t ** (params[0] + params[1] * np.cos(params[2] * w))
            * np.log1p(params[3] * t)
        )
    raise ValueError("unknown kernel family id %r" % (family,))


def frac_rows(positions, values, grads, lam, s, h, family, params, diag_levels,
              threads=1):
    """Per-row partial sums of the discrete fractional modular.

    rows[i] = sum_{j != i} G(x_i, x_j, |u_i - u_j| / (lam * r^s)) * h^{2N}/r^N
              + dyadic diagonal correction for cell pair (i, i).

    ``threads`` is accepted for interface parity and ignored: the reference
    backend is single-threaded.
    """
    positions = np.ascontiguousarray(positions, dtype=float)
    values = np.ascontiguousarray(values, dtype=float)
    grads = np.ascontiguousarray(grads, dtype=float)
    params = np.ascontiguousarray(params, dtype=float)
    M, dim = positions.shape
    hpow = h ** (2 * dim)
    rows = np.empty(M)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if dim == 1:
            x = positions[:, 0]
            for i in range(M):
                w = x[i] - x
                r = np.abs(w)
                rs = r ** s
                t = np.abs(values[i] - values) / (lam * rs)
                G = _eval_family(family, params, w, t)
                terms = G * (hpow / r)
                terms[i] = 0.0
                rows[i] = np.add.accumulate(terms)[-1]
            diag = _diag_1d(values, grads, lam, s, h, family, params,
                            diag_levels)
        else:
            x0 = positions[:, 0]
            x1 = positions[:, 1]
            for i in range(M):
                d0 = x0[i] - x0
                d1 = x1[i] - x1
                r2 = d0 * d0 + d1 * d1
                r = np.sqrt(r2)
                rs = r ** s
                t = np.abs(values[i] - values) / (lam * rs)
                w = d0 + d1
                G = _eval_family(family, params, w, t)
                terms = G * (hpow / r2)
                terms[i] = 0.0
                rows[i] = np.add.accumulate(terms)[-1]
            diag = _diag_2d(grads, lam, s, h, family, params, diag_levels)

    return rows + diag


def _diag_1d(values, grads, lam, s, h, family, params, diag_levels):
    L = np.abs(grads[:, 0])
    diag = np.zeros(len(values))
    for lev in range(1, diag_levels + 1):
        w = h / 2.0 ** lev
        t = (L * w ** (1.0 - s)) / lam
        Gp = _eval_family(family, params, w, t)
        Gm = _eval_family(family, params, -w, t)
        diag = diag + h * 0.5 * (Gp + Gm)
    return diag


def _diag_2d(grads, lam, s, h, family, params, diag_levels):
    g0 = grads[:, 0]
    g1 = grads[:, 1]
    diag = np.zeros(len(g0))
    for lev in range(1, diag_levels + 1):
        w = h / 2.0 ** lev
        parents = 4.0 ** (lev - 1)
        vol = w ** 4
        for dx, dy, mult in _DIRS_2D:
            ox = dx * w
            oy = dy * w
            rlen = np.sqrt(ox * ox + oy * oy)
            t = (np.abs(g0 * ox + g1 * oy) / rlen ** s) / lam
            G = _eval_family(family, params, ox + oy, t)
            diag = diag + parents * mult * G * (vol / (rlen * rlen))
    return diag


def pair_rows(positions, pair_values, lam, h, family, params, diag_levels):
    """Rows for an explicit two-point function v(x, y), one-dimensional.

    ``pair_values(x, y)`` must be an elementwise, numpy-broadcasting
    callable; the kernel argument is ``|v(x, y)| / lam`` with no singular
    rescaling (callers bake any r**s factor into v).  The diagonal
    correction evaluates v at the dyadic subcell centers, so it is exact for
    smooth v rather than relying on a gradient proxy.  Python-level
    callable, hence reference backend only.
    """
    positions = np.ascontiguousarray(positions, dtype=float)
    M, dim = positions.shape
    if dim != 1:
        raise NotImplementedError("pair modular is one-dimensional")
    hpow = h ** (2 * dim)
    rows = np.empty(M)
    x = positions[:, 0]

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(M):
            w = x[i] - x
            r = np.abs(w)
            t = np.abs(pair_values(x[i], x)) / lam
            G = _eval_family(family, params, w, t)
            terms = G * (hpow / r)
            terms[i] = 0.0
            rows[i] = np.add.accumulate(terms)[-1]

        # Level lev splits the diagonal cell block into 2**(lev-1) parents of
        # width 2w; each parent sheds two off-diagonal children of side w at
        # x - y = -w and +w, contributing area w^2 times kernel 1/w.
        diag = np.zeros(M)
        for lev in range(1, diag_levels + 1):
            w = h / 2.0 ** lev
            n_par = 2 ** (lev - 1)
            offsets = (2.0 * np.arange(n_par) + 1.0 - n_par) * w
            lev_acc = np.zeros(M)
            for off in offsets:
                mids = x + off
                vp = pair_values(mids + 0.5 * w, mids - 0.5 * w)
                vm = pair_values(mids - 0.5 * w, mids + 0.5 * w)
                Gp = _eval_family(family, params, w, np.abs(vp) / lam)
                Gm = _eval_family(family, params, -w, np.abs(vm) / lam)
                lev_acc = lev_acc + (Gp + Gm)
            diag = diag + w * lev_acc
        rows = rows + diag
    return rows
