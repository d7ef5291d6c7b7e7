"""Generalized N-functions G_{x,y}(t) and their structural checks.

A generalized N-function is a map ``G(x, y, t)`` that is an N-function in
``t`` for every pair of spatial points ``(x, y)``.  All families here carry
declared growth bounds ``1 < g_minus <= g_plus < inf`` for the ratio

    g(x, y, t) * t / G(x, y, t)

where ``g`` is the right derivative of ``G`` in ``t``.  Off-diagonal families
are translation invariant: the pair dependence enters only through the
coordinate-sum of ``x - y``, which keeps evaluations cheap inside pairwise
kernels and makes two-point consistency checks exact on dyadic grids.

Families
--------
``variable_exponent``
    ``G = t**p(x - y)`` with a constant or cosine exponent map.
``orlicz``
    ``G = t**q * log1p(c*t)``, no spatial dependence.
``product``
    ``G = t**p(x - y) * log1p(c*t)``.
``step_exponent``
    Diagonal family ``G(x, x, t) = t**p(x)`` with a two-valued exponent,
    used by the variable-exponent counterexample experiment.  It has no
    off-diagonal structure and is rejected by fractional kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError

__all__ = [
    "NFunction",
    "SamplingSpec",
    "NFunctionReport",
    "variable_exponent",
    "orlicz",
    "product",
    "step_exponent",
    "eval_G",
    "eval_g",
    "conjugate",
    "conjugate_nfunction",
    "estimate_g_bounds",
    "check_structure",
]

# Kernel family ids shared with the compiled and reference backends.
KERNEL_POWER_CONST = 0
KERNEL_POWER_COS = 1
KERNEL_ORLICZ_LOG = 2
KERNEL_PRODUCT_COS_LOG = 3

# Golden-section constants for the Young conjugate.
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_DOUBLINGS = 200


class _ExponentMap:
    """Exponent p(w) of the coordinate-sum w of x - y."""

    def __init__(self, kind, base, amp=0.0, freq=1.0):
        if kind not in ("constant", "cosine"):
            raise ParameterError("unknown exponent map kind: %r" % (kind,))
        if kind == "constant":
            amp = 0.0
        if base - abs(amp) <= 1.0:
            raise ParameterError(
                "exponent range must stay above 1, got base=%g amp=%g" % (base, amp)
            )
        self.kind = kind
        self.base = float(base)
        self.amp = float(amp)
        self.freq = float(freq)

    def __call__(self, w):
        if self.kind == "constant":
            return self.base
        return self.base + self.amp * np.cos(self.freq * np.asarray(w, dtype=float))

    @property
    def bounds(self):
        return (self.base - abs(self.amp), self.base + abs(self.amp))


@dataclass
class NFunction:
    """A generalized N-function with declared growth bounds.

    Instances are built through the factory functions in this module; the
    constructor itself only stores the pieces.  ``kernel_id`` and
    ``kernel_params`` encode the family for the pairwise kernels; a
    ``kernel_id`` of ``None`` marks a diagonal-only family.
    """

    family: str
    dim: int
    g_minus: float
    g_plus: float
    kernel_id: int | None
    kernel_params: np.ndarray
    _exponent: _ExponentMap | None = None
    _log_coef: float = 0.0
    _step: tuple[float, float] | None = None  # (r, d) for step_exponent

    def __post_init__(self):
        if not (1.0 < self.g_minus <= self.g_plus < math.inf):
            raise ParameterError(
                "declared bounds must satisfy 1 < g_minus <= g_plus < inf, "
                "got (%g, %g)" % (self.g_minus, self.g_plus)
            )
        if self.dim not in (1, 2):
            raise ParameterError("dim must be 1 or 2, got %r" % (self.dim,))
        self.kernel_params = np.asarray(self.kernel_params, dtype=float)

    # -- core evaluation ----------------------------------------------------

    def _wsum(self, x, y):
        """Coordinate-sum of x - y.

        For dim 1 the points are bare floats or arrays of floats; for dim 2
        they carry a trailing coordinate axis of length 2.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.dim == 1:
            return x - y
        return np.sum(x - y, axis=-1)

    def _G_wt(self, w, t):
        t = np.asarray(t, dtype=float)
        if self.family == "variable_exponent":
            return np.power(t, self._exponent(w))
        if self.family == "orlicz":
            q = self.kernel_params[0]
            c = self._log_coef
            return np.power(t, q) * np.log1p(c * t)
        if self.family == "product":
            return np.power(t, self._exponent(w)) * np.log1p(self._log_coef * t)
        raise ParameterError(
            "family %r has no two-point structure" % (self.family,)
        )

    def _g_wt(self, w, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.family == "variable_exponent":
                p = self._exponent(w)
                out = p * np.power(t, p - 1.0)
            elif self.family == "orlicz":
                q = self.kernel_params[0]
                c = self._log_coef
                out = q * np.power(t, q - 1.0) * np.log1p(c * t) + c * np.power(
                    t, q
                ) / (1.0 + c * t)
            elif self.family == "product":
                p = self._exponent(w)
                c = self._log_coef
                out = p * np.power(t, p - 1.0) * np.log1p(c * t) + c * np.power(
                    t, p
                ) / (1.0 + c * t)
            else:
                raise ParameterError(
                    "family %r has no two-point structure" % (self.family,)
                )
        return np.where(t == 0.0, 0.0, out)

    def _step_p(self, x):
        r, d = self._step
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0.0, r, d)

    def G(self, x, y, t):
        """Evaluate G(x, y, t); t must be nonnegative."""
        if self.family == "step_exponent":
            return np.power(np.asarray(t, dtype=float), self._step_p(x))
        return self._G_wt(self._wsum(x, y), t)

    def g(self, x, y, t):
        """Right derivative of G in t."""
        if self.family == "step_exponent":
            p = self._step_p(x)
            t = np.asarray(t, dtype=float)
            return np.where(t == 0.0, 0.0, p * np.power(t, p - 1.0))
        return self._g_wt(self._wsum(x, y), t)

    def G_diag(self, x, t):
        """Diagonal evaluation G(x, x, t)."""
        return self.G(x, x, t)

    def g_diag(self, x, t):
        return self.g(x, x, t)

    @property
    def supports_fractional(self):
        return self.kernel_id is not None

    def describe(self):
        return {
            "family": self.family,
            "dim": self.dim,
            "g_minus": self.g_minus,
            "g_plus": self.g_plus,
            "params": [float(v) for v in self.kernel_params],
        }


# -- factories ---------------------------------------------------------------


def variable_exponent(exponent, dim=1):
    """Build ``G = t**p(x-y)``.

    Parameters
    ----------
    exponent : tuple
        ``("constant", p)`` or ``("cosine", base, amp, freq)``; the cosine
        map is ``p(w) = base + amp*cos(freq*w)`` of the coordinate-sum ``w``
        of ``x - y``.
    dim : int
        Spatial dimension (1 or 2).
    """
    emap = _make_exponent(exponent)
    lo, hi = emap.bounds
    if emap.kind == "constant":
        kid, params = KERNEL_POWER_CONST, [emap.base]
    else:
        kid, params = KERNEL_POWER_COS, [emap.base, emap.amp, emap.freq]
    return NFunction(
        family="variable_exponent",
        dim=dim,
        g_minus=lo,
        g_plus=hi,
        kernel_id=kid,
        kernel_params=np.array(params, dtype=float),
        _exponent=emap,
    )


def orlicz(q=2.0, c=math.e, dim=1):
    """Build ``G = t**q * log1p(c*t)``; the ratio lives in (q, q+1)."""
    if q <= 1.0 or c <= 0.0:
        raise ParameterError("orlicz family needs q > 1 and c > 0")
    return NFunction(
        family="orlicz",
        dim=dim,
        g_minus=float(q),
        g_plus=float(q) + 1.0,
        kernel_id=KERNEL_ORLICZ_LOG,
        kernel_params=np.array([q, c], dtype=float),
        _log_coef=float(c),
    )


def product(exponent, c=math.e, dim=1):
    """Build ``G = t**p(x-y) * log1p(c*t)``."""
    if c <= 0.0:
        raise ParameterError("product family needs c > 0")
    emap = _make_exponent(exponent)
    lo, hi = emap.bounds
    if emap.kind == "constant":
        params = [emap.base, 0.0, 1.0, c]
    else:
        params = [emap.base, emap.amp, emap.freq, c]
    return NFunction(
        family="product",
        dim=dim,
        g_minus=lo,
        g_plus=hi + 1.0,
        kernel_id=KERNEL_PRODUCT_COS_LOG,
        kernel_params=np.array(params, dtype=float),
        _exponent=emap,
        _log_coef=float(c),
    )


def step_exponent(r, d):
    """Two-valued diagonal exponent: p(x) = r for x >= 0, d for x < 0.

    One-dimensional and diagonal-only; scalar modulars and Luxemburg norms
    work, fractional kernels reject it.
    """
    if min(r, d) <= 1.0:
        raise ParameterError("step exponents must exceed 1")
    return NFunction(
        family="step_exponent",
        dim=1,
        g_minus=float(min(r, d)),
        g_plus=float(max(r, d)),
        kernel_id=None,
        kernel_params=np.array([r, d], dtype=float),
        _step=(float(r), float(d)),
    )


def _make_exponent(exponent):
    if isinstance(exponent, _ExponentMap):
        return exponent
    if not isinstance(exponent, (tuple, list)) or not exponent:
        raise ParameterError("exponent must be a (kind, ...) tuple")
    kind = exponent[0]
    if kind == "constant":
        if len(exponent) != 2:
            raise ParameterError("constant exponent takes one parameter")
        return _ExponentMap("constant", exponent[1])
    if kind == "cosine":
        if len(exponent) != 4:
            raise ParameterError("cosine exponent takes (base, amp, freq)")
        return _ExponentMap("cosine", exponent[1], exponent[2], exponent[3])
    raise ParameterError("unknown exponent map kind: %r" % (kind,))


# -- module-level operations ---------------------------------------------------


def eval_G(nf, x, y, t):
    """Vectorized G(x, y, t)."""
    return nf.G(x, y, t)


def eval_g(nf, x, y, t):
    """Vectorized right derivative g(x, y, t)."""
    return nf.g(x, y, t)


def conjugate(nf, x, y, tau, rel_tol=1e-10):
    """Young conjugate sup_{s >= 0} (tau*s - G(x, y, s)) by golden section.

    The search bracket [0, s_hi] is grown by doubling until
    ``g(s_hi) >= tau`` (the objective is nonincreasing past that point), so
    the true maximizer is bracketed.  The returned value is the best sampled
    objective value, hence never exceeds the true supremum; the golden ratio
    contraction makes the shortfall O(rel_tol**2) relative to curvature.
    """
    tau_arr = np.asarray(tau, dtype=float)
    scalar = tau_arr.ndim == 0
    tau_flat = np.atleast_1d(tau_arr).astype(float).ravel()
    if np.any(tau_flat < 0.0):
        raise ParameterError("conjugate argument must be nonnegative")

    if nf.family == "step_exponent":
        p = np.broadcast_to(nf._step_p(x), tau_arr.shape)
        p_flat = np.atleast_1d(p).ravel()

        def phi(s):
            return tau_flat * s - np.power(s, p_flat)

        def gfun(s):
            return p_flat * np.power(s, p_flat - 1.0)

    else:
        w = np.broadcast_to(nf._wsum(x, y), tau_arr.shape)
        w_flat = np.atleast_1d(w).ravel()

        def phi(s):
            return tau_flat * s - nf._G_wt(w_flat, s)

        def gfun(s):
            return nf._g_wt(w_flat, s)

    out = np.zeros_like(tau_flat)
    live = tau_flat > 0.0
    if np.any(live):
        with np.errstate(over="ignore", invalid="ignore"):
            s_hi = np.ones_like(tau_flat)
            for _ in range(_MAX_DOUBLINGS):
                need = live & (gfun(s_hi) < tau_flat)
                if not np.any(need):
                    break
                s_hi = np.where(need, 2.0 * s_hi, s_hi)
            a = np.zeros_like(tau_flat)
            b = s_hi
            n_iter = int(
                math.ceil(math.log(1.0 / rel_tol) / math.log(1.0 / _INVPHI))
            )
            for _ in range(n_iter):
                span = b - a
                c = b - _INVPHI * span
                d = a + _INVPHI * span
                keep_left = phi(c) >= phi(d)
                b = np.where(keep_left, d, b)
                a = np.where(keep_left, a, c)
            mid = 0.5 * (a + b)
            best = np.maximum.reduce(
                [phi(a), phi(mid), phi(b), np.zeros_like(a)]
            )
        out = np.where(live, best, out)
    if scalar:
        return float(out[0])
    return out.reshape(tau_arr.shape)


class _ConjugateNFunction:
    """Diagonal view of the numeric Young conjugate of a base N-function.

    Only the pieces the scalar modular and the Luxemburg solver touch are
    provided.  Declared bounds swap through the conjugate-exponent map.
    """

    def __init__(self, base, rel_tol=1e-10):
        self.base = base
        self.family = base.family + "_conjugate"
        self.dim = base.dim
        self.g_minus = base.g_plus / (base.g_plus - 1.0)
        self.g_plus = base.g_minus / (base.g_minus - 1.0)
        self.kernel_id = None
        self.rel_tol = rel_tol

    @property
    def supports_fractional(self):
        return False

    def G_diag(self, x, t):
        return conjugate(self.base, x, x, t, rel_tol=self.rel_tol)

    def describe(self):
        info = self.base.describe()
        info["family"] = self.family
        info["g_minus"] = self.g_minus
        info["g_plus"] = self.g_plus
        return info


def conjugate_nfunction(nf, rel_tol=1e-10):
    """Wrap ``nf`` as the diagonal N-function of its Young conjugate."""
    return _ConjugateNFunction(nf, rel_tol=rel_tol)


# -- structure checking --------------------------------------------------------


@dataclass
class SamplingSpec:
    """Sampling plan for :func:`check_structure` and bound estimation."""

    t_points: int = 64
    t_lo: float = 1e-6
    t_hi: float = 1e6
    xy_points: int = 8
    box: tuple | None = None  # ((lo,)*dim, (hi,)*dim); default [-2, 2]^dim
    young_samples: int = 2048
    young_range: tuple = (1e-3, 1e3)
    scaling_factors: tuple = (0.25, 0.5, 2.0, 4.0)
    seed: int = 0

    def t_ladder(self):
        return np.logspace(
            math.log10(self.t_lo), math.log10(self.t_hi), self.t_points
        )

    def xy_lattice(self, dim):
        """All ordered (x, y) pairs of a per-axis lattice, capped at 4096."""
        lo, hi = self.box if self.box is not None else ((-2.0,) * dim, (2.0,) * dim)
        axes = [np.linspace(lo[a], hi[a], self.xy_points) for a in range(dim)]
        if dim == 1:
            pts = axes[0]
        else:
            pts = np.stack(
                [g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1
            )
        xi, yi = np.meshgrid(
            np.arange(len(pts)), np.arange(len(pts)), indexing="ij"
        )
        x = pts[xi.ravel()]
        y = pts[yi.ravel()]
        if len(x) > 4096:
            stride = len(x) // 4096 + 1
            x, y = x[::stride], y[::stride]
        return x, y


@dataclass
class NFunctionReport:
    """Outcome of a structural audit of an N-function family."""

    family: str
    dim: int
    declared_bounds: tuple
    estimated_bounds: tuple
    delta2_constant: float
    bf_bounds: tuple
    young_max_residual: float
    samples_checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        return {
            "family": self.family,
            "dim": self.dim,
            "declared_bounds": list(self.declared_bounds),
            "estimated_bounds": list(self.estimated_bounds),
            "delta2_constant": self.delta2_constant,
            "bf_bounds": list(self.bf_bounds),
            "young_max_residual": self.young_max_residual,
            "samples_checked": self.samples_checked,
            "passed": self.passed,
            "violations": self.violations,
        }


def estimate_g_bounds(nf, sampling=None):
    """Estimate (g_minus, g_plus) from the ratio g*t/G over a sample lattice."""
    spec = sampling if sampling is not None else SamplingSpec()
    ts = spec.t_ladder()
    x, y = spec.xy_lattice(nf.dim)
    ratios = _ratio_samples(nf, x, y, ts)
    return float(np.min(ratios)), float(np.max(ratios))


def _ratio_samples(nf, x, y, ts):
    # shape (pairs, t): broadcast points against the t ladder
    if nf.dim == 1:
        xx = x[:, None]
        yy = y[:, None]
    else:
        xx = x[:, None, :]
        yy = y[:, None, :]
    tt = ts[None, :]
    G = nf.G(xx, yy, tt)
    g = nf.g(xx, yy, tt)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = g * tt / G
    return ratios[np.isfinite(ratios) & (G > 0.0)]


def check_structure(nf, sampling=None, tol=1e-9):
    """Audit the N-function conditions on a sample lattice.

    Checks vanishing at zero, monotonicity, midpoint convexity, the growth
    ratio against the declared bounds, the power-scaling envelope implied by
    those bounds, the doubling constant against ``2**g_plus``, positivity and
    finiteness of ``G(x, y, 1)``, and Young's inequality against the numeric
    conjugate.  Every failure is recorded as a violation entry; the report
    also carries the estimated bounds and constants.
    """
    spec = sampling if sampling is not None else SamplingSpec()
    ts = spec.t_ladder()
    x, y = spec.xy_lattice(nf.dim)
    violations = []
    checked = 0

    if not (1.0 < nf.g_minus <= nf.g_plus < math.inf):
        violations.append(
            {"check": "declared_bounds", "where": None,
             "residual": float(nf.g_minus)}
        )

    if nf.dim == 1:
        xb = x[:, None]
        yb = y[:, None]
    else:
        xb = x[:, None, :]
        yb = y[:, None, :]
    tt = ts[None, :]

    Gv = nf.G(xb, yb, tt)  # (pairs, t), possibly collapsed by broadcasting
    gv = nf.g(xb, yb, tt)
    checked += len(x) * spec.t_points

    zero_vals = np.atleast_1d(nf.G(xb, yb, np.zeros((1, 1))))
    if np.any(zero_vals != 0.0):
        idx = int(np.argmax(zero_vals != 0.0))
        violations.append(
            {"check": "zero_at_zero", "where": {"pair": idx},
             "residual": float(np.max(np.abs(zero_vals)))}
        )
    gzero = np.atleast_1d(nf.g(xb, yb, np.zeros((1, 1))))
    if np.any(gzero != 0.0):
        violations.append(
            {"check": "derivative_zero_at_zero", "where": None,
             "residual": float(np.max(np.abs(gzero)))}
        )

    diffs = np.diff(Gv, axis=1)
    if np.any(diffs <= 0.0):
        i, j = np.unravel_index(int(np.argmin(diffs)), diffs.shape)
        violations.append(
            {"check": "monotone", "where": {"pair": int(i), "t": float(ts[j])},
             "residual": float(diffs[i, j])}
        )

    tm = 0.5 * (ts[:-1] + ts[1:])
    Gm = nf.G(xb, yb, tm[None, :])
    chord = 0.5 * (Gv[:, :-1] + Gv[:, 1:])
    conv_resid = Gm - chord - tol * (1.0 + np.abs(chord))
    if np.any(conv_resid > 0.0):
        i, j = np.unravel_index(int(np.argmax(conv_resid)), conv_resid.shape)
        violations.append(
            {"check": "convex", "where": {"pair": int(i), "t": float(tm[j])},
             "residual": float(conv_resid[i, j])}
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = gv * tt / Gv
    ok = np.isfinite(ratio) & (Gv > 0.0)
    r = ratio[ok]
    est_lo, est_hi = float(np.min(r)), float(np.max(r))
    if est_lo < nf.g_minus - tol * nf.g_minus:
        violations.append(
            {"check": "ratio_lower", "where": None,
             "residual": float(nf.g_minus - est_lo)}
        )
    if est_hi > nf.g_plus + tol * nf.g_plus:
        violations.append(
            {"check": "ratio_upper", "where": None,
             "residual": float(est_hi - nf.g_plus)}
        )

    for lam in spec.scaling_factors:
        Gl = nf.G(xb, yb, lam * tt)
        lo_env = lam ** nf.g_minus * Gv
        hi_env = lam ** nf.g_plus * Gv
        if lam < 1.0:
            lo_env, hi_env = hi_env, lo_env
        bad_lo = Gl < lo_env * (1.0 - 64.0 * tol)
        bad_hi = Gl > hi_env * (1.0 + 64.0 * tol)
        checked += len(x) * spec.t_points
        if np.any(bad_lo | bad_hi):
            i, j = np.unravel_index(int(np.argmax(bad_lo | bad_hi)), Gl.shape)
            violations.append(
                {"check": "scaling_envelope",
                 "where": {"factor": float(lam), "t": float(ts[j])},
                 "residual": float(
                     max(np.max(lo_env - Gl), np.max(Gl - hi_env))
                 )}
            )

    G2 = nf.G(xb, yb, 2.0 * tt)
    with np.errstate(divide="ignore", invalid="ignore"):
        doubling = G2 / Gv
    delta2 = float(np.max(doubling[np.isfinite(doubling) & (Gv > 0.0)]))
    if delta2 > 2.0 ** nf.g_plus * (1.0 + 64.0 * tol):
        violations.append(
            {"check": "delta2", "where": None,
             "residual": float(delta2 - 2.0 ** nf.g_plus)}
        )

    G1 = nf.G(xb, yb, np.ones((1, 1)))
    c1, c2 = float(np.min(G1)), float(np.max(G1))
    if not (0.0 < c1 <= c2 < math.inf):
        violations.append(
            {"check": "bf_bounds", "where": None, "residual": c1}
        )

    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.young_range
    sig = np.exp(rng.uniform(math.log(lo), math.log(hi), spec.young_samples))
    tau = np.exp(rng.uniform(math.log(lo), math.log(hi), spec.young_samples))
    pick = rng.integers(0, len(x), spec.young_samples)
    xs, ys = x[pick], y[pick]
    Gs = nf.G(xs, ys, sig)
    Gc = conjugate(nf, xs, ys, tau)
    rhs = Gs + Gc
    resid = sig * tau - rhs * (1.0 + 1e-8) - 1e-12
    young_max = float(np.max(resid))
    checked += spec.young_samples
    if young_max > 0.0:
        i = int(np.argmax(resid))
        violations.append(
            {"check": "young", "where": {"sigma": float(sig[i]),
                                         "tau": float(tau[i])},
             "residual": young_max}
        )

    return NFunctionReport(
        family=nf.family,
        dim=nf.dim,
        declared_bounds=(nf.g_minus, nf.g_plus),
        estimated_bounds=(est_lo, est_hi),
        delta2_constant=delta2,
        bf_bounds=(c1, c2),
        young_max_residual=young_max,
        samples_checked=checked,
        violations=violations,
    )
