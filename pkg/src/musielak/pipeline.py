"""The approximation pipeline and the named experiments.

``approximate`` realizes the constructive density argument: translate the
function into the domain, cut off to a ball, mollify, with each stage owning
a third of the error budget sigma.  Stage parameters are searched
geometrically under hard resource floors (delta at least h, epsilon at least
2h, j at most box radius minus one); exhausting a ladder raises a typed
budget-infeasible error naming the stage.  Successful runs return the
approximant together with the error split, the measured cutoff slope, the
boundary margin, and exact-on-the-grid support bookkeeping: the approximant
vanishes outside the domain, stays within the inflated support of the input
(vicinity radius 2(eps + delta)), and obeys the ball/translate support chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    AlignmentError,
    BudgetInfeasibleError,
    DomainError,
    ParameterError,
)
from .grid import GridFunction, GridSpec, Region, sample, support, vanishes_outside
from .modular import (
    detect_divergence,
    frac_modular_value,
    modular_fractional,
    modular_scalar,
    scalar_modular_value,
)
from .nfunction import step_exponent
from .norms import luxemburg_norm, sobolev_norm
from .profiles import kovacik_f
from .smoothing import (
    SmoothingParams,
    axis_shift,
    cutoff_slope,
    cutoff_values,
    hypograph_margin,
    inflate,
    mollify,
    translate,
)

__all__ = [
    "ApproximationReport",
    "ConvergenceReport",
    "approximate",
    "convergence_experiment",
    "counterexample_experiment",
    "finiteness_experiment",
]


@dataclass
class ApproximationReport:
    """Everything a successful approximate run produced."""

    params: SmoothingParams
    err_translate: float
    err_cutoff: float
    err_mollify: float
    total_err: float
    support_ok: bool
    vicinity_ok: bool
    chain_ok: bool
    margin: float
    cutoff_slope: float
    rho: GridFunction
    history: dict = field(default_factory=dict)

    @property
    def succeeded(self):
        return (
            self.total_err < self.params.sigma
            and self.support_ok
            and self.vicinity_ok
        )

    def to_dict(self, rho_ref=None):
        return {
            "params": self.params.to_dict(),
            "err_translate": self.err_translate,
            "err_cutoff": self.err_cutoff,
            "err_mollify": self.err_mollify,
            "total_err": self.total_err,
            "support_ok": self.support_ok,
            "vicinity_ok": self.vicinity_ok,
            "chain_ok": self.chain_ok,
            "margin": self.margin,
            "cutoff_slope": self.cutoff_slope,
            "succeeded": self.succeeded,
            "rho": rho_ref,
            "history": self.history,
        }


@dataclass
class ConvergenceReport:
    """Ladder rows of (param, modular, norm, error_estimate) plus a verdict."""

    kind: str
    rows: list
    verdict: bool
    extras: dict = field(default_factory=dict)

    CSV_COLUMNS = ("param", "modular", "norm", "error_estimate")

    def to_dict(self):
        def clean(v):
            if isinstance(v, float) and math.isnan(v):
                return None
            return v

        return {
            "kind": self.kind,
            "rows": [
                {k: clean(row[k]) for k in self.CSV_COLUMNS} for row in self.rows
            ],
            "verdict": self.verdict,
            "extras": {k: _jsonable(v) for k, v in self.extras.items()},
        }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _box_margin(spec, region):
    """Smallest slack between the region's bbox and the grid box."""
    if region.is_empty:
        return min(spec.hi[a] - spec.lo[a] for a in range(spec.dim)) / 2.0
    lo_bb, hi_bb = region.bbox()
    slacks = []
    for a in range(spec.dim):
        slacks.append(lo_bb[a] - spec.lo[a])
        slacks.append(spec.hi[a] - hi_bb[a])
    return float(min(slacks))


def _apply_cutoff(gf, j):
    tau = cutoff_values(j, gf.positions()).reshape(gf.spec.shape)
    return GridFunction(gf.spec, tau * gf.values, zero_outside=gf.zero_outside)


def approximate(nf, u, domain, s, sigma, rel_tol=1e-8, diag_levels=4,
                threads=1, delta_start=0.25, eps_start=0.2):
    """Choose (delta, j, epsilon) meeting the sigma budget and build rho.

    Preconditions: ``u`` vanishes outside the (hypograph) domain and outside
    its grid box, and the box leaves at least 2(eps+delta)+1 of slack around
    the support of u for the smallest admissible parameters.  Stages run in
    proof order.  The translate stage keeps the largest grid-aligned delta
    whose error stays under sigma/3 (more boundary margin for the mollifier);
    the cutoff stage takes the smallest admissible j; the mollifier takes the
    largest epsilon under both its error target and the margin condition
    2*eps < a.
    """
    if sigma <= 0:
        raise ParameterError("error budget sigma must be positive")
    if not u.zero_outside:
        raise DomainError("approximate needs full-space semantics: "
                          "u must vanish outside its grid box")
    if not vanishes_outside(u, domain, tol=0.0):
        raise DomainError("u must vanish outside the domain")
    if nf.dim != u.dim:
        raise ParameterError("N-function and grid dimensions disagree")
    if not nf.supports_fractional:
        raise ParameterError(
            "family %r has no two-point structure for fractional kernels"
            % (nf.family,)
        )

    spec = u.spec
    h = spec.h
    target = sigma / 3.0
    supp_u = support(u)
    margin_avail = _box_margin(spec, supp_u)
    # Box rule: the box must contain supp(u) inflated by 2*(eps+delta)+1, so
    # the parameter budget is (margin - 1)/2 and the smallest admissible pair
    # is (delta, eps) = (h, 2h).
    budget = (margin_avail - 1.0) / 2.0
    if budget < 3.0 * h * (1.0 - 1e-12):
        raise DomainError(
            "truncation box too small: slack %.6g allows eps+delta <= %.6g "
            "but the grid floor needs delta + eps >= 3h = %.6g"
            % (margin_avail, max(budget, 0.0), 3.0 * h)
        )

    def w_norm(g):
        return sobolev_norm(nf, g, s, rel_tol=rel_tol,
                            diag_levels=diag_levels, threads=threads)

    history = {"translate": [], "cutoff": [], "mollify": []}

    # -- stage 1: translate -------------------------------------------------
    k_cap = int(math.floor((min(budget, delta_start) - 2.0 * h) / h + 1e-9))
    k_cap = max(k_cap, 1)
    err_cache = {}

    def err_t(k):
        if k not in err_cache:
            shifted = translate(u, axis_shift(k * h, spec.dim), domain)
            err_cache[k] = (w_norm(shifted - u), shifted)
            history["translate"].append({"delta": k * h, "err": err_cache[k][0]})
        return err_cache[k][0]

    if err_t(1) >= target:
        raise BudgetInfeasibleError(
            "translate",
            "smallest grid-aligned translation delta = h = %.6g already has "
            "error %.6g >= sigma/3 = %.6g" % (h, err_t(1), target),
            details=history,
        )
    if err_t(k_cap) < target:
        k_bar = k_cap
    else:
        lo, hi = 1, k_cap  # err(lo) < target <= err(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if err_t(mid) < target:
                lo = mid
            else:
                hi = mid
        k_bar = lo
    delta_bar = k_bar * h
    err_translate, u_d = err_cache[k_bar]

    # -- stage 2: cutoff ----------------------------------------------------
    box_radius = max(
        max(abs(spec.lo[a]), abs(spec.hi[a])) for a in range(spec.dim)
    ) * math.sqrt(spec.dim)
    j_max = max(1, int(math.floor(box_radius)) - 1)
    j_bar = None
    for j in range(1, j_max + 1):
        v_j = _apply_cutoff(u_d, j)
        err = w_norm(v_j - u_d)
        history["cutoff"].append({"j": j, "err": err})
        if err < target:
            j_bar = j
            err_cutoff = err
            v_bar = v_j
            break
    if j_bar is None:
        raise BudgetInfeasibleError(
            "cutoff",
            "no j <= box radius - 1 = %d brings the cutoff error under "
            "sigma/3 = %.6g" % (j_max, target),
            details=history,
        )

    # -- stage 3: mollify ---------------------------------------------------
    supp_d = support(u_d)
    margin = hypograph_margin(supp_d, j_bar + 2.0, domain)
    eps_cap = min(eps_start, budget - delta_bar,
                  0.5 * margin * (1.0 - 1e-9))
    if eps_cap < 2.0 * h * (1.0 - 1e-12):
        raise BudgetInfeasibleError(
            "mollify",
            "margin a = %.6g and box slack admit no epsilon >= 2h = %.6g "
            "with 2*eps < a" % (margin, 2.0 * h),
            details=history,
        )
    eps_bar = None
    eps = eps_cap
    while eps >= 2.0 * h * (1.0 - 1e-12):
        rho_try = mollify(v_bar, eps)
        err = w_norm(rho_try - v_bar)
        history["mollify"].append({"epsilon": eps, "err": err})
        if err < target:
            eps_bar = eps
            err_mollify = err
            rho = rho_try
            break
        eps *= 0.5
    if eps_bar is None:
        raise BudgetInfeasibleError(
            "mollify",
            "no epsilon in [2h, %.6g] brings the mollification error under "
            "sigma/3 = %.6g" % (eps_cap, target),
            details=history,
        )

    # -- assemble and verify -------------------------------------------------
    params = SmoothingParams(delta=delta_bar, j=j_bar, epsilon=eps_bar,
                             sigma=sigma)
    params.validate(h)
    total_err = w_norm(rho - u)

    supp_rho = support(rho)
    margin_rho = hypograph_margin(supp_rho, j_bar + 2.0, domain)
    support_ok = vanishes_outside(rho, domain, tol=0.0) and margin_rho > 0.0
    gamma = 2.0 * (eps_bar + delta_bar)
    vicinity_ok = supp_rho.within(inflate(supp_u, gamma))
    chain_ok = supp_rho.in_ball(j_bar + 2.0) and supp_rho.within(
        inflate(supp_d, 2.0 * eps_bar)
    )

    return ApproximationReport(
        params=params,
        err_translate=err_translate,
        err_cutoff=err_cutoff,
        err_mollify=err_mollify,
        total_err=total_err,
        support_ok=support_ok,
        vicinity_ok=vicinity_ok,
        chain_ok=chain_ok,
        margin=margin,
        cutoff_slope=cutoff_slope(j_bar),
        rho=rho,
        history=history,
    )


def _difference_modulars(nf, d, s, levels, diag_levels, threads):
    ms = modular_scalar(nf, d, levels=levels, threads=threads)
    mf = modular_fractional(nf, d, s, levels=levels,
                            diag_levels=diag_levels, threads=threads)
    modular = ms.value + mf.value
    if math.isnan(ms.error_estimate) or math.isnan(mf.error_estimate):
        err_est = math.nan
    else:
        err_est = ms.error_estimate + mf.error_estimate
    return modular, err_est


def convergence_experiment(kind, nf, u, domain, s, ladder, target=0.05,
                           increase_tol=0.10, levels=2, diag_levels=4,
                           rel_tol=1e-8, threads=1):
    """Error ladder for one smoothing operator.

    kind is "translate" (ladder of shifts, grid-aligned), "cutoff" (ladder
    of integer j) or "mollify" (ladder of radii >= 2h).  Rows carry the
    W-modular and W-norm of op(u) - u; the verdict requires the final norm
    below ``target`` with no rung increasing by more than ``increase_tol``.
    """
    if kind not in ("translate", "cutoff", "mollify"):
        raise ParameterError("unknown experiment kind %r" % (kind,))
    if not ladder:
        raise ParameterError("parameter ladder must be nonempty")
    rows = []
    for param in ladder:
        if kind == "translate":
            g = translate(u, axis_shift(float(param), u.dim), domain)
        elif kind == "cutoff":
            if int(param) != param or param < 1:
                raise ParameterError("cutoff ladder entries must be integers")
            g = _apply_cutoff(u, int(param))
        else:
            g = mollify(u, float(param))
        d = g - u
        modular, err_est = _difference_modulars(
            nf, d, s, levels, diag_levels, threads
        )
        norm = sobolev_norm(nf, d, s, rel_tol=rel_tol,
                            diag_levels=diag_levels, threads=threads)
        rows.append(
            {"param": float(param), "modular": modular, "norm": norm,
             "error_estimate": err_est}
        )
    norms_seq = [r["norm"] for r in rows]
    monotone_ok = all(
        norms_seq[i + 1] <= norms_seq[i] * (1.0 + increase_tol) + 1e-15
        for i in range(len(norms_seq) - 1)
    )
    verdict = monotone_ok and norms_seq[-1] < target
    return ConvergenceReport(
        kind=kind,
        rows=rows,
        verdict=verdict,
        extras={"target": target, "increase_tol": increase_tol,
                "final_norm": norms_seq[-1]},
    )


def counterexample_experiment(r, d, shifts=(0.25,), grid_ladder=(9, 17, 33, 65, 129),
                              threads=1):
    """Variable-exponent translation counterexample on (-1, 1).

    With p(x) two-valued (r on [0,1), d on (-1,0)) and f = x**(-1/d) capped
    at the smallest positive node, the modular of f converges to the closed
    form d/(d-r) under refinement while the modular of every translate T_h f
    grows without bound (the divergence detector must fire).  The featured
    CSV rows track the first shift.
    """
    if not 1.0 <= r < d:
        raise ParameterError("counterexample needs 1 <= r < d")
    if not shifts:
        raise ParameterError("need at least one translation shift")
    nf = step_exponent(r, d)
    f_series = []
    t_series = {float(hs): [] for hs in shifts}
    norm_series = []
    for n in grid_ladder:
        spec = GridSpec((-1.0,), (1.0,), int(n))
        hn = spec.h
        for hs in shifts:
            if abs(hs / hn - round(hs / hn)) > 1e-9:
                raise AlignmentError(
                    "shift %g is not grid-aligned at n = %d" % (hs, n)
                )
        f_n = sample(kovacik_f(d, cap=hn), spec)
        f_series.append(scalar_modular_value(nf, f_n, 1.0, threads))
        for hs in shifts:
            shifted = translate(f_n, (float(hs),))
            t_series[float(hs)].append(
                scalar_modular_value(nf, shifted, 1.0, threads)
            )
        featured = translate(f_n, (float(shifts[0]),))
        norm_series.append(luxemburg_norm(nf, featured, threads=threads).value)

    featured_series = t_series[float(shifts[0])]
    rows = []
    for i, n in enumerate(grid_ladder):
        err = (
            abs(featured_series[i] - featured_series[i - 1])
            if i > 0 else math.nan
        )
        rows.append(
            {"param": float(n), "modular": featured_series[i],
             "norm": norm_series[i], "error_estimate": err}
        )

    diverged_f, _ = detect_divergence(f_series)
    per_shift = {}
    verdict = not diverged_f
    for hs, series in t_series.items():
        div, at = detect_divergence(series)
        per_shift[hs] = {"series": series, "diverged": div, "diverged_at": at}
        verdict = verdict and div

    closed_form = d / (d - r)
    return ConvergenceReport(
        kind="counterexample",
        rows=rows,
        verdict=verdict,
        extras={
            "r": r,
            "d": d,
            "shifts": [float(hs) for hs in shifts],
            "f_series": f_series,
            "f_diverged": diverged_f,
            "f_closed_form": closed_form,
            "f_final_rel_error": abs(f_series[-1] - closed_form) / closed_form,
            "translates": per_shift,
        },
    )


def finiteness_experiment(nf, profile, box, s, grid_ladder, rel_change=0.05,
                          diag_levels=4, rel_tol=1e-8, threads=1):
    """Refinement ladder of the fractional modular for a closed-form profile.

    The witness that the modular (hence the seminorm) is finite: values
    along the grid ladder stay finite, the divergence detector stays quiet,
    and the final relative change is below ``rel_change``.
    """
    lo, hi = box
    rows = []
    series = []
    for n in grid_ladder:
        spec = GridSpec(tuple(lo), tuple(hi), int(n))
        gf = sample(profile, spec)
        value = frac_modular_value(nf, gf, s, 1.0, diag_levels, threads)
        series.append(value)
        norm = sobolev_norm(nf, gf, s, rel_tol=rel_tol,
                            diag_levels=diag_levels, threads=threads)
        err = abs(series[-1] - series[-2]) if len(series) > 1 else math.nan
        rows.append(
            {"param": float(n), "modular": value, "norm": norm,
             "error_estimate": err}
        )
    diverged, at = detect_divergence(series)
    if series[-1] != 0.0:
        final_change = (
            abs(series[-1] - series[-2]) / abs(series[-1])
            if len(series) > 1 else 0.0
        )
    else:
        final_change = 0.0
    verdict = (
        not diverged
        and all(math.isfinite(v) for v in series)
        and final_change < rel_change
    )
    return ConvergenceReport(
        kind="finiteness",
        rows=rows,
        verdict=verdict,
        extras={"diverged": diverged, "diverged_at": at,
                "final_rel_change": final_change},
    )
