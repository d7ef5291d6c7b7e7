"""Command line front end.

Every subcommand reads one JSON config, writes ``<name>.json`` and
``<name>.csv`` into the output directory, and exits 0 on success (verdict
true), 1 on a false verdict or failed audit, 2 on usage or config errors,
3 when the approximation budget is infeasible.  CSV floats are written with
``repr`` so reruns are byte-identical regardless of thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .exceptions import (
    AlignmentError,
    BudgetInfeasibleError,
    ConfigError,
    DomainError,
    MusielakError,
    ParameterError,
    ResolutionError,
    SamplingError,
)
from .grid import Ball, BoxDomain, ConstantBoundary, FullSpace, GridSpec, Hypograph, SineBoundary, sample
from .modular import modular_fractional, modular_scalar
from .nfunction import (
    SamplingSpec,
    check_structure,
    orlicz,
    product,
    step_exponent,
    variable_exponent,
)
from .norms import gagliardo_seminorm, luxemburg_norm
from .pipeline import (
    approximate,
    convergence_experiment,
    counterexample_experiment,
    finiteness_experiment,
)
from .profiles import bump, kovacik_f, linear, tent, windowed_constant

_CONFIG_ERRORS = (
    ConfigError,
    ParameterError,
    DomainError,
    ResolutionError,
    AlignmentError,
    SamplingError,
    KeyError,
    TypeError,
    ValueError,
)


# -- config builders -------------------------------------------------------------


def _exponent_spec(cfg):
    kind = cfg.get("kind")
    if kind == "constant":
        return ("constant", float(cfg["p"]))
    if kind == "cosine":
        return (
            "cosine",
            float(cfg["base"]),
            float(cfg["amp"]),
            float(cfg.get("freq", 1.0)),
        )
    raise ConfigError("unknown exponent kind: %r" % (kind,))


def build_nfunction(cfg):
    family = cfg.get("family")
    dim = int(cfg.get("dim", 1))
    if family == "variable_exponent":
        return variable_exponent(_exponent_spec(cfg["exponent"]), dim=dim)
    if family == "orlicz":
        return orlicz(q=float(cfg.get("q", 2.0)), c=float(cfg.get("c", math.e)),
                      dim=dim)
    if family == "product":
        return product(_exponent_spec(cfg["exponent"]),
                       c=float(cfg.get("c", math.e)), dim=dim)
    if family == "step":
        return step_exponent(float(cfg["r"]), float(cfg["d"]))
    raise ConfigError("unknown N-function family: %r" % (family,))


def build_domain(cfg, dim):
    kind = cfg.get("kind", "fullspace")
    if kind == "fullspace":
        return FullSpace(dim)
    if kind == "ball":
        return Ball(tuple(cfg.get("center", (0.0,) * dim)), float(cfg["radius"]))
    if kind == "box":
        return BoxDomain(tuple(cfg["lo"]), tuple(cfg["hi"]))
    if kind == "hypograph":
        bnd = cfg.get("boundary", {"kind": "constant", "c": 0.0})
        bkind = bnd.get("kind", "constant")
        if bkind == "constant":
            boundary = ConstantBoundary(float(bnd.get("c", 0.0)))
        elif bkind == "sine":
            boundary = SineBoundary(float(bnd["offset"]), float(bnd["amp"]),
                                    float(bnd.get("freq", 1.0)))
        else:
            raise ConfigError("unknown boundary kind: %r" % (bkind,))
        return Hypograph(boundary, dim)
    raise ConfigError("unknown domain kind: %r" % (kind,))


def build_grid(cfg):
    return GridSpec(tuple(cfg["lo"]), tuple(cfg["hi"]), int(cfg["n"]))


def build_profile(cfg):
    kind = cfg.get("kind")
    if kind == "tent":
        return tent(center=float(cfg.get("center", -2.0)),
                    halfwidth=float(cfg.get("halfwidth", 1.0)),
                    height=float(cfg.get("height", 1.0)))
    if kind == "bump":
        return bump(center=float(cfg.get("center", 0.0)),
                    radius=float(cfg.get("radius", 1.0)),
                    scale=float(cfg.get("scale", 1.0)))
    if kind == "window":
        return windowed_constant(float(cfg["lo"]), float(cfg["hi"]),
                                 value=float(cfg.get("value", 1.0)))
    if kind == "kovacik":
        return kovacik_f(float(cfg["d"]), float(cfg["cap"]))
    if kind == "linear":
        return linear(float(cfg.get("slope", 1.0)),
                      float(cfg.get("offset", 0.0)))
    raise ConfigError("unknown profile kind: %r" % (kind,))


# -- output helpers --------------------------------------------------------------


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(out_dir, name, columns, rows):
    path = os.path.join(out_dir, name + ".csv")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    return path


def _sanitize(obj):
    # strict JSON: no NaN/Inf literals, no numpy scalars
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _write_json(out_dir, name, payload):
    path = os.path.join(out_dir, name + ".json")
    with open(path, "w", encoding="ascii") as fh:
        json.dump(_sanitize(payload), fh, sort_keys=True, indent=2,
                  allow_nan=False)
        fh.write("\n")
    return path


def _report_rows(report):
    rows = []
    for row in report.rows:
        rows.append({k: float(row[k]) for k in report.CSV_COLUMNS})
    return rows


def _convergence_outputs(report, out_dir, name):
    _write_json(out_dir, name, report.to_dict())
    _write_csv(out_dir, name, list(report.CSV_COLUMNS), _report_rows(report))
    return 0 if report.verdict else 1


# -- subcommand handlers ---------------------------------------------------------


def _cmd_check_nfunc(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    knobs = dict(cfg.get("sampling", {}))
    knobs.setdefault("seed", seed)
    sampling = SamplingSpec(**knobs)
    report = check_structure(nf, sampling=sampling,
                             tol=float(cfg.get("tol", 1e-9)))
    _write_json(out_dir, "check-nfunc", report.to_dict())
    rows = [
        {"metric": "g_minus_declared", "value": report.declared_bounds[0]},
        {"metric": "g_plus_declared", "value": report.declared_bounds[1]},
        {"metric": "g_minus_estimated", "value": report.estimated_bounds[0]},
        {"metric": "g_plus_estimated", "value": report.estimated_bounds[1]},
        {"metric": "delta2_constant", "value": report.delta2_constant},
        {"metric": "bf_lower", "value": report.bf_bounds[0]},
        {"metric": "bf_upper", "value": report.bf_bounds[1]},
        {"metric": "young_max_residual", "value": report.young_max_residual},
        {"metric": "samples_checked", "value": float(report.samples_checked)},
        {"metric": "violations", "value": float(len(report.violations))},
    ]
    _write_csv(out_dir, "check-nfunc", ["metric", "value"], rows)
    return 0 if report.passed else 1


def _cmd_norm(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    spec = build_grid(cfg["grid"])
    u = sample(build_profile(cfg["profile"]), spec)
    rel_tol = float(cfg.get("rel_tol", 1e-8))
    lux = luxemburg_norm(nf, u, rel_tol=rel_tol, threads=threads,
                         residual=True)
    rows = [
        {"quantity": "luxemburg", "value": lux.value,
         "iterations": lux.iterations, "collapsed": lux.collapsed},
    ]
    payload = {"luxemburg": lux.to_dict()}
    if nf.supports_fractional and "s" in cfg:
        semi = gagliardo_seminorm(nf, u, float(cfg["s"]), rel_tol=rel_tol,
                                  diag_levels=int(cfg.get("diag_levels", 4)),
                                  threads=threads, residual=True)
        rows.append({"quantity": "gagliardo", "value": semi.value,
                     "iterations": semi.iterations,
                     "collapsed": semi.collapsed})
        rows.append({"quantity": "sobolev", "value": lux.value + semi.value,
                     "iterations": lux.iterations + semi.iterations,
                     "collapsed": lux.collapsed and semi.collapsed})
        payload["gagliardo"] = semi.to_dict()
        payload["sobolev"] = lux.value + semi.value
    _write_json(out_dir, "norm", payload)
    _write_csv(out_dir, "norm", ["quantity", "value", "iterations", "collapsed"],
               rows)
    return 0


def _cmd_modular(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    spec = build_grid(cfg["grid"])
    u = sample(build_profile(cfg["profile"]), spec)
    levels = int(cfg.get("levels", 3))
    results = {"scalar": modular_scalar(nf, u, levels=levels, threads=threads)}
    if nf.supports_fractional and "s" in cfg:
        results["fractional"] = modular_fractional(
            nf, u, float(cfg["s"]), levels=min(levels, 2),
            diag_levels=int(cfg.get("diag_levels", 4)), threads=threads,
        )
    rows = []
    diverged = False
    for kind in sorted(results):
        res = results[kind]
        prev = None
        for n, value in res.levels:
            err = abs(value - prev) if prev is not None else math.nan
            rows.append({"kind": kind, "param": float(n), "modular": value,
                         "error_estimate": err})
            prev = value
        diverged = diverged or res.diverged
    _write_json(out_dir, "modular",
                {k: v.to_dict() for k, v in results.items()})
    _write_csv(out_dir, "modular",
               ["kind", "param", "modular", "error_estimate"], rows)
    return 1 if diverged else 0


def _cmd_approximate(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    spec = build_grid(cfg["grid"])
    dom = build_domain(cfg.get("domain", {"kind": "hypograph"}), spec.dim)
    u = sample(build_profile(cfg["profile"]), spec)
    try:
        report = approximate(
            nf, u, dom, float(cfg["s"]), float(cfg["sigma"]),
            rel_tol=float(cfg.get("rel_tol", 1e-8)),
            diag_levels=int(cfg.get("diag_levels", 4)),
            threads=threads,
            delta_start=float(cfg.get("delta_start", 0.25)),
            eps_start=float(cfg.get("eps_start", 0.2)),
        )
    except BudgetInfeasibleError as exc:
        _write_json(out_dir, "approximate", {
            "succeeded": False,
            "stage": exc.stage,
            "message": str(exc),
            "details": exc.details,
        })
        print("budget infeasible at stage %r: %s" % (exc.stage, exc),
              file=sys.stderr)
        return 3
    rho_path = os.path.join(out_dir, "rho.csv")
    report.rho.to_csv(rho_path)
    _write_json(out_dir, "approximate", report.to_dict(rho_ref="rho.csv"))
    row = {
        "delta": report.params.delta,
        "j": float(report.params.j),
        "epsilon": report.params.epsilon,
        "sigma": report.params.sigma,
        "err_translate": report.err_translate,
        "err_cutoff": report.err_cutoff,
        "err_mollify": report.err_mollify,
        "total_err": report.total_err,
        "margin": report.margin,
        "cutoff_slope": report.cutoff_slope,
        "support_ok": report.support_ok,
        "vicinity_ok": report.vicinity_ok,
        "chain_ok": report.chain_ok,
        "succeeded": report.succeeded,
    }
    _write_csv(out_dir, "approximate", list(row), [row])
    return 0 if report.succeeded else 1


def _cmd_converge(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    spec = build_grid(cfg["grid"])
    dom = build_domain(cfg.get("domain", {"kind": "fullspace"}), spec.dim)
    u = sample(build_profile(cfg["profile"]), spec)
    exp = cfg["experiment"]
    report = convergence_experiment(
        exp["kind"], nf, u, dom, float(cfg["s"]),
        [float(p) for p in exp["ladder"]],
        target=float(exp.get("target", 0.05)),
        increase_tol=float(exp.get("increase_tol", 0.10)),
        levels=int(cfg.get("levels", 2)),
        diag_levels=int(cfg.get("diag_levels", 4)),
        rel_tol=float(cfg.get("rel_tol", 1e-8)),
        threads=threads,
    )
    return _convergence_outputs(report, out_dir, "converge")


def _cmd_counterexample(cfg, out_dir, threads, seed):
    ce = cfg["counterexample"]
    report = counterexample_experiment(
        float(ce["r"]), float(ce["d"]),
        shifts=tuple(float(v) for v in ce.get("shifts", (0.25,))),
        grid_ladder=tuple(int(n) for n in ce.get("grid_ladder",
                                                 (9, 17, 33, 65, 129))),
        threads=threads,
    )
    return _convergence_outputs(report, out_dir, "counterexample")


def _cmd_finiteness(cfg, out_dir, threads, seed):
    nf = build_nfunction(cfg["nfunction"])
    fin = cfg["finiteness"]
    box = fin["box"]
    report = finiteness_experiment(
        nf, build_profile(cfg["profile"]),
        (tuple(box[0]), tuple(box[1])), float(cfg["s"]),
        tuple(int(n) for n in fin["grid_ladder"]),
        rel_change=float(fin.get("rel_change", 0.05)),
        diag_levels=int(cfg.get("diag_levels", 4)),
        rel_tol=float(cfg.get("rel_tol", 1e-8)),
        threads=threads,
    )
    return _convergence_outputs(report, out_dir, "finiteness")


_HANDLERS = {
    "check-nfunc": _cmd_check_nfunc,
    "norm": _cmd_norm,
    "modular": _cmd_modular,
    "approximate": _cmd_approximate,
    "converge": _cmd_converge,
    "counterexample": _cmd_counterexample,
    "finiteness": _cmd_finiteness,
}


def _parser():
    parser = argparse.ArgumentParser(
        prog="musielak",
        description="Numerics for fractional Musielak-Sobolev spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.threads < 1:
        print("config error: --threads must be positive", file=sys.stderr)
        return 2
    if not 0 <= args.seed < 2 ** 64:
        print("config error: --seed must fit in 64 bits", file=sys.stderr)
        return 2
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a JSON object")
        os.makedirs(args.out, exist_ok=True)
        handler = _HANDLERS[args.command]
        return handler(cfg, args.out, args.threads, args.seed)
    except BudgetInfeasibleError as exc:  # raised outside _cmd_approximate
        print("budget infeasible: %s" % (exc,), file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % (exc,), file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print("config error: %s" % (exc,), file=sys.stderr)
        return 2
    except MusielakError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
