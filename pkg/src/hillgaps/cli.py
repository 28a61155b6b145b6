"""Command-line front end.

Exit codes: 0 ok, 2 parse/config error, 3 numerical failure (interlacing,
truncation cap, unfittable data), 4 I/O error.

Potentials are given inline as ``name[:param[:param]]``::

    zero
    mathieu:C              q(x) = 2C cos(2 pi x)
    delta-comb:ALPHA       ALPHA * sum_j delta(x - j)
    power-decay:P[:SEED]   |qhat(k)| = k^-P with seeded phases

or as a JSON spec file::

    {"coefficients": [{"k": 1, "re": 0.05, "im": 0.0}],
     "generator": "power-decay", "params": [3, 7]}

where the generator part is optional and, when present, is added to the
listed coefficients.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .analysis import (ConvergenceError, DecayFitError, asymptotics, equivalence_check,
                       reference_gaps, regularity_estimate, smoothing_convergence)
from .discriminant import band_edges_from_trace, potential_trace_fn, sample_trace
from .galerkin import SpectrumError, band_edges, band_edges_fixed, gaps, N_CAP
from .potential import (FourierPotential, PotentialError, add, delta_comb, make_potential,
                        mathieu, power_decay, zero)
from .weights import (WeightError, check_I0, check_I_minus1, check_M0, check_M_minus1,
                      parse_weight)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def parse_potential(text: str, seed: int = 0) -> FourierPotential:
    parts = text.strip().split(":")
    name, args = parts[0], parts[1:]
    try:
        vals = [float(a) for a in args]
    except ValueError as exc:
        raise ConfigError(f"bad potential parameters in {text!r}") from exc
    if name == "zero" and not vals:
        return zero()
    if name == "mathieu" and len(vals) == 1:
        return mathieu(vals[0])
    if name == "delta-comb" and len(vals) == 1:
        return delta_comb(vals[0])
    if name == "power-decay" and len(vals) in (1, 2):
        s = int(vals[1]) if len(vals) == 2 else seed
        return power_decay(vals[0], s)
    raise ConfigError(f"unknown potential {text!r}")


def load_spec_file(path: str, seed: int = 0) -> FourierPotential:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    try:
        coeffs = [(int(r["k"]), complex(float(r.get("re", 0.0)), float(r.get("im", 0.0))))
                  for r in spec.get("coefficients", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad coefficient record ({exc})") from exc
    q = make_potential(coeffs)
    gen = spec.get("generator")
    if gen:
        params = spec.get("params", [])
        q_gen = parse_potential(":".join([gen] + [str(p) for p in params]), seed)
        q = q_gen if not coeffs else add(q, q_gen)
    return q


def _potential(cfg) -> FourierPotential:
    if cfg.spec_file:
        return load_spec_file(cfg.spec_file, cfg.seed)
    if not cfg.potential:
        raise ConfigError("one of --potential or --spec-file is required")
    return parse_potential(cfg.potential, cfg.seed)


def _validate(cfg):
    for name in ("n_max", "tol", "n_cap", "rk_tol", "root_tol", "n0", "galerkin_n"):
        v = getattr(cfg, name, None)
        if v is not None and not v > 0:
            raise ConfigError(f"--{name.replace('_', '-')} must be positive")
    if cfg.n_max * 4 > cfg.n_cap:
        raise ConfigError("--n-max must not exceed --n-cap / 4")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _config_echo(cfg) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(cfg).items()) if k not in skip}


def emit(cfg, records: list[dict], meta: dict) -> None:
    head = {"tool": "hillgaps", "version": __version__, **{f"config.{k}": v for k, v in _config_echo(cfg).items()},
            **meta}
    if cfg.format == "json":
        clean = {k: _jsonable(v) for k, v in head.items()}
        text = json.dumps({"meta": clean, "records": [{k: _jsonable(v) for k, v in r.items()}
                                                      for r in records]}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for k, v in head.items():
            buf.write(f"# {k}={_fmt(v) if not isinstance(v, (list, dict)) else json.dumps(_jsonable(v))}\n")
        if records:
            w = csv.writer(buf, lineterminator="\n")
            cols = list(records[0])
            w.writerow(cols)
            for r in records:
                w.writerow([_fmt(r[c]) for c in cols])
        text = buf.getvalue()
    if cfg.out and cfg.out != "-":
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _spectrum(cfg, q):
    method = cfg.method
    if method == "auto":
        method = "discriminant" if q.name == "delta-comb" else "galerkin"
    if method == "discriminant":
        return band_edges_from_trace(potential_trace_fn(q, cfg.rk_tol), cfg.n_max, cfg.root_tol)
    if cfg.galerkin_n:
        return band_edges_fixed(q, cfg.n_max, cfg.galerkin_n)
    return band_edges(q, cfg.n_max, tol=cfg.tol, N0=cfg.n0, N_cap=cfg.n_cap)


def cmd_gaps(cfg) -> int:
    q = _potential(cfg)
    res = _spectrum(cfg, q)
    emit(cfg, res.records(), {"potential": repr(q), "method": res.method,
                              "lambda0": res.lambda0, "lambda0_err_est": res.err_est[0],
                              "N_used": res.N_used})
    return EXIT_OK


def _analysis_gaps(cfg, q):
    if cfg.method == "galerkin" or (cfg.method == "auto" and q.name != "delta-comb"):
        res = band_edges(q, cfg.n_max, tol=cfg.tol, N0=cfg.n0, N_cap=cfg.n_cap)
        return gaps(res), res.method
    return gaps(_spectrum(cfg, q)), "discriminant"


def _n_lo(cfg):
    if cfg.n_lo is not None:
        return cfg.n_lo
    return 8 if cfg.n_max >= 16 else 1


def cmd_asymptotics(cfg) -> int:
    q = _potential(cfg)
    g, method = _analysis_gaps(cfg, q)
    info = asymptotics(q, g, _n_lo(cfg), cfg.n_max)
    r = info.pop("remainder")
    ns = np.arange(1, cfg.n_max + 1)
    two_q = 2.0 * np.abs(q.coeff(ns))
    recs = [{"n": int(n), "gamma": float(gm), "two_qhat": float(t), "remainder": float(x)}
            for n, gm, t, x in zip(ns, g.gamma, two_q, r)]
    emit(cfg, recs, {"potential": repr(q), "method": method, **info})
    return EXIT_OK


def cmd_classify(cfg) -> int:
    q = _potential(cfg)
    w = parse_weight(cfg.weight)
    g, method = _analysis_gaps(cfg, q)
    s_hat = regularity_estimate(g, _n_lo(cfg), cfg.n_max)
    rep = equivalence_check(q, w, cfg.n_max, tol=cfg.ratio_c, g=g, n0=min(8, cfg.n_max))
    emit(cfg, rep.records(), {"potential": repr(q), "method": method, "s_hat": s_hat,
                              "weight": rep.weight, "verdict": rep.verdict, "C": rep.C,
                              "r_min": rep.r_min, "r_max": rep.r_max,
                              "offending_cutoff": rep.offending_cutoff,
                              "q_norm_trend": rep.q_status, "gamma_norm_trend": rep.gamma_status,
                              "note": rep.note})
    return EXIT_OK


def cmd_oracle_compare(cfg) -> int:
    q = _potential(cfg)
    if cfg.galerkin_n:
        gal = band_edges_fixed(q, cfg.n_max, cfg.galerkin_n)
    else:
        gal = band_edges(q, cfg.n_max, tol=cfg.tol, N0=cfg.n0, N_cap=cfg.n_cap)
    disc = band_edges_from_trace(potential_trace_fn(q, cfg.rk_tol), cfg.n_max, cfg.root_tol)
    labels = ["lambda0"] + [f"lambda{n}{s}" for n in range(1, cfg.n_max + 1) for s in "-+"]
    ge, de = gal.edges(), disc.edges()
    recs = [{"edge": lab, "galerkin": float(a), "discriminant": float(b), "deviation": float(abs(a - b))}
            for lab, a, b in zip(labels, ge, de)]
    emit(cfg, recs, {"potential": repr(q), "max_deviation": float(np.max(np.abs(ge - de))),
                     "galerkin_N": gal.N_used})
    return EXIT_OK


def cmd_weights_check(cfg) -> int:
    w = parse_weight(cfg.weight)
    reports = []
    if cfg.s is not None and cfg.s >= 0:
        reports.append(check_I0(w, cfg.s, cfg.k_max))
    reports.append(check_M0(w, cfg.k_max))
    if cfg.s is not None:
        reports.append(check_I_minus1(w, cfg.s, cfg.k_max, cfg.delta))
    reports.append(check_M_minus1(w, cfg.k_max))
    recs = [{"class": r.class_name, "verdict": r.verdict, "k_max": r.k_range[1],
             "reason": r.reason, "witnesses": json.dumps(_jsonable(r.witnesses), sort_keys=True)}
            for r in reports]
    emit(cfg, recs, {"weight": str(w)})
    return EXIT_OK


def cmd_smoothing(cfg) -> int:
    q = _potential(cfg)
    try:
        ks = [int(k) for k in cfg.k_list.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --k-list {cfg.k_list!r}") from exc
    tab = smoothing_convergence(q, ks, cfg.n_max, cfg.tol_sup)
    emit(cfg, tab.records(), {"potential": repr(q), "decreasing": tab.decreasing,
                              "converged": tab.converged})
    return EXIT_OK


def cmd_trace(cfg) -> int:
    q = _potential(cfg)
    tr = sample_trace(potential_trace_fn(q, cfg.rk_tol), cfg.lambda_min, cfg.lambda_max, cfg.num)
    emit(cfg, tr.records(), {"potential": repr(q), "brackets": [list(b) for b in tr.brackets]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="inline potential, e.g. mathieu:0.05")
    common.add_argument("--spec-file", help="JSON potential spec file")
    common.add_argument("--weight", default="power:0", help="weight descriptor, e.g. power:2")
    common.add_argument("--n-max", type=int, default=10)
    common.add_argument("--tol", type=float, default=1e-8, help="Galerkin edge tolerance")
    common.add_argument("--n-cap", type=int, default=N_CAP)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rk-tol", type=float, default=1e-10)
    common.add_argument("--root-tol", type=float, default=1e-9)
    common.add_argument("--method", choices=("auto", "galerkin", "discriminant"), default="auto")
    common.add_argument("--n0", type=int, default=None, help="initial Galerkin truncation")
    common.add_argument("--galerkin-n", type=int, default=None, help="fixed Galerkin truncation")
    common.add_argument("--n-lo", type=int, default=None, help="first index used in decay fits")

    p = argparse.ArgumentParser(prog="hillgaps", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hillgaps {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gaps", parents=[common], help="band edges and gap lengths")
    sp.set_defaults(func=cmd_gaps)
    sp = sub.add_parser("asymptotics", parents=[common], help="gamma(n) - 2|qhat(n)| table")
    sp.set_defaults(func=cmd_asymptotics)
    sp = sub.add_parser("classify", parents=[common], help="regularity estimate and norm equivalence")
    sp.add_argument("--ratio-c", type=float, default=10.0)
    sp.set_defaults(func=cmd_classify)
    sp = sub.add_parser("oracle-compare", parents=[common], help="Galerkin vs discriminant edges")
    sp.set_defaults(func=cmd_oracle_compare)
    sp = sub.add_parser("weights-check", parents=[common], help="weight class predicates")
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--k-max", type=int, default=2 ** 16)
    sp.set_defaults(func=cmd_weights_check)
    sp = sub.add_parser("smoothing", parents=[common], help="gaps of truncated potentials")
    sp.add_argument("--k-list", default="8,16,32,64")
    sp.add_argument("--tol-sup", type=float, default=0.05)
    sp.set_defaults(func=cmd_smoothing)
    sp = sub.add_parser("trace", parents=[common], help="sampled discriminant (lambda, delta)")
    sp.add_argument("--lambda-min", type=float, default=-10.0)
    sp.add_argument("--lambda-max", type=float, default=200.0)
    sp.add_argument("--num", type=int, default=401)
    sp.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(cfg)
        return cfg.func(cfg)
    except (ConfigError, PotentialError, WeightError) as exc:
        print(f"hillgaps: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpectrumError, DecayFitError, ConvergenceError) as exc:
        print(f"hillgaps: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"hillgaps: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"hillgaps: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
