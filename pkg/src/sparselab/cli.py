"""Reproducible experiment runner: one subcommand per experiment.

Every run is fully determined by its flags (including the seed); a JSON
config file passed with --config overrides any flag.  Outputs are CSV (with
a provenance comment header) or JSON (with the config echoed); rows are
emitted in sorted trial order so identical configs give identical files.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .grid import GridWindow, Signal
from .interp import critical_index, fit_log2_slope, gain_exponent, random_model_endpoints
from .oscillatory import LocalizedPiece, badset_measure, iq_l2_norm, normalize_phase
from .randsing import (
    ScaleBlock,
    concentration_experiment,
    hilbert_transform,
    random_hilbert,
    sample_random_set,
    scale_bilinear_bounds,
    summarize_concentration,
)
from .sparse import build_sparse_collection, domination_ratio, verify_sparsity
from .weights import (
    Weight,
    ap_characteristic,
    check_ww_conditions,
    default_family,
    power_weight,
    rh_characteristic,
    weighted_lp_norm,
)


def _parse_kv(text: str, key: str, cast=float):
    k, _, v = text.partition("=")
    if k != key or not v:
        raise argparse.ArgumentTypeError(f"expected {key}=<value>, got {text!r}")
    return cast(v)


def _write_rows(args, rows: list[dict], config: dict) -> None:
    """Emit rows as CSV (comment provenance header) or a JSON document."""
    if not rows:
        raise RuntimeError("experiment produced no rows")
    if args.format == "json":
        doc = {"version": __version__, "config": config, "results": rows}
        text = json.dumps(doc, indent=1) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        out.write(f"# sparselab {__version__}\n")
        out.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()


def _pm_one_signal(rng, offset: int, length: int) -> Signal:
    return Signal(offset, rng.choice([-1.0, 1.0], size=length))


# --- experiment bodies ------------------------------------------------------


def _run_sample_set(args):
    R = sample_random_set(args.alpha, args.seed, args.n)
    rows = [
        {"n": n, "indicator": int(R.indicator(n))}
        for n in range(-args.n, args.n + 1)
        if n != 0
    ]
    return rows


def _run_opnorm(args):
    from .randsing import opnorm_multiplier

    rows = []
    seeds = np.random.default_rng(args.seed).integers(0, 2**63, size=args.trials)
    for s in seeds:
        R = sample_random_set(args.alpha, int(s), (1 << args.k_max) - 1)
        B = ScaleBlock.from_random_set(R, args.k_max)
        rows.append({"alpha": args.alpha, "k": args.k_max, "seed": int(s),
                     "opnorm": opnorm_multiplier(B)})
    return rows


def _run_concentration(args):
    records = concentration_experiment(
        args.alpha, range(args.k_min, args.k_max + 1), args.trials, C=args.const,
        seed=args.seed,
    )
    for row in summarize_concentration(records):
        print(f"k={row['k']:3d} exceed={row['exceed']}/{row['trials']} "
              f"median_ratio={row['median_ratio']:.4f}", file=sys.stderr)
    return records


def _run_scale_bounds(args):
    rows = []
    rng = np.random.default_rng(args.seed)
    for k in range(args.k_min, args.k_max + 1):
        side = 1 << k
        for t in range(args.trials):
            s = int(rng.integers(0, 2**63))
            R = sample_random_set(args.alpha, s, (1 << k) - 1)
            B = ScaleBlock.from_random_set(R, k)
            local = np.random.default_rng(s)
            f = Signal(0, local.standard_normal(side))
            g = Signal(0, local.standard_normal(side))
            rep = scale_bilinear_bounds(f, g, (0, side), B)
            rows.append({"alpha": args.alpha, "k": k, "trial": t, "lhs": rep.lhs,
                         "opnorm": rep.opnorm, "first_bound": rep.first_bound,
                         "second_bound": rep.second_bound})
    return rows


def _run_sparse_check(args):
    rows = []
    rng = np.random.default_rng(args.seed)
    for t in range(args.trials):
        f = _pm_one_signal(rng, -args.n // 2, args.n)
        g = _pm_one_signal(rng, -args.n // 2, args.n)
        S = build_sparse_collection(f, g, args.r)
        ok, report = verify_sparsity(S)
        rows.append({"trial": t, "cubes": len(S), "c0": S.c0, "sparse": int(ok),
                     "violations": len(report["violations"])})
    return rows


def _run_domination(args):
    if args.alpha is None:
        apply_T = lambda f: hilbert_transform(f, args.n)
        operator = "hilbert"
    else:
        R = sample_random_set(args.alpha, args.seed, args.n)
        apply_T = lambda f: random_hilbert(f, R)
        operator = f"random_hilbert(alpha={args.alpha})"
    rows = []
    rng = np.random.default_rng(args.seed + 1)
    for t in range(args.trials):
        f = _pm_one_signal(rng, -args.n // 2, args.n)
        g = _pm_one_signal(rng, -args.n // 2, args.n)
        ratio = domination_ratio(apply_T, f, g, args.r)
        rows.append({"operator": operator, "r": args.r, "n": args.n, "trial": t,
                     "ratio": ratio})
    return rows


def _weight_from_args(args) -> Weight:
    window = GridWindow(-args.n, args.n + 1)
    return power_weight(args.weight, window)


def _run_weight_char(args):
    w = _weight_from_args(args)
    family = default_family(w.window)
    rows = []
    if args.p is not None:
        rows.append(ap_characteristic(w, args.p, family, report=True).to_json())
    if args.r is not None:
        rows.append(rh_characteristic(w, args.r, family, report=True).to_json())
    if not rows:
        raise RuntimeError("weight-char needs --p and/or --r")
    return rows


def _run_ww_check(args):
    w = _weight_from_args(args)
    return [check_ww_conditions(w, args.p, args.alpha, args.r).to_json()]


def _run_wnorm(args):
    w = _weight_from_args(args)
    rng = np.random.default_rng(args.seed)
    if args.alpha is not None:
        R = sample_random_set(args.alpha, args.seed, args.n)
        apply_T = lambda f: random_hilbert(f, R)
    else:
        apply_T = lambda f: hilbert_transform(f, args.n)
    rows = []
    half = args.n // 2
    for t in range(args.trials):
        f = Signal(-half // 2, rng.standard_normal(half))
        tf = apply_T(f)
        rows.append({
            "trial": t,
            "ratio": weighted_lp_norm(tf, w, args.p) / weighted_lp_norm(f, w, args.p),
        })
    return rows


def _phase_from_args(args):
    return normalize_phase({args.phase: 1.0})


def _run_osc_decay(args):
    phase = _phase_from_args(args)
    ks = list(range(args.k_min, args.k_max + 1))
    norms = [iq_l2_norm(LocalizedPiece.create(phase, k)) for k in ks]
    slope, _ = fit_log2_slope(ks, norms)
    return [{"k": k, "norm": norm, "fitted_eta": -slope} for k, norm in zip(ks, norms)]


def _run_badset(args):
    phase = _phase_from_args(args)
    rows = []
    for k in range(args.k_min, args.k_max + 1):
        rep = badset_measure(LocalizedPiece.create(phase, k), args.eps)
        rows.append({"k": k, "eps": rep.eps, "measure": rep.measure, "ratio": rep.ratio})
    return rows


def _run_interp(args):
    pair = random_model_endpoints(args.alpha)
    theta0, r0 = critical_index(pair)
    out = {"theta0": theta0, "r0": r0, "eta": gain_exponent(pair, args.r)}
    print(json.dumps(out))
    return [out]


# --- wiring -----------------------------------------------------------------

_EXPERIMENTS = {
    "sample-set": _run_sample_set,
    "opnorm": _run_opnorm,
    "concentration": _run_concentration,
    "scale-bounds": _run_scale_bounds,
    "sparse-check": _run_sparse_check,
    "domination": _run_domination,
    "weight-char": _run_weight_char,
    "ww-check": _run_ww_check,
    "wnorm": _run_wnorm,
    "osc-decay": _run_osc_decay,
    "badset": _run_badset,
    "interp": _run_interp,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparselab", description="sparse domination experiment runner"
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p, *, alpha=False, p_flag=False, r=False, krange=False, n=False,
               trials=False, weight=False, phase=False, eps=False, const=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--config", default=None, help="JSON file overriding flags")
        if alpha:
            p.add_argument("--alpha", type=float, default=None)
        if p_flag:
            p.add_argument("--p", type=float, default=None)
        if r:
            p.add_argument("--r", type=float, default=None)
        if krange:
            p.add_argument("--k-min", type=int, default=4)
            p.add_argument("--k-max", type=int, default=8)
        if n:
            p.add_argument("--n", type=int, default=1 << 10)
        if trials:
            p.add_argument("--trials", type=int, default=100)
        if weight:
            p.add_argument("--weight", type=lambda s: _parse_kv(s, "a"), default=0.0,
                           help="power weight exponent, e.g. a=0.5")
        if phase:
            p.add_argument("--phase", type=lambda s: _parse_kv(s, "d", int), default=2,
                           help="monomial phase degree, e.g. d=2")
        if eps:
            p.add_argument("--eps", type=float, default=0.5)
        if const:
            p.add_argument("--const", type=float, default=10.0,
                           help="threshold constant C")

    common(sub.add_parser("sample-set"), alpha=True, n=True)
    common(sub.add_parser("opnorm"), alpha=True, krange=True, trials=True)
    common(sub.add_parser("concentration"), alpha=True, krange=True, trials=True,
           const=True)
    common(sub.add_parser("scale-bounds"), alpha=True, krange=True, trials=True)
    common(sub.add_parser("sparse-check"), r=True, n=True, trials=True)
    common(sub.add_parser("domination"), alpha=True, r=True, n=True, trials=True)
    common(sub.add_parser("weight-char"), p_flag=True, r=True, n=True, weight=True)
    common(sub.add_parser("ww-check"), alpha=True, p_flag=True, r=True, n=True,
           weight=True)
    common(sub.add_parser("wnorm"), alpha=True, p_flag=True, n=True, trials=True,
           weight=True)
    common(sub.add_parser("osc-decay"), krange=True, phase=True)
    common(sub.add_parser("badset"), krange=True, phase=True, eps=True)
    common(sub.add_parser("interp"), alpha=True, r=True)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            for key, value in json.load(fh).items():
                setattr(args, key.replace("-", "_"), value)
    # echo only the experiment parameters, not where the output goes
    config = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("config", "out")
    }
    try:
        rows = _EXPERIMENTS[args.experiment](args)
        _write_rows(args, rows, config)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
