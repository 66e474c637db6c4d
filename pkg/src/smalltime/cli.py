"""Command-line front door.

Four subcommands over a JSON model-spec file:

* ``asymptotics``: regime classification and leading coefficient at a strike;
* ``expansion``: generator value and first-order expansion for a builtin
  test function;
* ``verify``: Monte Carlo convergence table against the predicted
  coefficient, with a PASS/FAIL verdict (exit code 5 on FAIL);
* ``simulate``: direct Monte Carlo estimates.

Exit codes: 0 success, 2 spec/usage error, 3 no asymptotic regime applies,
4 quadrature failure, 5 verification failure, 1 other model errors.
Identical spec and seed produce byte-identical output regardless of
``--workers``.
"""

import argparse
import json
import sys

from . import asymptotics as asym
from . import modelspec
from . import montecarlo as mc
from .errors import (QuadratureDivergence, RegimeUnknown, SmallTimeError,
                     SpecError)
from .generator import apply_exp_generator, apply_generator
from .functions import from_spec as function_from_spec

CSV_HEADER = "t,estimate,std_error,ratio,predicted"


class VerifyFailure(SmallTimeError):
    pass


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v):
    return repr(float(v))


def _csv_rows(rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            _fmt(r["t"]), _fmt(r["estimate"]), _fmt(r["std_error"]),
            _fmt(r["ratio"]) if r["ratio"] is not None else "",
            _fmt(r["predicted"]) if r["predicted"] is not None else "",
        ]))
    return "\n".join(lines) + "\n"


def _query_value(args, spec, key, flag_value, required=True):
    if flag_value is not None:
        return flag_value
    if key in spec.query:
        return spec.query[key]
    if required:
        raise SpecError(f"{key!r} must be given via the query block or flag")
    return None


def cmd_asymptotics(args, spec):
    ec = spec.exp_model()
    K = float(_query_value(args, spec, "strike", args.strike))
    regime = asym.classify_regime(ec, K)
    if regime == asym.OTM:
        res = asym.otm_slope(ec, K, args.tol)
    elif regime == asym.ITM:
        res = asym.itm_slope(ec, K, args.tol)
    else:
        res = asym.atm_coefficient(ec, args.tol)
    record = {"regime": res.regime, "exponent": res.exponent,
              "coefficient": res.coefficient,
              "constant_term": res.constant_term,
              "diagnostics": res.diagnostics}
    if res.alpha is not None:
        record["alpha"] = res.alpha
    _write(args, json.dumps(record) + "\n")
    return 0


def cmd_expansion(args, spec):
    if "f" not in spec.query:
        raise SpecError("expansion needs a 'f' entry in the query block")
    f = function_from_spec(spec.query["f"])
    t = float(_query_value(args, spec, "t", args.t))
    if spec.kind == "model":
        ec = spec.exp_model()
        x = float(spec.query.get("x", ec.S0))
        lf = apply_exp_generator(ec, f, x, args.tol)
    else:
        chars = spec.local_characteristics(args.tol)
        if spec.kind == "markov":
            blk = spec.data["markov"]
            base_f = function_from_spec(blk["f"])
            z0 = blk["Z0"]
            default_x = base_f.value(z0 if len(z0) > 1 else z0[0])
        else:
            default_x = 0.0
        x = float(spec.query.get("x", default_x))
        lf = apply_generator(chars, f, x, args.tol)
    fx = f.value(x)
    record = {"x": x, "t": t, "f_value": fx, "generator_value": lf,
              "expansion": fx + t * lf}
    _write(args, json.dumps(record) + "\n")
    return 0


def _predicted(ec, K, tol):
    regime = asym.classify_regime(ec, K)
    if regime == asym.OTM:
        return asym.otm_slope(ec, K, tol)
    if regime == asym.ITM:
        return asym.itm_slope(ec, K, tol)
    return asym.atm_coefficient(ec, tol)


def cmd_verify(args, spec):
    ec = spec.exp_model()
    K = float(_query_value(args, spec, "strike", args.strike))
    grid = args.t_grid or spec.query.get("t_grid")
    if not grid:
        raise SpecError("verify needs a t_grid (query block or --t-grid)")
    grid = sorted(float(t) for t in grid)
    res = _predicted(ec, K, args.tol)
    a = res.coefficient * args.predicted_scale
    p = res.exponent
    c0 = res.constant_term
    cfg = spec.sim_config(master_seed=args.seed, n_workers=args.workers,
                          n_paths=args.paths)
    rows = []
    for t in sorted(grid, reverse=True):
        est = mc.estimate_call(ec, t, K, cfg)
        scale = t ** p
        rows.append({"t": t, "estimate": est.value, "std_error": est.std_error,
                     "ratio": (est.value - c0) / scale, "predicted": a})
    smallest = rows[-1]
    threshold = 3.0 * smallest["std_error"] / smallest["t"] ** p + 0.05 * abs(a)
    passed = abs(smallest["ratio"] - a) <= threshold
    verdict = {
        "verdict": "PASS" if passed else "FAIL",
        "regime": res.regime,
        "exponent": p,
        "predicted": a,
        "constant_term": c0,
        "smallest_t": smallest["t"],
        "smallest_t_ratio": smallest["ratio"],
        "threshold": threshold,
    }
    if res.regime == asym.ITM:
        verdict["slope_candidates"] = {
            "rate_on_spot": res.coefficient * args.predicted_scale,
            "rate_on_strike": res.diagnostics["alt_coefficient_parity"]
            * args.predicted_scale,
        }
    if args.format == "csv":
        _write(args, _csv_rows(rows))
        if not passed:
            sys.stderr.write(json.dumps(verdict) + "\n")
    else:
        verdict_out = dict(verdict)
        verdict_out["rows"] = rows
        _write(args, json.dumps(verdict_out) + "\n")
    if not passed:
        raise VerifyFailure(
            f"smallest-t ratio {smallest['ratio']!r} outside "
            f"{a!r} +- {threshold!r}")
    return 0


def cmd_simulate(args, spec):
    ec = spec.exp_model()
    t = float(_query_value(args, spec, "t", args.t))
    K = _query_value(args, spec, "strike", args.strike, required=False)
    cfg = spec.sim_config(master_seed=args.seed, n_workers=args.workers,
                          n_paths=args.paths)
    if K is not None:
        est = mc.estimate_call(ec, t, float(K), cfg)
    else:
        import math

        import numpy as np
        samples = mc.simulate_terminal(ec, t, cfg)
        disc = math.exp(-ec.r * t)
        value = disc * float(np.mean(samples))
        se = disc * float(np.std(samples, ddof=1)) / math.sqrt(samples.size)
        est = mc.Estimate(value, se, cfg.n_paths)
    rows = [{"t": t, "estimate": est.value, "std_error": est.std_error,
             "ratio": None, "predicted": None}]
    if args.format == "csv":
        _write(args, _csv_rows(rows))
    else:
        record = {"t": t, "estimate": est.value, "std_error": est.std_error,
                  "n_paths": est.n_paths}
        if K is not None:
            record["strike"] = float(K)
        _write(args, json.dumps(record) + "\n")
    return 0


def _t_grid(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad t-grid {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="smalltime",
        description="Short-maturity asymptotics of jump-diffusion models "
                    "with Monte Carlo verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("asymptotics", cmd_asymptotics),
                     ("expansion", cmd_expansion),
                     ("verify", cmd_verify),
                     ("simulate", cmd_simulate)):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--spec", required=True, help="path to the JSON model spec")
        p.add_argument("--strike", type=float, default=None)
        p.add_argument("--t", type=float, default=None)
        p.add_argument("--t-grid", type=_t_grid, default=None,
                       help="comma separated maturities, e.g. 0.001,0.01,0.03")
        p.add_argument("--seed", type=int, default=None,
                       help="override sim.master_seed (spec default 0)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--paths", type=int, default=None,
                       help="override sim.n_paths")
        p.add_argument("--predicted-scale", type=float, default=1.0,
                       help=argparse.SUPPRESS)  # test fixture hook
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = modelspec.load(args.spec)
        return args.fn(args, spec)
    except SpecError as exc:
        sys.stderr.write(f"spec error: {exc}\n")
        return 2
    except RegimeUnknown as exc:
        sys.stderr.write(f"no asymptotic regime: {exc}\n")
        return 3
    except QuadratureDivergence as exc:
        sys.stderr.write(f"quadrature failure: {exc}\n")
        return 4
    except VerifyFailure as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 5
    except SmallTimeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
