"""Command-line front end.

Subcommands: predict (print a theory predictor breakdown as JSON),
run (execute an experiment config), dbm (coupling experiment with per-trial
CSV), sample (write one spectrum to CSV).
"""
import argparse
import json
import sys

from rmtlab import harness, rng, theory
from rmtlab.errors import RMTLabError


def _parse_kv(pairs):
    out = {}
    for item in pairs or ():
        key, _, val = item.partition("=")
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def _cmd_predict(args):
    p = _parse_kv(args.param)
    name = args.formula
    if name == "single_eigenvalue_mean":
        out = {"value": theory.single_eigenvalue_mean(
            p["gamma"], p.get("s4", 0.0), p.get("a2", 1.0))}
    elif name == "variance_shift":
        out = {"value": theory.single_eigenvalue_variance_shift(
            p["gamma"], p.get("s4", 0.0), p.get("a2", 1.0), p["n"])}
    elif name == "indicator_integrals":
        i_s4, i_a2, i_x = theory.indicator_integrals(p["gamma"])
        out = {"I_s4": i_s4, "I_a2edge": i_a2, "I_x": i_x}
    elif name == "variance_functional":
        f = harness.resolve_test_function(
            p["function"], p.get("function_args", {}))
        vb = theory.variance_functional(f, p.get("s4", 0.0), p.get("a2", 1.0))
        out = {
            "double_integral_term": vb.double_integral_term,
            "a2_term": vb.a2_term, "s4_term": vb.s4_term,
            "total": vb.total, "disagreement": vb.disagreement,
        }
    elif name == "mean_expansion":
        f = harness.resolve_test_function(
            p["function"], p.get("function_args", {}))
        mb = theory.mean_expansion(
            f, p.get("s4", 0.0), p.get("a2", 1.0), p["n"])
        out = {
            "leading": mb.leading, "arcsine_term": mb.arcsine_term,
            "edge_term": mb.edge_term, "a2_term": mb.a2_term,
            "s4_term": mb.s4_term, "total": mb.total,
            "disagreement": mb.disagreement,
        }
    elif name == "mesoscopic_variance":
        f = harness.resolve_test_function(
            p["function"], p.get("function_args", {}))
        out = {"value": theory.mesoscopic_variance(f, p.get("c_sym", 1.0))}
    elif name == "gustavsson_scaling":
        center, scale = theory.gustavsson_scaling(
            p["gamma"], p["n"], beta=p.get("beta"))
        out = {"center": center, "scale": scale}
    else:
        raise RMTLabError(f"unknown formula {name!r}")
    print(json.dumps({"formula": name, "params": p, **out}, indent=2))


def _cmd_run(args):
    config = harness.load_config(args.config)
    report = harness.run_experiment(config, workers=args.workers)
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _cmd_dbm(args):
    config = harness.load_config(args.config)
    if config.kind != "dbm_homogenization":
        raise RMTLabError("dbm subcommand needs a dbm_homogenization config")
    report = harness.run_experiment(config, workers=args.workers)
    rows = report["results"].pop("per_trial", [])
    i = config.params["index"]
    harness.write_csv(
        args.csv,
        ["trial", "i", "x_i_t1", "y_i_t1", "zeta_x", "zeta_y", "residual"],
        [[t, i, r[0], r[1], r[2], r[3], r[6]] for t, r in enumerate(rows)],
    )
    print(json.dumps(report, indent=2))


def _cmd_sample(args):
    seed = args.seed if args.seed is not None else rng.default_seed()
    s = harness.sample_spectrum(args.ensemble, args.n, rng.stream(seed, 0))
    harness.write_csv(
        args.out, ["i", "lambda_i"],
        [[i + 1, float(v)] for i, v in enumerate(s.values)],
    )


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rmt", description="spectral fluctuation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="print a theory predictor as JSON")
    p.add_argument("formula")
    p.add_argument("--param", action="append",
                   help="key=value (value parsed as JSON when possible)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--out", help="write the JSON report here too")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("dbm", help="run a coupling experiment, CSV per trial")
    p.add_argument("config")
    p.add_argument("--csv", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_dbm)

    p = sub.add_parser("sample", help="write one spectrum to CSV")
    p.add_argument("ensemble")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    args = parser.parse_args(argv)
    try:
        args.func(args)
    except RMTLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
