"""Command-line front end.

Subcommands ``estimate``, ``markov``, ``gaussian`` and ``simulate`` emit a
JSON report (or CSV curve columns). Exit codes: 0 success, 1 usage,
2 input/validation, 3 numerical failure. Warnings never change the exit code.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from . import entropy as ec
from . import gaussian as ga
from . import markov as mk
from . import sim
from .errors import (
    EmbeddingFailureError,
    ExcessEntropyError,
    NotPositiveDefiniteError,
    PrecisionNotReachedError,
)
from .fgn import fgn_model, HurstParam
from .io import (
    SCHEMA,
    InputError,
    curve_csv,
    dumps_report,
    load_json,
    read_reals,
    read_symbols,
    write_atomic,
)

log = logging.getLogger("excess_entropy")

EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 1, 2, 3
MAX_BLOCKS = 64
MAX_GAUSS_BLOCKS = 20_000
MAX_CEPSTRUM = 100_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--output", "-o", help="report path (default: stdout)")
    p.add_argument("--unit", choices=("nats", "bits"), default="nats")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tolerance", type=float, help="convergence tolerance override")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_source(p, what):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", "-i", help=f"{what} file ('-' for stdin)")
    src.add_argument("--model", help=f"inline {what} JSON")


def build_parser():
    parser = _Parser(prog="excess-entropy", description="Excess entropy of stationary processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="empirical estimators from an observed sequence")
    p.add_argument("--input", "-i", required=True, help="symbol file ('-' for stdin)")
    p.add_argument("--input-format", choices=("text", "bytes", "f64"), default="text")
    p.add_argument("--alphabet", type=int, help="alphabet size (default: max symbol + 1)")
    p.add_argument("--blocks", "-N", type=int, help="maximum block length")
    p.add_argument("--quantize", type=int, metavar="L", help="read real values and quantise to L levels")
    p.add_argument("--scheme", choices=("equal-probability", "equal-width"), default="equal-probability")
    p.add_argument("--series", choices=("D", "Ipf", "E"), default="D")
    p.add_argument("--miller-madow", action="store_true")
    p.add_argument("--no-h-mu-proxy", dest="h_mu_proxy", action="store_false",
                   help="do not use h(N) as an entropy-rate proxy for E_n")
    p.add_argument("--seed", type=int, help="recorded in the report only")
    _add_common(p)

    p = sub.add_parser("markov", help="exact entropy rate and excess entropy of a Markov chain")
    _add_source(p, "Markov model")
    p.add_argument("--blocks", "-N", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("gaussian", help="analytic pipeline for a stationary Gaussian process")
    _add_source(p, "Gaussian model")
    p.add_argument("--blocks", "-N", type=int, default=200)
    p.add_argument("--cepstrum", "-K", type=int, default=ga.DEFAULT_K)
    p.add_argument("--summability", type=int, default=10_000, metavar="K",
                   help="lags for the covariance summability report")
    _add_common(p)

    p = sub.add_parser("simulate", help="seeded sample of an example process")
    _add_source(p, "simulation spec")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--length", type=int, help="override the spec length")
    p.add_argument("--output", "-o", help="sample path (default: stdout)")
    p.add_argument("--format", choices=("text", "csv", "f64"),
                   help="text tokens for symbols, csv or little-endian f64 for reals")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _check_range(name, value, lo, hi):
    if value is not None and not lo <= value <= hi:
        raise UsageError(f"--{name} must be in [{lo}, {hi}], got {value}")


def _base_report(args, config):
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "config": config,
        "seed": config.get("seed"),
    }


def _series_fields(series):
    d = series.to_dict()
    d.pop("unit")
    return d


# --- subcommands -----------------------------------------------------------

def cmd_estimate(args):
    _check_range("blocks", args.blocks, 1, MAX_BLOCKS)
    if args.quantize is not None:
        _check_range("quantize", args.quantize, 2, 1 << 16)
        x = read_reals(args.input, "f64" if args.input_format == "f64" else "text")
        seq = sim.quantize(x, args.quantize, args.scheme)
    elif args.input_format == "f64":
        raise UsageError("--input-format f64 requires --quantize L")
    else:
        seq = read_symbols(args.input, args.input_format, args.alphabet)

    L, A = len(seq), seq.alphabet_size
    N = args.blocks if args.blocks is not None else ec.default_max_block(L, A)
    N = min(N, L)
    curve = ec.entropy_curve(seq, N, miller_madow=args.miller_madow)
    under = curve.diagnostics["undersampled"]
    usable = (min(under) - 1) if under else N
    warnings = []
    if under:
        warnings.append({"kind": "undersampling", "block_lengths": under})
    for n, mag in curve.diagnostics["concavity"]:
        warnings.append({"kind": "concavity", "n": n, "magnitude": mag})
    for n, mag in curve.diagnostics["monotonicity"]:
        warnings.append({"kind": "monotonicity", "n": n, "magnitude": mag})

    h_mu = None
    if args.h_mu_proxy and usable >= 1:
        h_mu = float(curve.gains[usable - 1])
    series = ec.estimator_series(curve, h_mu)
    series.lower_confidence = h_mu is not None
    for kind, n, mag in series.warnings:
        warnings.append({"kind": "ordering", "violation": kind, "n": n, "magnitude": mag})

    policy = ec.ConvergencePolicy(
        series=args.series,
        tol=args.tolerance if args.tolerance is not None else 1e-2,
        mode="first",
    )
    values = series.get(args.series)
    limit = min(values.size, usable if args.series != "Ipf" else usable // 2)
    try:
        est = ec.estimate_limit(values[:max(limit, 0)], series.n[:max(limit, 0)], policy)
    except ec.InsufficientDataError:
        if np.all(values == 0):
            est = ec.Estimate("finite", 0.0, converged_at=1, last=0.0)
        else:
            est = ec.Estimate("undetermined", None)
            warnings.append({"kind": "insufficient-data", "usable_blocks": usable})

    config = {
        "input": args.input, "input_format": args.input_format, "alphabet": A, "length": L,
        "blocks": N, "quantize": args.quantize, "scheme": args.scheme if args.quantize else None,
        "series": args.series, "tolerance": policy.tol, "miller_madow": args.miller_madow,
        "h_mu_proxy": args.h_mu_proxy, "unit": args.unit, "seed": args.seed,
    }
    report = _base_report(args, config)
    report.update(_series_fields(series))
    report.update({
        "h_mu_source": "proxy h(N), lower-confidence" if h_mu is not None else None,
        "usable_blocks": usable,
        "estimate": est.to_dict(),
        "verdict": str(est),
        "warnings": warnings,
    })
    return report


def _markov_model(spec):
    if not isinstance(spec, dict) or "P" not in spec:
        raise InputError('Markov model JSON must be an object with key "P"')
    return mk.MarkovModel.from_transition(spec["P"], spec.get("mu"))


def cmd_markov(args):
    _check_range("blocks", args.blocks, 1, MAX_BLOCKS)
    spec = load_json(args.model or args.input)
    model = _markov_model(spec)
    N = max(args.blocks, 2)
    curve = mk.markov_entropy_curve(model, N)
    h_mu = mk.markov_entropy_rate(model)
    series = ec.estimator_series(curve, h_mu)
    policy = ec.ConvergencePolicy(series="D", tol=args.tolerance or 1e-6)
    try:
        est = ec.excess_entropy_estimate(series, policy)
    except ec.InsufficientDataError:
        est = None
    report = _base_report(args, {"P": model.transition.tolist(), "blocks": N, "unit": args.unit})
    report.update({
        "mu": model.stationary.tolist(),
        "stationary_entropy": ec.block_entropy_exact(model.stationary, tol=1e-9),
        "entropy_rate": h_mu,
        "excess_entropy": mk.markov_excess_entropy(model),
        **_series_fields(series),
        "estimate": None if est is None else est.to_dict(),
        "verdict": "finite" if est is None else str(est),
    })
    return report


def _gaussian_model(spec):
    if not isinstance(spec, dict):
        raise InputError("Gaussian model JSON must be an object")
    dens = spec.get("density")
    r = spec.get("r")
    if dens is None and r is None:
        raise InputError('Gaussian model needs "r" or "density"')
    taper = spec.get("taper", "none")
    if dens is None:
        return ga.GaussianModel(autocovariance=r, name="r-table", taper=taper), {}
    kind = dens.get("kind")
    extra = {}
    if kind == "ar1":
        model = ga.ar1(dens["phi"])
    elif kind == "fgn":
        H = HurstParam(float(dens["H"])).H
        model = fgn_model(H)
        extra["H"] = H
    elif kind == "white":
        model = ga.white_noise(dens.get("variance", 1.0))
    elif kind == "table":
        model = ga.from_table(dens["lam"], dens["f"])
    else:
        raise InputError(f"unknown density kind {kind!r}")
    if r is not None:
        base = model
        model = ga.GaussianModel(autocovariance=r, log_density=base.log_f, name=base.name)
        model.check_consistency(min(20, len(r) - 1))
    return model, extra


def cmd_gaussian(args):
    _check_range("blocks", args.blocks, 2, MAX_GAUSS_BLOCKS)
    _check_range("cepstrum", args.cepstrum, 1, MAX_CEPSTRUM)
    spec = load_json(args.model or args.input)
    try:
        model, extra = _gaussian_model(spec)
    except KeyError as exc:
        raise InputError(f"density spec is missing {exc.args[0]!r}") from None
    warnings = []
    blocks, Ks = args.blocks, args.summability
    if "density" not in spec:
        n_lags = len(spec["r"])
        if blocks > n_lags:
            warnings.append({"kind": "blocks-clamped", "blocks": n_lags})
            blocks = n_lags
        Ks = min(Ks, n_lags - 1)

    curve = ga.gaussian_entropy_curve(model, blocks)
    h_mu = h_err = None
    ceps = mi = None
    try:
        rate = ga.kolmogorov_entropy_rate(model)
        h_mu, h_err = float(rate.value), float(rate.error)
        ceps = ga.cepstrum_coefficients(model, args.cepstrum)
        policy = ec.ConvergencePolicy(series="S", tol=args.tolerance or ga.CEPSTRUM_TOL)
        mi = ga.mutual_info_cepstrum(ceps, policy)
    except ga.InvalidDensityError as exc:
        warnings.append({"kind": "density", "message": str(exc)})

    series = ec.estimator_series(curve, h_mu, check=False)
    for kind, n, mag in series.warnings:
        warnings.append({"kind": "ordering", "violation": kind, "n": n, "magnitude": mag})

    summ = None
    if not model.has_covariance:
        Ks = min(Ks, 2000)
    if Ks >= 1:
        summ = ga.covariance_summability_report(model, Ks)

    config = {"model": spec, "blocks": blocks, "cepstrum": args.cepstrum,
              "summability": args.summability, "unit": args.unit,
              "tolerance": args.tolerance or ga.CEPSTRUM_TOL, "provenance": model.provenance}
    report = _base_report(args, config)
    report.update(_series_fields(series))
    report["h_mu_error"] = h_err
    if ceps is not None:
        report.update({
            "b0": ceps.b0,
            "b": ceps.b.tolist(),
            "b_error": ceps.errors.tolist(),
            "S": mi.partial_sums.tolist(),
            "estimate": mi.estimate.to_dict(),
            "verdict": str(mi.estimate),
        })
        if "H" in extra:
            k = ceps.k
            tail = k >= max(1, ceps.K // 10)
            slope, _, r2 = ec.fit_log_growth(k[tail], mi.partial_sums[tail])
            report.update({
                "gamma": ceps.b.tolist(),
                "n_gamma": (k * np.abs(ceps.b)).tolist(),
                "slope": slope,
                "slope_r2": r2,
                "expected_slope": (2 * extra["H"] - 1) ** 2 / 8,
            })
    if summ is not None:
        report["summability"] = {
            "K": int(summ.lags[-1]),
            "partial_sum": float(summ.partial_sums[-1]),
            "decay_exponent": summ.decay_exponent,
            "growth_exponent": summ.growth_exponent,
            "verdict": summ.verdict,
        }
    report["warnings"] = warnings
    return report


def cmd_simulate(args):
    spec_dict = load_json(args.model or args.input)
    if not isinstance(spec_dict, dict):
        raise InputError("simulation spec must be a JSON object")
    if args.seed is not None:
        spec_dict["seed"] = args.seed
    if args.length is not None:
        spec_dict["length"] = args.length
    spec = sim.SimSpec.from_dict(spec_dict)
    out = sim.simulate(spec)
    fmt = args.format or ("text" if spec.symbolic else "csv")
    if spec.symbolic:
        if fmt == "f64":
            raise UsageError("f64 output is only available for real-valued kinds")
        data = "\n".join(map(str, out.symbols.tolist())) + "\n"
    elif fmt == "f64":
        data = np.asarray(out, dtype="<f8").tobytes()
    else:
        data = "\n".join(repr(float(v)) for v in out) + "\n"
    return data


# --- entry point -----------------------------------------------------------

def _emit(args, payload):
    if args.output:
        write_atomic(args.output, payload)
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
    else:
        sys.stdout.write(payload)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help/--version exit 0, argument errors exit 1
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handlers = {
        "estimate": cmd_estimate,
        "markov": cmd_markov,
        "gaussian": cmd_gaussian,
        "simulate": cmd_simulate,
    }
    try:
        result = handlers[args.command](args)
        if args.command == "simulate":
            payload = result
        elif args.format == "csv":
            payload = curve_csv(result, args.unit)
        else:
            payload = dumps_report(result, args.unit)
        _emit(args, payload)
    except UsageError as exc:
        print(f"excess-entropy: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionNotReachedError, NotPositiveDefiniteError, EmbeddingFailureError) as exc:
        print(f"excess-entropy: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ExcessEntropyError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"excess-entropy: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
