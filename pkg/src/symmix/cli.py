"""Command-line front door: fit, density, simulate, scan.

Exit codes: 0 success, 2 malformed input, 3 degenerate fit, 4 density
pathology.  All machine outputs embed a deterministic run manifest
(execution details like timestamps and worker counts stay out of it, so
reruns and different --jobs settings produce byte-identical files).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .contrast import ContrastConfig, ContrastEvaluator, default_trunc_h
from .density import DensityConfig, deconvolved_density_values, default_bandwidth, \
    estimate_density, estimate_g
from .errors import DegenerateFit, DegenerateParam, EmptyPositivePart, SampleTooSmall, \
    SymmixError
from .estimator import FitConfig, fit, robust_scale
from .params import EuclideanParam, Sample
from .simulate import MCSummary, ScenarioSpec, run_scenario
from .weights import build_weight_rule, scale_aware_cutoff

__all__ = ["main", "RunManifest", "read_numeric_csv", "rainfall_path"]


class CliInputError(SymmixError):
    """Malformed command-line input or data file."""


@dataclass
class RunManifest:
    subcommand: str
    input_path: str | None
    input_sha256: str | None
    config: dict
    seed: int | None
    version: str
    created_at: float
    jobs: int = 1

    def core_dict(self) -> dict:
        """Deterministic portion embedded in outputs; excludes timing and worker count."""
        return {
            "subcommand": self.subcommand,
            "input_path": self.input_path,
            "input_sha256": self.input_sha256,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
        }


def rainfall_path() -> str:
    """Bundled 70-city annual precipitation dataset (inches)."""
    return os.path.join(os.path.dirname(__file__), "data", "rainfall.csv")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_float(token: str) -> float | None:
    try:
        v = float(token)
    except ValueError:
        return None
    return v


def read_numeric_csv(path: str) -> np.ndarray:
    """Read the first numeric column of a CSV (comma or whitespace delimited).

    A header row is tolerated; afterwards every row must provide a finite
    number in the chosen column.  Errors name the offending line.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc

    rows = [(i + 1, ln) for i, ln in enumerate(lines)]
    while rows and rows[-1][1].strip() == "":
        rows.pop()
    if not rows:
        raise CliInputError(f"{path}: file is empty")

    delim = "," if "," in rows[0][1] else None

    def split(ln: str) -> list[str]:
        return [t.strip() for t in ln.split(delim)]

    start = 0
    col = None
    first_fields = split(rows[0][1])
    for j, tok in enumerate(first_fields):
        if tok and _parse_float(tok) is not None:
            col = j
            break
    if col is None:
        start = 1     # header row
        if len(rows) == 1:
            raise CliInputError(f"{path}: no numeric data after header")
        second = split(rows[1][1])
        for j, tok in enumerate(second):
            if tok and _parse_float(tok) is not None:
                col = j
                break
        if col is None:
            raise CliInputError(f"{path}: line 2: no numeric column found")

    values = []
    for lineno, ln in rows[start:]:
        fields = split(ln)
        if col >= len(fields) or fields[col] == "":
            raise CliInputError(f"{path}: line {lineno}: blank or missing numeric field")
        v = _parse_float(fields[col])
        if v is None:
            raise CliInputError(f"{path}: line {lineno}: non-numeric value {fields[col]!r}")
        if not np.isfinite(v):
            raise CliInputError(f"{path}: line {lineno}: non-finite value {fields[col]!r}")
        values.append(v)
    return np.asarray(values, dtype=float)


def _load_sample(path: str, min_n: int = 10) -> Sample:
    values = read_numeric_csv(path)
    if values.size < min_n:
        raise CliInputError(f"{path}: need at least {min_n} observations, got {values.size}")
    return Sample(values)


def _contrast_config_from_args(sample: Sample, args) -> ContrastConfig:
    nodes = args.weight_nodes
    if args.cutoff is not None:
        cutoff = args.cutoff
    else:
        cutoff = scale_aware_cutoff(robust_scale(sample.values))
    rule = build_weight_rule("laplace_default", nodes, cutoff)
    trunc_h = args.trunc_h if args.trunc_h is not None else default_trunc_h(sample.n, cutoff=cutoff)
    return ContrastConfig(rule, trunc_h)


def _config_echo(args, sample: Sample, ccfg: ContrastConfig, extra: dict | None = None) -> dict:
    cfg = {
        "weight_nodes": ccfg.weight_rule.node_count,
        "cutoff": ccfg.weight_rule.cutoff,
        "trunc_h": ccfg.trunc_h,
        "starts": args.starts,
        "n": sample.n,
    }
    if extra:
        cfg.update(extra)
    return cfg


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_theta(text: str) -> EuclideanParam:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliInputError(f"--theta expects p,alpha,beta, got {text!r}")
    vals = [_parse_float(p) for p in parts]
    if any(v is None for v in vals):
        raise CliInputError(f"--theta expects three numbers, got {text!r}")
    try:
        return EuclideanParam(*vals)
    except DegenerateParam as exc:
        raise CliInputError(f"--theta invalid: {exc}") from exc


def _parse_triple(text: str, flag: str) -> tuple[float, float, int]:
    parts = text.replace(":", " ").split()
    if len(parts) != 3:
        raise CliInputError(f"{flag} expects lo:hi:count, got {text!r}")
    lo, hi = _parse_float(parts[0]), _parse_float(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        count = None
    if lo is None or hi is None or count is None or count < 1:
        raise CliInputError(f"{flag} expects lo:hi:count with count >= 1, got {text!r}")
    return lo, hi, count


def cmd_fit(args) -> int:
    sample = _load_sample(args.csv_path)
    ccfg = _contrast_config_from_args(sample, args)
    result = fit(sample, FitConfig(starts=args.starts), ccfg)
    manifest = RunManifest(
        subcommand="fit", input_path=args.csv_path, input_sha256=_sha256(args.csv_path),
        config=_config_echo(args, sample, ccfg), seed=None,
        version=__version__, created_at=time.time())
    payload = result.to_dict()
    payload["manifest"] = {**payload["manifest"], **manifest.core_dict()}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def cmd_density(args) -> int:
    sample = _load_sample(args.csv_path)
    ccfg = _contrast_config_from_args(sample, args)
    if args.theta is not None:
        theta = _parse_theta(args.theta)
    else:
        theta = fit(sample, FitConfig(starts=args.starts), ccfg).theta_hat
    bandwidth = args.bandwidth if args.bandwidth is not None else default_bandwidth(sample.n)
    grid = _parse_triple(args.grid, "--grid") if args.grid is not None else None
    dcfg = DensityConfig(bandwidth=bandwidth, grid=grid)
    curve = estimate_density(sample, theta, dcfg)
    g_curve = estimate_g(sample, dcfg, xs=curve.xs)
    # reconstruction column evaluates f at the shifted points exactly, so the
    # identity with g_n holds at quadrature precision on any output grid
    fa = deconvolved_density_values(sample, theta, bandwidth, curve.xs - theta.alpha)
    fb = deconvolved_density_values(sample, theta, bandwidth, curve.xs - theta.beta)
    recon = theta.p * fa + (1.0 - theta.p) * fb

    manifest = RunManifest(
        subcommand="density", input_path=args.csv_path, input_sha256=_sha256(args.csv_path),
        config=_config_echo(args, sample, ccfg, {
            "bandwidth": bandwidth,
            "grid": list(grid) if grid else None,
            "theta": {"p": theta.p, "alpha": theta.alpha, "beta": theta.beta},
        }),
        seed=None, version=__version__, created_at=time.time())

    lines = ["x,f_raw,f_tilde,g_n,g_reconstructed"]
    for i in range(curve.xs.size):
        lines.append(",".join(repr(float(v)) for v in
                              (curve.xs[i], curve.f_raw[i], curve.f_tilde[i],
                               g_curve.values[i], recon[i])))
    _emit("\n".join(lines) + "\n", args.out)

    meta = {**curve.metadata(), "manifest": manifest.core_dict()}
    meta_text = json.dumps(meta, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(meta_text)
    else:
        sys.stderr.write(meta_text)
    return 0


def _summary_csv(summary: MCSummary) -> str:
    spec = summary.spec
    head = ("family,n,p0,alpha0,beta0,mean_p,mean_alpha,mean_beta,"
            "sd_p,sd_alpha,sd_beta,failures")
    means = summary.empirical_means
    sds = summary.empirical_sds
    mtxt = ["", "", ""] if means is None else [repr(float(v)) for v in means]
    stxt = ["", "", ""] if sds is None else [repr(float(v)) for v in sds]
    row = (f"{spec.family},{spec.n},{spec.theta0.p!r},{spec.theta0.alpha!r},"
           f"{spec.theta0.beta!r},{','.join(mtxt)},{','.join(stxt)},{summary.failures}")
    return head + "\n" + row + "\n"


def cmd_simulate(args) -> int:
    try:
        theta0 = _parse_theta(args.theta0)
        spec = ScenarioSpec(family=args.family, theta0=theta0, n=args.n,
                            replications=args.M, seed=args.seed,
                            mix_lambda=args.mix_lambda)
    except (ValueError, DegenerateParam) as exc:
        raise CliInputError(str(exc)) from exc
    summary = run_scenario(spec, FitConfig(starts=args.starts), None, jobs=args.jobs)
    manifest = RunManifest(
        subcommand="simulate", input_path=None, input_sha256=None,
        config={"family": spec.family, "n": spec.n, "M": spec.replications,
                "theta0": [spec.theta0.p, spec.theta0.alpha, spec.theta0.beta],
                "mix_lambda": spec.mix_lambda, "starts": args.starts},
        seed=spec.seed, version=__version__, created_at=time.time(), jobs=args.jobs)

    csv_text = _summary_csv(summary)
    archive = {"manifest": manifest.core_dict(), "summary": summary.to_dict()}
    archive_text = json.dumps(archive, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            fh.write(archive_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_scan(args) -> int:
    sample = _load_sample(args.csv_path)
    ccfg = _contrast_config_from_args(sample, args)
    result = fit(sample, FitConfig(starts=args.starts), ccfg)
    theta = result.theta_hat
    lo, hi, steps = _parse_triple(args.range, "--range")
    values = np.linspace(lo, hi, steps)
    ev = ContrastEvaluator(sample, ccfg)
    from .estimator import _smoothing_factor
    ev_obj = ContrastEvaluator(
        sample, ccfg,
        weight_factor=_smoothing_factor(ccfg, sample.n, robust_scale(sample.values)))

    lines = [f"{args.param},contrast,objective"]
    for v in values:
        fields = {"p": theta.p, "alpha": theta.alpha, "beta": theta.beta}
        fields[args.param] = float(v)
        try:
            th = EuclideanParam(fields["p"], fields["alpha"], fields["beta"])
        except DegenerateParam:
            lines.append(f"{float(v)!r},,")
            continue
        lines.append(f"{float(v)!r},{float(ev.u_statistic(th))!r},{float(ev_obj.plugin(th))!r}")

    manifest = RunManifest(
        subcommand="scan", input_path=args.csv_path, input_sha256=_sha256(args.csv_path),
        config=_config_echo(args, sample, ccfg, {
            "param": args.param, "range": [lo, hi, steps],
            "theta_hat": {"p": theta.p, "alpha": theta.alpha, "beta": theta.beta}}),
        seed=None, version=__version__, created_at=time.time())
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if args.out:
        with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"manifest": manifest.core_dict()}, sort_keys=True, indent=2))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmix",
        description="Two-component symmetric-location mixture estimation "
                    "via Fourier-domain contrast minimization")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    env_seed = os.environ.get("SYMMIX_SEED")
    default_seed = int(env_seed) if env_seed and env_seed.isdigit() else 0

    def common(p, with_input=True):
        if with_input:
            p.add_argument("csv_path", help="CSV file with one numeric column")
        p.add_argument("--weight-nodes", type=int, default=256)
        p.add_argument("--cutoff", type=float, default=None,
                       help="frequency cutoff (default: scale-aware)")
        p.add_argument("--trunc-h", type=float, default=None,
                       help="Fourier truncation h (default: n-rule)")
        p.add_argument("--starts", type=int, default=8)
        p.add_argument("--seed", type=int, default=default_seed)
        p.add_argument("--out", default=None)

    p_fit = sub.add_parser("fit", help="estimate (p, alpha, beta)")
    common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_den = sub.add_parser("density", help="deconvolve the component density")
    common(p_den)
    p_den.add_argument("--bandwidth", type=float, default=None)
    p_den.add_argument("--grid", default=None, help="lo:hi:points")
    p_den.add_argument("--theta", default=None, help="p,alpha,beta (skip fitting)")
    p_den.set_defaults(func=cmd_density)

    p_sim = sub.add_parser("simulate", help="Monte Carlo study of the estimator")
    common(p_sim, with_input=False)
    p_sim.add_argument("--family", required=True,
                       choices=["gauss", "cauchy", "laplace", "asym_gauss_mix"])
    p_sim.add_argument("--theta0", required=True, help="p,alpha,beta")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--M", type=int, required=True)
    p_sim.add_argument("--mix-lambda", type=float, default=None)
    p_sim.add_argument("--jobs", type=int, default=1)
    p_sim.set_defaults(func=cmd_simulate)

    p_scan = sub.add_parser("scan", help="profile the contrast along one coordinate")
    common(p_scan)
    p_scan.add_argument("--param", required=True, choices=["p", "alpha", "beta"])
    p_scan.add_argument("--range", required=True, help="lo:hi:steps")
    p_scan.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, SampleTooSmall, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateFit, DegenerateParam) as exc:
        print(f"degenerate fit: {exc}", file=sys.stderr)
        return 3
    except EmptyPositivePart as exc:
        print(f"density pathology: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
