"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
breach.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from .distributions import FAMILIES, DistributionModel
from .inference import (
    ALTERNATIVES,
    DEFAULT_KERNELS,
    TESTS,
    InvariantError,
    confidence_interval,
    decide,
)
from .kernels import KERNEL_NAMES, BandwidthRule, bandwidth, get_kernel
from .oracle import count_pvalue_comparison, enumerate_pvalue_comparison, run_all
from .sample import Sample
from .simulation import DEFAULT_SEED, EXPERIMENTS, SimulationConfig, run_grid
from .smoothed import VARIANCE_MODES, SmoothedConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def ingest(path) -> Sample:
    """Read one real per line; an optional first line ``x`` is a header.

    Blank lines are skipped. Raises :class:`DataError` with the line number
    of the first bad token, or when no value is found.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    values = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip()
        if not token:
            continue
        if not seen_content and token.strip('"').lower() == "x":
            seen_content = True
            continue
        seen_content = True
        token = token.rstrip(",")
        try:
            v = float(token)
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a number: {raw.strip()!r}") from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{lineno}: non-finite value {raw.strip()!r}")
        values.append(v)
    if not values:
        raise DataError(f"{path}: no observations")
    return Sample(values, {"source": str(p)})


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _bandwidth_rule(text: str) -> BandwidthRule:
    try:
        return BandwidthRule.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smoothnp", description="Kernel-smoothed sign and signed-rank tests.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")

    def smoothing(p):
        p.add_argument("--kernel", choices=KERNEL_NAMES,
                       help="default: a11zero for sign, epanechnikov4 for Wilcoxon")
        p.add_argument("--bandwidth", type=_bandwidth_rule, default=BandwidthRule(),
                       help="azzalini-log (default), fixed:H or power:C,D")

    p = sub.add_parser("test", help="test H0: theta = 0 on a data file")
    p.add_argument("--data", required=True)
    p.add_argument("--test", choices=TESTS, default="smoothed_sign")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--alternative", choices=ALTERNATIVES, default="greater")
    p.add_argument("--variance-mode", choices=VARIANCE_MODES, default="simple")
    p.add_argument("--f0", type=float)
    p.add_argument("--f2-0", type=float, dest="f2_0")
    p.add_argument("--int-f-cubed", type=float)
    smoothing(p)
    common(p)

    p = sub.add_parser("ci", help="confidence interval for theta")
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=tuple(DEFAULT_KERNELS), default="smoothed_sign")
    p.add_argument("--level", type=float, default=0.95)
    smoothing(p)
    common(p)

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    p.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    p.add_argument("--model", default="normal", help="comma-separated families")
    p.add_argument("--scale", choices=("standard", "unit-variance"), default="standard")
    p.add_argument("--n", type=_ints, default=[30])
    p.add_argument("--theta", type=_floats, default=[0.0])
    p.add_argument("--replications", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--statistic", choices=("sign", "wilcoxon"), default="sign")
    p.add_argument("--kernel-sign", choices=KERNEL_NAMES, default="a11zero")
    p.add_argument("--kernel-wilcoxon", choices=KERNEL_NAMES, default="epanechnikov4")
    p.add_argument("--bandwidth", type=_bandwidth_rule, default=BandwidthRule())
    p.add_argument("--variance-mode", choices=VARIANCE_MODES, default="simple")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--block-size", type=int, default=2000)
    p.add_argument("--csv", help="also write the cell matrix to this CSV file")
    common(p)

    p = sub.add_parser("enumerate", help="exact sign vs signed-rank p-value comparison")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", type=_floats, default=[0.9, 0.95, 0.975])
    p.add_argument("--z-decimals", type=int)
    p.add_argument("--method", choices=("enumeration", "joint-dp"), default="enumeration")
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("verify", help="run the deterministic oracle checks")
    p.add_argument("--resolution", type=int, default=1000)
    common(p)

    p = sub.add_parser("kernel-info", help="kernel moments and bandwidth")
    p.add_argument("--kernel", choices=KERNEL_NAMES, required=True)
    p.add_argument("--n", type=int, help="also report the bandwidth for this n")
    p.add_argument("--bandwidth", type=_bandwidth_rule, default=BandwidthRule())
    common(p)
    return parser


def _smoothed_config(args, test: str, n: int) -> SmoothedConfig | None:
    if test not in DEFAULT_KERNELS:
        return None
    kernel = args.kernel or DEFAULT_KERNELS[test]
    extra = {}
    mode = getattr(args, "variance_mode", "simple")
    if mode == "density_adjusted":
        need = ("f0", "f2_0") if test == "smoothed_sign" else ("int_f_cubed",)
        missing = [k for k in need if getattr(args, k) is None]
        if missing:
            raise UsageError("density_adjusted needs --" + ", --".join(
                m.replace("_", "-") for m in missing))
        extra = {k: getattr(args, k) for k in need}
    try:
        return SmoothedConfig.build(kernel, n, args.bandwidth, variance_mode=mode, **extra)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _cmd_test(args) -> dict:
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie strictly inside (0, 1)")
    sample = ingest(args.data)
    cfg = _smoothed_config(args, args.test, sample.n)
    try:
        out = decide(args.test, sample, args.alpha, cfg, args.alternative)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    report = out.to_dict()
    report["config"].update({"alpha": args.alpha, "alternative": args.alternative,
                             "data": args.data, "n": sample.n,
                             "bandwidth_rule": args.bandwidth.describe(),
                             "backend": BACKEND})
    return report


def _cmd_ci(args) -> dict:
    if not 0.0 < args.level < 1.0:
        raise UsageError("--level must lie strictly inside (0, 1)")
    sample = ingest(args.data)
    cfg = _smoothed_config(args, args.method, sample.n)
    try:
        ci = confidence_interval(args.method, sample, args.level, cfg)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    report = ci.to_dict()
    report["config"] = {**cfg.to_dict(), "method": args.method, "level": args.level,
                        "data": args.data, "n": sample.n,
                        "bandwidth_rule": args.bandwidth.describe(), "backend": BACKEND}
    return report


def _cmd_simulate(args) -> dict:
    families = [f.strip() for f in args.model.split(",") if f.strip()]
    bad = [f for f in families if f not in FAMILIES]
    if bad or not families:
        raise UsageError(f"unknown model(s) {bad}; expected {FAMILIES}")
    if args.scale == "unit-variance":
        models = [DistributionModel.unit_variance(f) for f in families]
    else:
        models = [DistributionModel(f) for f in families]
    try:
        base = SimulationConfig(
            args.experiment, models[0], args.n[0], args.theta[0], args.replications,
            args.seed, tuple(args.alphas) if args.alphas else None, args.statistic,
            args.kernel_sign, args.kernel_wilcoxon, args.bandwidth, args.variance_mode,
            args.block_size, args.workers)
        for n in args.n:
            SimulationConfig(args.experiment, n=n, replications=1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_grid(base, models, args.n, args.theta)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    out = report.to_dict()
    out["config"] = {**base.to_dict(), "models": families, "scale": args.scale,
                     "ns": args.n, "thetas": args.theta, "backend": BACKEND,
                     "parts": out["config"]["parts"]}
    return out


def _cmd_enumerate(args) -> dict:
    try:
        if args.method == "enumeration":
            rep = enumerate_pvalue_comparison(args.n, args.alphas, z_decimals=args.z_decimals,
                                              workers=args.workers)
        else:
            rep = count_pvalue_comparison(args.n, args.alphas, z_decimals=args.z_decimals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return rep.to_dict()


def _cmd_verify(args) -> dict:
    try:
        return run_all(args.resolution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_kernel_info(args) -> dict:
    k = get_kernel(args.kernel)
    info = {"kernel": k.name, "order": k.order, "support": list(k.support),
            "nonnegative": k.is_nonnegative(), "moments": k.moment_table(2, 4),
            "bandwidth_rule": args.bandwidth.describe()}
    info.update(info["moments"])
    if args.n is not None:
        try:
            info["n"] = args.n
            info["bandwidth"] = bandwidth(args.bandwidth, args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return info


_COMMANDS = {"test": _cmd_test, "ci": _cmd_ci, "simulate": _cmd_simulate,
             "enumerate": _cmd_enumerate, "verify": _cmd_verify,
             "kernel-info": _cmd_kernel_info}


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            nested = isinstance(v, dict) or (isinstance(v, list) and any(
                isinstance(e, (dict, list)) for e in v))
            if nested and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for item in obj:
            lines.append(f"{pad}-")
            lines.append(_text(item, indent + 1))
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"smoothnp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"smoothnp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"smoothnp: invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.format == "json":
        print(json.dumps(report, indent=2, default=float))
    else:
        print(_text(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
