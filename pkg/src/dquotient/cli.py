"""Command-line interface.

Exit codes: 0 success, 1 selftest failure, 2 I/O error, 3 input contract
violation (bad flags, mismatched image sizes, malformed data).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .battery import TOLERANCE, run_battery
from .distort import DistortionKind, SweepRecord, apply_distortion, make_texture, sweep, DistortionSpec
from .evaluate import ScoreError, correlation_report, load_scores_csv
from .image_io import PGMError, Image, normalize, read_pgm
from .metrics import EpsilonMode, MetricParams
from .pipeline import MAP_NAMES, PipelineConfig, clean_json, metric_maps, pooled_scores
from .transforms import CLI_NAMES
from .window import Border, WindowKind, WindowSpec

EXIT_OK, EXIT_SELFTEST, EXIT_IO, EXIT_CONTRACT = 0, 1, 2, 3

SCHEMA = 1

KIND_NAMES = {
    "noise": DistortionKind.GAUSSIAN_NOISE,
    "blur": DistortionKind.GAUSSIAN_BLUR,
    "gain": DistortionKind.GAIN,
    "offset": DistortionKind.OFFSET,
    **{k.value: k for k in DistortionKind},
}


class ContractError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONTRACT, f"{self.prog}: error: {message}\n")


def _positive(cast):
    def parse(text):
        v = cast(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _pipeline_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("window and metric")
    g.add_argument("--window", choices=[k.value for k in WindowKind], default="gaussian")
    g.add_argument("--size", type=_positive(int), default=11, help="odd window side in pixels")
    g.add_argument("--sigma", type=_positive(float), default=1.5, help="gaussian window sigma")
    g.add_argument("--border", choices=["valid", "pad"], default="valid")
    g.add_argument("--k1", type=_nonneg_float, default=0.01)
    g.add_argument("--k2", type=_nonneg_float, default=0.03)
    g.add_argument("--range", dest="dynamic_range", type=_positive(float), default=1.0,
                   help="dynamic range L of the normalized images")
    g.add_argument("--exact-zero", action="store_true", help="C1 = C2 = 0")
    g.add_argument("--transform", choices=list(CLI_NAMES), default="none")
    g.add_argument("--pool", type=_positive(float), default=1.0, help="Minkowski exponent for DQ")
    return p


def _config(args) -> PipelineConfig:
    try:
        window = WindowSpec(
            kind=args.window,
            size=args.size,
            sigma=args.sigma,
            border=Border.SYMMETRIC_PAD if args.border == "pad" else Border.VALID_ONLY,
        )
    except ValueError as e:
        raise ContractError(str(e)) from None
    params = MetricParams(
        k1=args.k1,
        k2=args.k2,
        dynamic_range=args.dynamic_range,
        epsilon_mode=EpsilonMode.EXACT_ZERO if args.exact_zero else EpsilonMode.REGULARIZED,
    )
    return PipelineConfig(window, params, CLI_NAMES[args.transform], args.pool)


def _load(path) -> Image:
    return normalize(read_pgm(path))


def _load_pair(args) -> tuple[Image, Image]:
    ref, test = _load(args.reference), _load(args.test)
    if ref.shape != test.shape:
        raise ContractError(
            f"dimension mismatch: {args.reference} is {ref.width}x{ref.height}, "
            f"{args.test} is {test.width}x{test.height}"
        )
    return ref, test


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(clean_json(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def cmd_compare(args) -> int:
    config = _config(args)
    ref, test = _load_pair(args)
    try:
        scores = pooled_scores(ref, test, config)
    except ValueError as e:
        raise ContractError(str(e)) from None
    report = {
        "schema": SCHEMA,
        "reference": str(args.reference),
        "test": str(args.test),
        "width": ref.width,
        "height": ref.height,
        "config": config.to_dict(),
        **scores,
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "value"])
        for key in ("ssim", "ssim_three_term", "s_l", "s_v", "one_minus_ssim", "dq", "nrmse"):
            v = scores[key]
            w.writerow([key, "" if v is None else repr(v)])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dumps(report), args.out)
    return EXIT_OK


def cmd_map(args) -> int:
    config = _config(args)
    ref, test = _load_pair(args)
    try:
        m = metric_maps(ref, test, config, names=(args.metric,))[args.metric]
    except ValueError as e:
        raise ContractError(str(e)) from None
    out = Path(args.out or f"{args.metric}_map.{'csv' if args.format == 'csv' else 'pgm'}")
    if args.format == "csv":
        m.to_csv(out)
        print(out)
    else:
        sidecar = m.to_pgm(out)
        print(out)
        print(sidecar)
    return EXIT_OK


def _parse_levels(text: str) -> list[float]:
    try:
        levels = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ContractError(f"--levels must be comma-separated numbers, got {text!r}") from None
    if not levels:
        raise ContractError("--levels is empty")
    return levels


def cmd_sweep(args) -> int:
    config = _config(args)
    if (args.reference is None) == (args.texture is None):
        raise ContractError("give exactly one of a reference PGM or --texture SEED")
    ref = make_texture(args.texture) if args.texture is not None else _load(args.reference)
    levels = _parse_levels(args.levels)
    kind = KIND_NAMES[args.kind]
    try:
        records = sweep(ref, kind, levels, seed=args.seed, config=config)
    except ValueError as e:
        raise ContractError(str(e)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SweepRecord.FIELDS)
    for r in records:
        w.writerow(["" if v is None else repr(v) for v in r.row()])
    _emit(buf.getvalue(), args.out)
    if args.dump_maps:
        dump = Path(args.dump_maps)
        dump.mkdir(parents=True, exist_ok=True)
        for i, level in enumerate(levels):
            test = apply_distortion(ref, DistortionSpec(kind, level, args.seed))
            m = metric_maps(ref, test, config, names=("dq",))["dq"]
            m.to_pgm(dump / f"dq_{i:03d}.pgm")
    return EXIT_OK


def cmd_correlate(args) -> int:
    try:
        table = load_scores_csv(args.scores)
        report = correlation_report(table, metric=args.metric_name, p=args.pool)
    except ScoreError as e:
        raise ContractError(str(e)) from None
    except ValueError as e:
        raise ContractError(str(e)) from None
    _emit(_dumps(report), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    config = _config(args)
    worst = run_battery(args.trials, args.seed, config.window, config.params, args.image_size)
    print(f"selftest: {args.trials} random {args.image_size}x{args.image_size} pairs, seed {args.seed}")
    failed = False
    width = max(len(k) for k in worst)
    for name, r in worst.items():
        ok = r < TOLERANCE
        failed |= not ok
        print(f"  {'PASS' if ok else 'FAIL'}  {name:<{width}}  max residual {r:.3e}")
    print("selftest failed" if failed else "selftest passed")
    return EXIT_SELFTEST if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _pipeline_flags()
    parser = _Parser(prog="dquotient", description="SSIM and Dissimilarity Quotient image metrics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compare", parents=[common], help="pooled metrics for an image pair")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("map", parents=[common], help="write a per-pixel metric map")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--metric", choices=MAP_NAMES, default="dq")
    p.add_argument("--out")
    p.add_argument("--format", choices=["pgm", "csv"], default="pgm")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("sweep", parents=[common], help="metrics over a distortion level sweep")
    p.add_argument("reference", nargs="?")
    p.add_argument("--texture", type=int, help="use the built-in random texture with this seed")
    p.add_argument("--kind", choices=list(KIND_NAMES), default="noise")
    p.add_argument("--levels", required=True, help="comma-separated ascending levels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--dump-maps", metavar="DIR", help="also write one DQ map per level")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("correlate", help="correlate metric values with observer scores")
    p.add_argument("scores", help="CSV with header id,metric,score")
    p.add_argument("--metric-name", default="dq")
    p.add_argument("--pool", type=_positive(float), default=1.0)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("selftest", parents=[common], help="randomized algebraic identity battery")
    p.add_argument("--trials", type=_positive(int), default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--image-size", type=_positive(int), default=64)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except PGMError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
