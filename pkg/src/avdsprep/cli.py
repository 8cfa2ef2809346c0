"""Command-line front end: enhance one image, compare methods, dump histograms.

Exit codes: 0 success, 2 bad arguments or configuration, 3 missing or
malformed input, 4 write failure. Configuration comes from defaults, then
an optional flat JSON file, then command-line flags, in increasing
precedence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .avds import AvdsConfig, DistanceKind, avds_single
from .baselines import ClaheConfig, clahe, hist_equalize
from .diffusion import DiffusionConfig
from .errors import AvdsprepError, CodecError, InvalidConfig
from .fuzzy import FuzzyConfig
from .pipeline import (
    ChannelPolicy,
    PipelineConfig,
    Stage,
    run_pipeline,
    stage_method_label,
    stage_params,
)
from .quality import (
    CSV_HEADER,
    QualityReport,
    evaluate,
    format_metric,
    psnr_from_mse,
    rmse_from_mse,
)
from .raster import ChannelOrder, Image, histogram, histogram_csv, load_pnm, save_pnm, to_gray

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_WRITE = 4

_PNM_SUFFIXES = {".pnm", ".pgm", ".ppm"}

_CONFIG_KEYS = (
    "fuzzy_half",
    "fuzzy_threshold",
    "fuzzy_threshold_scale",
    "fuzzy_impulse_guard",
    "diffusion_lambda",
    "diffusion_c",
    "diffusion_sigma",
    "diffusion_dt",
    "diffusion_steps",
    "avds_k",
    "avds_omega",
    "avds_bd_bins",
    "avds_epsilon",
    "avds_mode",
    "channel_policy",
    "stages",
    "clahe_tiles_x",
    "clahe_tiles_y",
    "clahe_clip_limit",
)

_METHOD_ORDER = ("he", "clahe", "avds-euclidean", "avds-bhattacharya",
                 "avds-manhattan", "avds-hamming")


class CliError(Exception):
    """A diagnosed failure with the exit code it should produce."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# Configuration resolution
# --------------------------------------------------------------------------


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read config file {path}: {exc}") from exc
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise CliError(EXIT_USAGE, f"config file {path} must hold a JSON object")
    for key in values:
        if key not in _CONFIG_KEYS:
            raise CliError(EXIT_USAGE, f"unknown config key {key!r} in {path}")
    return values


def _parse_stages(raw) -> tuple:
    if not isinstance(raw, list):
        raise CliError(EXIT_USAGE, f"config key 'stages' must be a list, got {raw!r}")
    stages = []
    for name in raw:
        try:
            stages.append(Stage(name))
        except ValueError:
            raise CliError(EXIT_USAGE, f"unknown stage {name!r} in config") from None
    return tuple(stages)


def _parse_mode(raw) -> DistanceKind | None:
    if raw is None or raw == "adaptive":
        return None
    try:
        return DistanceKind.parse(str(raw))
    except InvalidConfig as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc


def _parse_policy(raw) -> ChannelPolicy:
    try:
        return ChannelPolicy(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"unknown channel policy {raw!r}") from None


@dataclasses.dataclass(frozen=True)
class ResolvedConfig:
    pipeline: PipelineConfig
    clahe: ClaheConfig

    def flat(self) -> dict:
        """The flat key/value form, reusable as a --config file."""
        p = self.pipeline
        return {
            "fuzzy_half": p.fuzzy.half,
            "fuzzy_threshold": p.fuzzy.fixed_threshold,
            "fuzzy_threshold_scale": p.fuzzy.threshold_scale,
            "fuzzy_impulse_guard": p.fuzzy.impulse_guard,
            "diffusion_lambda": p.diffusion.lam,
            "diffusion_c": p.diffusion.c,
            "diffusion_sigma": p.diffusion.sigma,
            "diffusion_dt": p.diffusion.dt,
            "diffusion_steps": p.diffusion.steps,
            "avds_k": p.avds.k,
            "avds_omega": p.avds.omega,
            "avds_bd_bins": p.avds.bd_bins,
            "avds_epsilon": p.avds.epsilon,
            "avds_mode": "adaptive" if p.avds_mode is None else p.avds_mode.label,
            "channel_policy": p.channel_policy.value,
            "stages": [s.value for s in p.stages],
            "clahe_tiles_x": self.clahe.tiles_x,
            "clahe_tiles_y": self.clahe.tiles_y,
            "clahe_clip_limit": self.clahe.clip_limit,
        }


def resolve_config(args) -> ResolvedConfig:
    """Merge defaults, the optional config file, and command-line flags."""
    values = {}
    if getattr(args, "config", None):
        values = _load_config_file(args.config)

    def pick(key, default):
        return values.get(key, default)

    mode = _parse_mode(pick("avds_mode", None))
    policy = _parse_policy(pick("channel_policy", ChannelPolicy.GRAYSCALE.value))
    stages = _parse_stages(values["stages"]) if "stages" in values else PipelineConfig().stages

    if getattr(args, "avds_mode", None) is not None:
        mode = _parse_mode(args.avds_mode)
    if getattr(args, "channels", None) is not None:
        policy = _parse_policy(args.channels)
    if getattr(args, "skip_fuzzy", False):
        stages = tuple(s for s in stages if s is not Stage.FUZZY)
    if getattr(args, "skip_diffusion", False):
        stages = tuple(s for s in stages if s is not Stage.DIFFUSION)

    avds_k = pick("avds_k", AvdsConfig.k)
    avds_omega = pick("avds_omega", AvdsConfig.omega)
    if getattr(args, "k", None) is not None:
        avds_k = args.k
    if getattr(args, "omega", None) is not None:
        avds_omega = args.omega

    try:
        pipeline = PipelineConfig(
            fuzzy=FuzzyConfig(
                half=pick("fuzzy_half", FuzzyConfig.half),
                fixed_threshold=pick("fuzzy_threshold", FuzzyConfig.fixed_threshold),
                threshold_scale=pick("fuzzy_threshold_scale", FuzzyConfig.threshold_scale),
                impulse_guard=pick("fuzzy_impulse_guard", FuzzyConfig.impulse_guard),
            ),
            diffusion=DiffusionConfig(
                lam=pick("diffusion_lambda", DiffusionConfig.lam),
                c=pick("diffusion_c", DiffusionConfig.c),
                sigma=pick("diffusion_sigma", DiffusionConfig.sigma),
                dt=pick("diffusion_dt", DiffusionConfig.dt),
                steps=pick("diffusion_steps", DiffusionConfig.steps),
            ),
            avds=AvdsConfig(
                k=avds_k,
                omega=avds_omega,
                bd_bins=pick("avds_bd_bins", AvdsConfig.bd_bins),
                epsilon=pick("avds_epsilon", AvdsConfig.epsilon),
            ),
            avds_mode=mode,
            channel_policy=policy,
            stages=stages,
        )
        clahe_cfg = ClaheConfig(
            tiles_x=pick("clahe_tiles_x", ClaheConfig.tiles_x),
            tiles_y=pick("clahe_tiles_y", ClaheConfig.tiles_y),
            clip_limit=pick("clahe_clip_limit", ClaheConfig.clip_limit),
        )
    except InvalidConfig as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    return ResolvedConfig(pipeline=pipeline, clahe=clahe_cfg)


def _resolve_jobs(args) -> int:
    env = os.environ.get("AVDSPREP_JOBS")
    if env is not None:
        try:
            jobs = int(env)
        except ValueError:
            raise CliError(EXIT_USAGE, f"AVDSPREP_JOBS must be an integer, got {env!r}") from None
    elif getattr(args, "jobs", None) is not None:
        jobs = args.jobs
    else:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise CliError(EXIT_USAGE, f"jobs must be >= 1, got {jobs}")
    return jobs


# --------------------------------------------------------------------------
# Shared I/O helpers
# --------------------------------------------------------------------------


def _read_image(path: str) -> Image:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read input {path}: {exc}") from exc
    try:
        return load_pnm(data)
    except CodecError as exc:
        raise CliError(EXIT_INPUT, f"malformed image {path}: {exc}") from exc


def _ensure_outdir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_WRITE, f"cannot create output directory {path}: {exc}") from exc
    return out


def _write_bytes(path: Path, data: bytes):
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_WRITE, f"cannot write {path}: {exc}") from exc


def _write_text(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(EXIT_WRITE, f"cannot write {path}: {exc}") from exc


def _reports_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for report in reports:
        writer.writerow(report.csv_fields())
    return buf.getvalue()


def _project(image: Image, policy: ChannelPolicy) -> Image:
    if policy is ChannelPolicy.GRAYSCALE and image.channel_order is ChannelOrder.BGR:
        return Image.gray(to_gray(image))
    return image


def _map_planes(image: Image, fn) -> Image:
    return Image(tuple(fn(p) for p in image.planes), image.channel_order)


def _pre_avds_stages(config: PipelineConfig) -> tuple:
    return tuple(s for s in config.stages if s is not Stage.AVDS)


def _apply_pre_avds(image: Image, config: PipelineConfig) -> Image:
    """The projected input after the enabled fuzzy/diffusion stages."""
    pre = _pre_avds_stages(config)
    projected = _project(image, config.channel_policy)
    if not pre:
        return projected
    trace = run_pipeline(image, dataclasses.replace(config, stages=pre))
    return trace.final


# --------------------------------------------------------------------------
# enhance
# --------------------------------------------------------------------------


def cmd_enhance(args) -> int:
    resolved = resolve_config(args)
    config = resolved.pipeline
    image = _read_image(args.input)
    out_dir = _ensure_outdir(args.output)
    stem = Path(args.input).stem

    trace = run_pipeline(image, config)

    files = []
    reports = []
    stage_summaries = []
    previous = trace.input
    for result in trace.results:
        name = f"{stem}.{result.stage.value}.pnm"
        _write_bytes(out_dir / name, save_pnm(result.image))
        files.append({"path": name, "input": args.input, "stage": result.stage.value})

        label = stage_method_label(result.stage, result.chosen)
        params = dict(result.report.params)
        params["channels"] = config.channel_policy.value
        vs_input = dataclasses.replace(
            result.report, method=f"{label}:vs-input", params=params
        )
        vs_previous = evaluate(f"{label}:vs-previous", previous, result.image, params=params)
        reports.extend([vs_input, vs_previous])
        previous = result.image

        summary = {
            "stage": result.stage.value,
            "method": label,
            "mse_vs_input": result.report.mse,
            "psnr_db_vs_input": format_metric(result.report.psnr_db),
        }
        if result.stage is Stage.AVDS and result.chosen is not None:
            summary["chosen"] = result.chosen.label
            if result.contrasts is not None:
                summary["contrasts"] = {
                    kind.label: result.contrasts[kind] for kind in DistanceKind
                }
        stage_summaries.append(summary)

        if result.stage is Stage.AVDS and config.avds_mode is None:
            chosen_contrast = result.contrasts[result.chosen]
            print(f"chosen={result.chosen.label} contrast={format_metric(chosen_contrast)}")

    _write_text(out_dir / "report.csv", _reports_csv(reports))
    files.append({"path": "report.csv", "input": args.input, "stage": None})

    manifest = {
        "tool": "avdsprep",
        "version": __version__,
        "command": "enhance",
        "input": args.input,
        "output_dir": str(out_dir),
        "config": resolved.flat(),
        "stages": stage_summaries,
        "files": files,
    }
    _write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# compare
# --------------------------------------------------------------------------


def _compare_params(method: str, resolved: ResolvedConfig) -> dict:
    config = resolved.pipeline
    params = {}
    if method == "clahe":
        params["tiles_x"] = resolved.clahe.tiles_x
        params["tiles_y"] = resolved.clahe.tiles_y
        params["clip"] = resolved.clahe.clip_limit
    elif method.startswith("avds-"):
        pre = _pre_avds_stages(config)
        params["k"] = config.avds.k
        params["omega"] = config.avds.omega
        params["after"] = "+".join(s.value for s in pre) if pre else "none"
    params["channels"] = config.channel_policy.value
    return params


def _compare_one(path: Path, resolved: ResolvedConfig) -> list:
    """The six method reports for one image, in method order."""
    config = resolved.pipeline
    image = load_pnm(path.read_bytes())
    base = _project(image, config.channel_policy)
    intermediate = _apply_pre_avds(image, config)

    reports = [
        evaluate("he", base, _map_planes(base, hist_equalize),
                 params=_compare_params("he", resolved)),
        evaluate("clahe", base, _map_planes(base, lambda p: clahe(p, resolved.clahe)),
                 params=_compare_params("clahe", resolved)),
    ]
    for kind in DistanceKind:
        method = f"avds-{kind.label}"
        out = _map_planes(intermediate, lambda p: avds_single(p, kind, config.avds))
        reports.append(evaluate(method, base, out, params=_compare_params(method, resolved)))
    return reports


def _mean_reports(rows: dict) -> list:
    """Per-method mean rows; RMSE and PSNR are derived from the mean MSE."""
    means = []
    for method in _METHOD_ORDER:
        method_rows = rows[method]
        n = len(method_rows)
        mean_mse = sum(r.mse for r in method_rows) / n
        means.append(
            QualityReport(
                method=method,
                mse=mean_mse,
                rmse=rmse_from_mse(mean_mse),
                psnr_db=psnr_from_mse(mean_mse),
                contrast=sum(r.contrast for r in method_rows) / n,
                entropy_bits=sum(r.entropy_bits for r in method_rows) / n,
                params=method_rows[0].params,
            )
        )
    return means


def cmd_compare(args) -> int:
    resolved = resolve_config(args)
    jobs = _resolve_jobs(args)
    in_dir = Path(args.input)
    if not in_dir.is_dir():
        raise CliError(EXIT_INPUT, f"input directory {args.input} does not exist")
    candidates = sorted(
        p for p in in_dir.iterdir()
        if p.is_file() and p.suffix.lower() in _PNM_SUFFIXES
    )
    if not candidates:
        raise CliError(EXIT_INPUT, f"no PNM images found in {args.input}")
    out_dir = _ensure_outdir(args.output)

    def work(path: Path):
        try:
            return path.name, _compare_one(path, resolved), None
        except (OSError, AvdsprepError) as exc:
            return path.name, None, str(exc)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(work, candidates))

    skipped = []
    per_image = []
    for name, reports, reason in outcomes:
        if reports is None:
            print(f"avdsprep: skipping {name}: {reason}", file=sys.stderr)
            skipped.append({"file": name, "reason": reason})
        else:
            per_image.append((name, reports))
    if not per_image:
        raise CliError(EXIT_INPUT, f"no parseable images in {args.input}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "image"] + CSV_HEADER.split(",")[1:])
    by_method = {method: [] for method in _METHOD_ORDER}
    for name, reports in per_image:
        for report in reports:
            writer.writerow([report.method, name] + report.csv_fields()[1:])
            by_method[report.method].append(report)
    for report in _mean_reports(by_method):
        writer.writerow([report.method, "mean"] + report.csv_fields()[1:])
    _write_text(out_dir / "compare.csv", buf.getvalue())

    manifest = {
        "tool": "avdsprep",
        "version": __version__,
        "command": "compare",
        "input_dir": args.input,
        "output_dir": str(out_dir),
        "config": resolved.flat(),
        "images": [name for name, _ in per_image],
        "skipped": skipped,
        "files": [{"path": "compare.csv", "input": args.input, "stage": None}],
    }
    _write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# hist
# --------------------------------------------------------------------------


def cmd_hist(args) -> int:
    resolved = resolve_config(args)
    config = resolved.pipeline
    image = _read_image(args.input)
    out_dir = _ensure_outdir(args.output)
    stem = Path(args.input).stem

    intermediate = _apply_pre_avds(image, config)
    for kind in DistanceKind:
        out = _map_planes(intermediate, lambda p: avds_single(p, kind, config.avds))
        hist = histogram(to_gray(out), 256)
        _write_text(out_dir / f"{stem}.{kind.label}.hist.csv", histogram_csv(hist))
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing and entry point
# --------------------------------------------------------------------------


def _add_pipeline_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="FILE", help="flat JSON config file")
    parser.add_argument(
        "--avds-mode",
        choices=["adaptive", "euclidean", "bhattacharya", "manhattan", "hamming"],
        help="distance metric, or adaptive selection (default)",
    )
    parser.add_argument("--k", type=int, metavar="N", help="AVDS sub-window side (>= 2)")
    parser.add_argument("--omega", type=float, metavar="W", help="AVDS weighting exponent")
    parser.add_argument(
        "--channels", choices=["gray", "per-channel"], help="channel policy (default gray)"
    )
    parser.add_argument("--skip-fuzzy", action="store_true", help="disable the fuzzy stage")
    parser.add_argument(
        "--skip-diffusion", action="store_true", help="disable the diffusion stage"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avdsprep",
        description="Retinal image preprocessing: fuzzy denoising, nonlinear "
        "diffusion, and AVDS contrast enhancement.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_enh = sub.add_parser("enhance", help="run the pipeline on one PNM image")
    p_enh.add_argument("input", metavar="in.pnm")
    p_enh.add_argument("-o", "--output", required=True, metavar="DIR")
    _add_pipeline_flags(p_enh)
    p_enh.set_defaults(func=cmd_enhance)

    p_cmp = sub.add_parser("compare", help="score HE, CLAHE, and the four AVDS variants")
    p_cmp.add_argument("input", metavar="DIR", help="directory of PNM images")
    p_cmp.add_argument("-o", "--output", required=True, metavar="DIR")
    p_cmp.add_argument("--jobs", type=int, metavar="N",
                       help="worker threads (default: logical cores; "
                            "AVDSPREP_JOBS overrides)")
    _add_pipeline_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_hist = sub.add_parser("hist", help="export histograms of the four AVDS variants")
    p_hist.add_argument("input", metavar="in.pnm")
    p_hist.add_argument("-o", "--output", required=True, metavar="DIR")
    _add_pipeline_flags(p_hist)
    p_hist.set_defaults(func=cmd_hist)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"avdsprep: {exc}", file=sys.stderr)
        return exc.code
    except AvdsprepError as exc:
        print(f"avdsprep: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
