"""Composition of the preprocessing stages: denoise, diffuse, enhance.

The stage order is fixed (fuzzy noise filtering, then nonlinear diffusion,
then AVDS contrast enhancement); any ordered subset can be enabled. Color
handling is a policy: collapse to grayscale up front, or run every stage on
each channel. Adaptive AVDS always makes one decision per image, chosen on
the grayscale projection of whatever enters that stage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .avds import AvdsConfig, DistanceKind, avds_adaptive, avds_single
from .diffusion import DiffusionConfig, diffuse
from .errors import EmptyPipeline, InvalidConfig
from .fuzzy import FuzzyConfig, fuzzy_filter
from .quality import QualityReport, evaluate
from .raster import ChannelOrder, Image, to_gray


class Stage(enum.Enum):
    FUZZY = "fuzzy"
    DIFFUSION = "diffusion"
    AVDS = "avds"


_STAGE_ORDER = (Stage.FUZZY, Stage.DIFFUSION, Stage.AVDS)


class ChannelPolicy(enum.Enum):
    GRAYSCALE = "gray"
    PER_CHANNEL = "per-channel"


@dataclass(frozen=True)
class PipelineConfig:
    """Stage configs plus the mode/policy/stage-selection switches.

    ``avds_mode`` is a fixed DistanceKind, or None for adaptive selection.
    """

    fuzzy: FuzzyConfig = FuzzyConfig()
    diffusion: DiffusionConfig = DiffusionConfig()
    avds: AvdsConfig = AvdsConfig()
    avds_mode: DistanceKind | None = None
    channel_policy: ChannelPolicy = ChannelPolicy.GRAYSCALE
    stages: tuple = _STAGE_ORDER

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise EmptyPipeline("at least one stage must be enabled")
        if len(set(stages)) != len(stages):
            raise InvalidConfig(f"duplicate stages in {stages!r}")
        order = [_STAGE_ORDER.index(s) for s in stages]
        if order != sorted(order):
            raise InvalidConfig(
                f"stages must keep the fuzzy, diffusion, avds order, got {stages!r}"
            )
        if self.avds_mode is not None and not isinstance(self.avds_mode, DistanceKind):
            raise InvalidConfig(f"avds_mode must be a DistanceKind or None, got {self.avds_mode!r}")


@dataclass(frozen=True)
class StageResult:
    """One enabled stage: its output and its report versus the run input."""

    stage: Stage
    image: Image
    report: QualityReport
    chosen: DistanceKind | None = None
    contrasts: dict | None = None


@dataclass(frozen=True)
class StageTrace:
    """The policy-adjusted input image plus one StageResult per stage."""

    input: Image
    results: tuple

    @property
    def final(self) -> Image:
        return self.results[-1].image


def _map_planes(image: Image, fn) -> Image:
    return Image(tuple(fn(p) for p in image.planes), image.channel_order)


def _fuzzy_params(config: FuzzyConfig) -> dict:
    params = {"half": config.half}
    if config.fixed_threshold is not None:
        params["threshold"] = config.fixed_threshold
    else:
        params["threshold"] = "auto"
        params["scale"] = config.threshold_scale
    params["guard"] = "on" if config.impulse_guard else "off"
    return params


def _diffusion_params(config: DiffusionConfig) -> dict:
    return {
        "lam": config.lam,
        "c": config.c,
        "sigma": config.sigma,
        "dt": config.dt,
        "steps": config.steps,
    }


def _avds_params(config: AvdsConfig, mode: DistanceKind | None, chosen: DistanceKind) -> dict:
    return {
        "mode": "adaptive" if mode is None else "fixed",
        "kind": chosen.label,
        "k": config.k,
        "omega": config.omega,
    }


def stage_params(stage: Stage, config: PipelineConfig, chosen: DistanceKind | None = None) -> dict:
    if stage is Stage.FUZZY:
        return _fuzzy_params(config.fuzzy)
    if stage is Stage.DIFFUSION:
        return _diffusion_params(config.diffusion)
    kind = chosen if chosen is not None else config.avds_mode
    return _avds_params(config.avds, config.avds_mode, kind)


def stage_method_label(stage: Stage, chosen: DistanceKind | None = None) -> str:
    if stage is Stage.AVDS and chosen is not None:
        return f"avds-{chosen.label}"
    return stage.value


def run_pipeline(image: Image, config: PipelineConfig = PipelineConfig()) -> StageTrace:
    """Apply the enabled stages in order and report each against the input.

    Equivalent to calling fuzzy_filter / diffuse / avds_single (or
    avds_adaptive) by hand with the same configs; this function only wires
    them together.
    """
    if config.channel_policy is ChannelPolicy.GRAYSCALE and image.channel_order is ChannelOrder.BGR:
        base = Image.gray(to_gray(image))
    else:
        base = image
    current = base
    results = []
    for stage in config.stages:
        chosen = None
        contrasts = None
        if stage is Stage.FUZZY:
            current = _map_planes(current, lambda p: fuzzy_filter(p, config.fuzzy))
        elif stage is Stage.DIFFUSION:
            current = _map_planes(current, lambda p: diffuse(p, config.diffusion))
        else:
            if config.avds_mode is None:
                outcome = avds_adaptive(to_gray(current), config.avds)
                chosen = outcome.chosen
                contrasts = dict(outcome.contrasts)
                if len(current.planes) == 1:
                    current = Image.gray(outcome.chosen_output)
                else:
                    current = _map_planes(
                        current, lambda p: avds_single(p, chosen, config.avds)
                    )
            else:
                chosen = config.avds_mode
                current = _map_planes(current, lambda p: avds_single(p, chosen, config.avds))
        report = evaluate(
            stage_method_label(stage, chosen),
            base,
            current,
            params=stage_params(stage, config, chosen),
        )
        results.append(
            StageResult(stage=stage, image=current, report=report,
                        chosen=chosen, contrasts=contrasts)
        )
    return StageTrace(input=base, results=tuple(results))
