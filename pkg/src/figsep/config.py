"""Configuration dataclasses, presets, and YAML round-tripping.

Two presets ship for the detection backbones: ``toy`` (small enough to
train on a CPU in minutes; used by the test suite and the default CLI
config) and ``paper`` (records the published full-scale choices: a deep
53-layer-class backbone with pyramid merging and a very deep patch
classifier; constructible, but not needed for anything here).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

__all__ = [
    "BackboneSpec",
    "DetectorConfig",
    "ClassifierConfig",
    "SubfigureConfig",
    "TrainSchedule",
    "CorpusOptions",
    "PipelineConfig",
    "toy_pipeline_config",
    "paper_detector_config",
    "paper_classifier_config",
    "to_plain",
]


def to_plain(obj):
    """Recursively convert dataclasses/tuples to YAML-friendly dicts/lists."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {k: to_plain(v) for k, v in obj.items()}
    return obj


def _tup(seq):
    if seq is None:
        return None
    return tuple(tuple(v) if isinstance(v, (list, tuple)) else v for v in seq)


@dataclass(frozen=True)
class BackboneSpec:
    """Strided convolutional encoder shape.

    Stage k (0-based) downsamples by 2 and outputs ``widths[k]`` channels,
    so its output stride is 2**(k+1). ``depth`` extra 3x3 blocks run after
    each downsampling conv. Pyramid maps produced by top-down merging all
    carry ``fpn_channels`` channels.
    """

    widths: tuple[int, ...] = (16, 32, 48, 64)
    depth: int = 1
    fpn_channels: int = 64

    @classmethod
    def from_dict(cls, d):
        return cls(widths=tuple(d["widths"]), depth=d["depth"], fpn_channels=d["fpn_channels"])


@dataclass(frozen=True)
class DetectorConfig:
    """Subfigure-label localizer configuration."""

    input_resolution: int = 256
    strides: tuple[int, ...] = (8, 16)
    backbone: BackboneSpec = field(default_factory=BackboneSpec)
    # per scale: list of (prior_w, prior_h) in normalized units
    anchors: tuple = (((0.045, 0.055), (0.085, 0.065)), ((0.08, 0.08), (0.15, 0.10)))
    confidence_threshold: float = 0.5
    lambda_conf: float = 1.0
    nms_iou: float = 0.45
    ignore_iou: float = 0.7

    def __post_init__(self):
        if not (0.0 < self.confidence_threshold < 1.0):
            raise ValueError("confidence_threshold must be in (0, 1)")
        if self.lambda_conf <= 0:
            raise ValueError("lambda_conf must be > 0")
        if len(self.anchors) != len(self.strides):
            raise ValueError("need one anchor list per scale")
        for per_scale in self.anchors:
            if len(per_scale) == 0 or any(w <= 0 or h <= 0 for w, h in per_scale):
                raise ValueError("anchor priors must be positive and non-empty")
        for s in self.strides:
            if self.input_resolution % s:
                raise ValueError(f"stride {s} does not divide resolution {self.input_resolution}")

    def grid_shape(self, scale_idx: int) -> tuple[int, int]:
        n = self.input_resolution // self.strides[scale_idx]
        return (n, n)

    @classmethod
    def from_dict(cls, d):
        return cls(
            input_resolution=d["input_resolution"],
            strides=tuple(d["strides"]),
            backbone=BackboneSpec.from_dict(d["backbone"]),
            anchors=tuple(_tup(s) for s in d["anchors"]),
            confidence_threshold=d["confidence_threshold"],
            lambda_conf=d["lambda_conf"],
            nms_iou=d["nms_iou"],
            ignore_iou=d["ignore_iou"],
        )


@dataclass(frozen=True)
class ClassifierConfig:
    """Label-patch classifier configuration. Class 0 is background."""

    input_size: int = 64
    n_classes: int = 10
    widths: tuple[int, ...] = (16, 32, 64)
    depth: int = 1
    crop_padding: float = 0.15

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("need at least background + one label class")

    @classmethod
    def from_dict(cls, d):
        return cls(
            input_size=d["input_size"],
            n_classes=d["n_classes"],
            widths=tuple(d["widths"]),
            depth=d["depth"],
            crop_padding=d["crop_padding"],
        )


@dataclass(frozen=True)
class SubfigureConfig:
    """Label-guided subfigure detector configuration.

    Subfigures are large objects, so a single coarse scale is used. The
    prediction head is shared between the anchor-cell pass and the latent
    refinement pass unless ``share_heads`` is off (ablation harness).
    ``anchor_aggregate`` picks how a multi-cell anchor selection collapses
    to one feature vector: the cell under the label-box center, or the
    mean over all selected cells.
    """

    input_resolution: int = 256
    stride: int = 32
    backbone: BackboneSpec = field(default_factory=lambda: BackboneSpec(widths=(16, 24, 32, 48, 64)))
    prior: tuple[float, float] = (0.45, 0.45)
    lambda_conf: float = 1.0
    ignore_iou: float = 0.7
    confidence_filter: float = 0.25
    latent_refinement: bool = True
    share_heads: bool = True
    anchor_aggregate: str = "center"

    def __post_init__(self):
        if self.input_resolution % self.stride:
            raise ValueError("stride must divide input_resolution")
        if self.anchor_aggregate not in ("center", "mean"):
            raise ValueError("anchor_aggregate must be 'center' or 'mean'")

    def grid_shape(self) -> tuple[int, int]:
        n = self.input_resolution // self.stride
        return (n, n)

    @classmethod
    def from_dict(cls, d):
        return cls(
            input_resolution=d["input_resolution"],
            stride=d["stride"],
            backbone=BackboneSpec.from_dict(d["backbone"]),
            prior=tuple(d["prior"]),
            lambda_conf=d["lambda_conf"],
            ignore_iou=d["ignore_iou"],
            confidence_filter=d["confidence_filter"],
            latent_refinement=d["latent_refinement"],
            share_heads=d["share_heads"],
            anchor_aggregate=d["anchor_aggregate"],
        )


@dataclass(frozen=True)
class TrainSchedule:
    """Step budget and Adam learning-rate schedule (step decay)."""

    steps: int = 1000
    batch_size: int = 8
    learning_rate: float = 1e-3
    decay_every: int = 10000
    decay_factor: float = 0.5
    log_every: int = 10

    @classmethod
    def from_dict(cls, d):
        return cls(**{f.name: d[f.name] for f in dataclasses.fields(cls)})


@dataclass(frozen=True)
class CorpusOptions:
    """Knobs for the synthetic compound-figure corpus builder."""

    canvas_size: int = 512
    max_rows: int = 3
    max_cols: int = 3
    n_classes: int = 9
    jitter: float = 0.2
    label_positions: tuple[str, ...] = ("corner", "above", "below")
    # Relative per-class frequency weights (index 0 = class id 1). None keeps
    # the natural sequential a, b, c, ... assignment per figure.
    class_weights: tuple[float, ...] | None = None
    p_background: float = 0.5

    @classmethod
    def from_dict(cls, d):
        return cls(
            canvas_size=d["canvas_size"],
            max_rows=d["max_rows"],
            max_cols=d["max_cols"],
            n_classes=d["n_classes"],
            jitter=d["jitter"],
            label_positions=tuple(d["label_positions"]),
            class_weights=None if d["class_weights"] is None else tuple(d["class_weights"]),
            p_background=d["p_background"],
        )


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one end-to-end run needs, echoed into every manifest."""

    seed: int = 0
    train_corpus: str = "data/train"
    test_corpus: str = "data/test"
    checkpoints: str = "checkpoints"
    outputs: str = "outputs"
    corpus: CorpusOptions = field(default_factory=CorpusOptions)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    subfigure: SubfigureConfig = field(default_factory=SubfigureConfig)
    detector_schedule: TrainSchedule = field(default_factory=lambda: TrainSchedule(steps=1500, batch_size=8, learning_rate=1e-3, decay_every=600))
    classifier_schedule: TrainSchedule = field(default_factory=lambda: TrainSchedule(steps=700, batch_size=32, learning_rate=2e-3, decay_every=300))
    subfigure_schedule: TrainSchedule = field(default_factory=lambda: TrainSchedule(steps=1400, batch_size=8, learning_rate=1.5e-3, decay_every=600))

    def to_dict(self) -> dict:
        return to_plain(self)

    @classmethod
    def from_dict(cls, d) -> "PipelineConfig":
        return cls(
            seed=d["seed"],
            train_corpus=d["train_corpus"],
            test_corpus=d["test_corpus"],
            checkpoints=d["checkpoints"],
            outputs=d["outputs"],
            corpus=CorpusOptions.from_dict(d["corpus"]),
            detector=DetectorConfig.from_dict(d["detector"]),
            classifier=ClassifierConfig.from_dict(d["classifier"]),
            subfigure=SubfigureConfig.from_dict(d["subfigure"]),
            detector_schedule=TrainSchedule.from_dict(d["detector_schedule"]),
            classifier_schedule=TrainSchedule.from_dict(d["classifier_schedule"]),
            subfigure_schedule=TrainSchedule.from_dict(d["subfigure_schedule"]),
        )

    def to_yaml(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def from_yaml(cls, path) -> "PipelineConfig":
        return cls.from_dict(yaml.safe_load(Path(path).read_text(encoding="utf-8")))


def toy_pipeline_config(seed: int = 0, n_classes: int = 9) -> PipelineConfig:
    """Default desk-scale configuration; trains in minutes on one CPU core."""
    return PipelineConfig(
        seed=seed,
        corpus=CorpusOptions(n_classes=n_classes),
        classifier=ClassifierConfig(n_classes=n_classes + 1),
    )


def paper_detector_config() -> DetectorConfig:
    """The published full-scale detector setup: 416 input, three scales,
    a deep residual backbone in the 53-layer class, pyramid merging."""
    return DetectorConfig(
        input_resolution=416,
        strides=(8, 16, 32),
        backbone=BackboneSpec(widths=(32, 64, 128, 256, 512), depth=8, fpn_channels=256),
        anchors=(
            ((0.02, 0.03), (0.04, 0.05), (0.06, 0.06)),
            ((0.08, 0.08), (0.12, 0.10), (0.16, 0.16)),
            ((0.25, 0.25), (0.40, 0.35), (0.70, 0.60)),
        ),
    )


def paper_classifier_config(n_classes: int = 10) -> ClassifierConfig:
    """The published full-scale patch classifier: a very deep residual
    net (152-layer class) on larger crops."""
    return ClassifierConfig(input_size=224, n_classes=n_classes, widths=(64, 128, 256, 512), depth=36)
