"""Annotation domain types: label classes, labeled boxes, figure records.

Class id 0 is reserved for background everywhere; real label classes are
contiguous ids starting at 1.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from ..errors import DanglingClassError, MalformedAnnotationError
from ..geometry import BBox

__all__ = [
    "LabelClass",
    "LabeledBox",
    "FigureRecord",
    "PatchSample",
    "ImbalanceProfile",
    "SyntheticLayoutSpec",
    "default_alphabet",
    "figure_label_profile",
]

BACKGROUND_CLASS = 0


@dataclass(frozen=True)
class LabelClass:
    """One subfigure-label category: contiguous id >= 1 plus its base glyph.

    Typographic variants of the same index ("a", "(a)", "A") all map to one
    class; the stored glyph is the canonical lowercase form.
    """

    id: int
    glyph: str

    def __post_init__(self):
        if self.id < 1:
            raise ValueError("label class ids start at 1 (0 is background)")
        if not self.glyph:
            raise ValueError("empty glyph")


def default_alphabet(n_classes: int = 9) -> list[LabelClass]:
    """Lowercase a, b, c, ... alphabet with ids 1..n."""
    if not (1 <= n_classes <= 26):
        raise ValueError("n_classes must be in [1, 26]")
    return [LabelClass(i + 1, string.ascii_lowercase[i]) for i in range(n_classes)]


@dataclass(frozen=True)
class LabeledBox:
    """A box plus its label class and a confidence score."""

    box: BBox
    class_id: int
    confidence: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


def _clip_extent(b: BBox) -> tuple[float, float, float, float]:
    return (max(b.x0, 0.0), max(b.y0, 0.0), min(b.x1, 1.0), min(b.y1, 1.0))


@dataclass
class FigureRecord:
    """A compound figure with ground-truth labels and subfigures.

    ``subfig_boxes`` pairs each subfigure box with the class id of its
    label; that class must appear exactly once among ``label_boxes``, and
    the label box must lie inside the subfigure box (after clipping both
    to the image).
    """

    image_id: str
    image: np.ndarray  # H x W x 3 uint8
    label_boxes: list[LabeledBox] = field(default_factory=list)
    subfig_boxes: list[tuple[BBox, int]] = field(default_factory=list)

    def validate(self, tol: float = 1e-6) -> "FigureRecord":
        img = self.image
        if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
            raise MalformedAnnotationError(
                f"{self.image_id}: image must be HxWx3 uint8, got {img.shape} {img.dtype}"
            )
        for lb in self.label_boxes:
            lb.box.validate()
        class_counts: dict[int, int] = {}
        by_class: dict[int, LabeledBox] = {}
        for lb in self.label_boxes:
            class_counts[lb.class_id] = class_counts.get(lb.class_id, 0) + 1
            by_class[lb.class_id] = lb
        for box, class_id in self.subfig_boxes:
            box.validate()
            if class_counts.get(class_id, 0) != 1:
                raise DanglingClassError(
                    f"{self.image_id}: subfigure references label class {class_id} "
                    f"which appears {class_counts.get(class_id, 0)} times among labels"
                )
            lx0, ly0, lx1, ly1 = _clip_extent(by_class[class_id].box)
            sx0, sy0, sx1, sy1 = _clip_extent(box)
            inside = (
                lx0 >= sx0 - tol and ly0 >= sy0 - tol and lx1 <= sx1 + tol and ly1 <= sy1 + tol
            )
            if not inside:
                raise MalformedAnnotationError(
                    f"{self.image_id}: label box for class {class_id} lies outside "
                    "its subfigure box"
                )
        return self


@dataclass(frozen=True)
class PatchSample:
    """A fixed-size square crop plus its target class (0 = background)."""

    raster: np.ndarray  # S x S x 3 uint8
    target: int


@dataclass(frozen=True)
class ImbalanceProfile:
    """Relative frequency weights for classes 1..n (index 0 = class 1)."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be >= 0")
        if not any(w > 0 for w in self.weights):
            raise ValueError("at least one weight must be positive")

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=float)
        return w / w.sum()


def figure_label_profile(n_classes: int = 9) -> ImbalanceProfile:
    """Default monotone-decreasing frequency profile.

    Later alphabet letters only appear in figures with many panels, so their
    frequency drops steeply; this ships as a configurable default shape, not
    as a measured reproduction of any particular corpus.
    """
    weights = tuple(0.62**i for i in range(n_classes))
    return ImbalanceProfile(weights)


_LABEL_POSITIONS = ("corner", "above", "below")
_GLYPH_STYLES = ("plain", "paren", "upper")


@dataclass(frozen=True)
class SyntheticLayoutSpec:
    """Layout recipe for one synthetic compound figure."""

    rows: int
    cols: int
    n_subfigures: int
    alphabet: list[LabelClass]
    jitter: float = 0.2
    label_position: str = "corner"
    canvas_size: int = 512
    glyph_style: str = "plain"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if not (1 <= self.n_subfigures <= self.rows * self.cols):
            raise ValueError("need 1 <= n_subfigures <= rows*cols")
        if self.label_position not in _LABEL_POSITIONS:
            raise ValueError(f"label_position must be one of {_LABEL_POSITIONS}")
        if self.glyph_style not in _GLYPH_STYLES:
            raise ValueError(f"glyph_style must be one of {_GLYPH_STYLES}")
        if not (0.0 <= self.jitter <= 1.0):
            raise ValueError("jitter must be in [0, 1]")
        if self.canvas_size < 64:
            raise ValueError("canvas_size too small")
