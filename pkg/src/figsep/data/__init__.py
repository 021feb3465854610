from .records import (
    LabelClass,
    LabeledBox,
    FigureRecord,
    PatchSample,
    ImbalanceProfile,
    SyntheticLayoutSpec,
    default_alphabet,
    figure_label_profile,
)
from .corpus import load_corpus, save_corpus, read_manifest
from .synthetic import (
    available_fonts,
    generate_synthetic_figure,
    generate_label_patch,
    iter_label_patches,
    sample_imbalanced,
    build_corpus,
)

__all__ = [
    "LabelClass",
    "LabeledBox",
    "FigureRecord",
    "PatchSample",
    "ImbalanceProfile",
    "SyntheticLayoutSpec",
    "default_alphabet",
    "figure_label_profile",
    "load_corpus",
    "save_corpus",
    "read_manifest",
    "available_fonts",
    "generate_synthetic_figure",
    "generate_label_patch",
    "iter_label_patches",
    "sample_imbalanced",
    "build_corpus",
]
