"""Synthetic compound figures and label patches with exact ground truth.

The figure generator stamps glyph labels onto grid-arranged panels filled
with random gradients, shapes, plot-like line art, or smooth blobs. Every
generator is a pure function of (spec, seed): same inputs, same pixels.

Ground-truth convention: a subfigure's box is the union of its panel and
its label stamp, so the label always lies inside the subfigure box no
matter where it is placed (corner / above / below).
"""

from __future__ import annotations

import functools
import importlib.util
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..errors import FigsepError
from ..geometry import BBox
from .records import (
    FigureRecord,
    ImbalanceProfile,
    LabelClass,
    LabeledBox,
    PatchSample,
    SyntheticLayoutSpec,
    default_alphabet,
)

__all__ = [
    "available_fonts",
    "generate_synthetic_figure",
    "build_corpus",
    "generate_label_patch",
    "iter_label_patches",
    "sample_imbalanced",
]

_FONT_DIRS = (
    "/usr/share/fonts",
    "/usr/local/share/fonts",
    str(Path.home() / ".local/share/fonts"),
)


@functools.lru_cache(maxsize=1)
def available_fonts() -> tuple[str, ...]:
    """Sorted TTF font paths found on this machine (system dirs, then the
    matplotlib bundle as a fallback). Recorded in corpus manifests."""
    found: set[str] = set()
    for d in _FONT_DIRS:
        p = Path(d)
        if p.is_dir():
            found.update(str(f) for f in p.rglob("*.ttf"))
    if not found:
        spec = importlib.util.find_spec("matplotlib")
        if spec and spec.origin:
            ttf = Path(spec.origin).parent / "mpl-data" / "fonts" / "ttf"
            found.update(str(f) for f in ttf.glob("*.ttf"))
    if not found:
        raise FigsepError("no TTF fonts found; install DejaVu or point _FONT_DIRS somewhere")
    return tuple(sorted(found))


def _styled(glyph: str, style: str) -> str:
    if style == "paren":
        return f"({glyph})"
    if style == "upper":
        return glyph.upper()
    return glyph


def _dark_color(rng) -> tuple[int, int, int]:
    base = int(rng.integers(0, 60))
    return tuple(int(np.clip(base + rng.integers(-20, 21), 0, 90)) for _ in range(3))


def _light_color(rng, lo: int = 185) -> tuple[int, int, int]:
    return tuple(int(rng.integers(lo, 256)) for _ in range(3))


def _panel_content(rng, w: int, h: int) -> np.ndarray:
    """Random panel texture: gradient, shapes, line plot, or smooth blobs."""
    style = rng.integers(0, 4)
    if style == 0:  # directional gradient between two light colors
        c0 = np.array(_light_color(rng, 170), float)
        c1 = np.array(_light_color(rng, 170), float)
        yy, xx = np.mgrid[0:h, 0:w]
        axis = rng.integers(0, 3)
        t = {0: xx / max(w - 1, 1), 1: yy / max(h - 1, 1), 2: (xx + yy) / max(w + h - 2, 1)}[axis]
        img = (c0[None, None] * (1 - t[..., None]) + c1[None, None] * t[..., None])
        return img.astype(np.uint8)
    if style == 1:  # scattered shapes
        im = Image.new("RGB", (w, h), _light_color(rng, 200))
        d = ImageDraw.Draw(im)
        for _ in range(int(rng.integers(3, 8))):
            x0, y0 = int(rng.integers(0, max(w - 8, 1))), int(rng.integers(0, max(h - 8, 1)))
            x1 = x0 + int(rng.integers(6, max(w // 2, 7)))
            y1 = y0 + int(rng.integers(6, max(h // 2, 7)))
            color = tuple(int(rng.integers(40, 200)) for _ in range(3))
            fn = d.ellipse if rng.random() < 0.5 else d.rectangle
            fn([x0, y0, min(x1, w - 1), min(y1, h - 1)], fill=color)
        return np.asarray(im)
    if style == 2:  # plot-like polyline with an axes corner
        im = Image.new("RGB", (w, h), (252, 252, 252))
        d = ImageDraw.Draw(im)
        ax = (30, 30, 30)
        d.line([(3, 2), (3, h - 3), (w - 2, h - 3)], fill=ax, width=1)
        for _ in range(int(rng.integers(1, 3))):
            color = tuple(int(c) for c in rng.integers(0, 180, size=3))
            ys = h - 6 - np.abs(np.cumsum(rng.normal(0, h / 14, size=12))) % max(h - 12, 2)
            xs = np.linspace(6, w - 4, num=12)
            d.line(list(zip(xs.astype(int), ys.astype(int))), fill=color, width=2)
        return np.asarray(im)
    # style == 3: smooth blobs from an upsampled low-res field
    low = rng.integers(150, 256, size=(6, 6, 3)).astype(np.uint8)
    return np.asarray(Image.fromarray(low).resize((w, h), Image.BILINEAR))


def _place_glyph(draw, rng, text, font, target_xy) -> tuple[int, int, int, int]:
    """Return the ink bbox of text drawn with its top-left at target_xy."""
    bx0, by0, bx1, by1 = draw.textbbox((0, 0), text, font=font)
    ox, oy = target_xy[0] - bx0, target_xy[1] - by0
    return (ox + bx0, oy + by0, ox + bx1, oy + by1), (ox, oy)


def _stamp_label(img, draw, rng, glyph: str, style: str, font, cell, panel, position: str):
    """Draw one label glyph; returns its ground-truth pixel extent."""
    text = _styled(glyph, style)
    bx0, by0, bx1, by1 = draw.textbbox((0, 0), text, font=font)
    gw, gh = bx1 - bx0, by1 - by0
    px0, py0, px1, py1 = panel
    cx0, cy0, cx1, cy1 = cell
    if position == "corner":
        tx = px0 + 5 + int(rng.integers(0, 4))
        ty = py0 + 4 + int(rng.integers(0, 4))
    elif position == "above":
        tx = px0 + 2 + int(rng.integers(0, 6))
        ty = max(cy0 + 1, py0 - gh - 4)
    else:  # below
        tx = px0 + 2 + int(rng.integers(0, 6))
        ty = min(cy1 - gh - 1, py1 + 3)
    tx = int(min(max(tx, cx0 + 1), cx1 - gw - 1))
    ty = int(min(max(ty, cy0 + 1), cy1 - gh - 1))
    (ix0, iy0, ix1, iy1), origin = _place_glyph(draw, rng, text, font, (tx, ty))

    chip = position == "corner" and rng.random() < 0.65
    pad = 3
    if chip:
        draw.rectangle([ix0 - pad, iy0 - pad, ix1 + pad, iy1 + pad], fill=_light_color(rng, 235))
    draw.text(origin, text, font=font, fill=_dark_color(rng))
    if chip:
        return (ix0 - pad, iy0 - pad, ix1 + pad, iy1 + pad)
    return (ix0 - 2, iy0 - 2, ix1 + 2, iy1 + 2)


def generate_synthetic_figure(
    spec: SyntheticLayoutSpec, seed: int, image_id: str | None = None
) -> FigureRecord:
    """Render one compound figure with exact label/subfigure ground truth.

    Deterministic: the same (spec, seed) always produces the same record.
    Raises ValueError when the alphabet has fewer classes than subfigures.
    """
    if len(spec.alphabet) < spec.n_subfigures:
        raise ValueError(
            f"alphabet has {len(spec.alphabet)} classes but spec asks for "
            f"{spec.n_subfigures} subfigures"
        )
    rng = np.random.default_rng(seed)
    size = spec.canvas_size
    img = Image.new("RGB", (size, size), (255, 255, 255))
    draw = ImageDraw.Draw(img)

    fonts = available_fonts()
    font_path = fonts[int(rng.integers(0, len(fonts)))]
    font_px = int(rng.integers(round(0.040 * size), round(0.068 * size) + 1))
    font = ImageFont.truetype(font_path, font_px)
    strip = int(font_px * 1.5) + 6

    cw, ch = size / spec.cols, size / spec.rows
    label_boxes: list[LabeledBox] = []
    subfig_boxes: list[tuple[BBox, int]] = []
    for k in range(spec.n_subfigures):
        r, c = divmod(k, spec.cols)
        cx0, cy0 = c * cw, r * ch
        cell = (int(cx0), int(cy0), int(cx0 + cw) - 1, int(cy0 + ch) - 1)

        mx, my = 0.055 * cw, 0.055 * ch
        insets = [m * (1.0 + float(rng.uniform(0, 3.0 * spec.jitter))) for m in (mx, my, mx, my)]
        px0, py0 = cx0 + insets[0], cy0 + insets[1]
        px1, py1 = cx0 + cw - insets[2], cy0 + ch - insets[3]
        if spec.label_position == "above":
            py0 = cy0 + strip
        elif spec.label_position == "below":
            py1 = cy0 + ch - strip
        panel = (int(px0), int(py0), int(px1), int(py1))

        content = _panel_content(rng, panel[2] - panel[0], panel[3] - panel[1])
        img.paste(Image.fromarray(content), (panel[0], panel[1]))
        if rng.random() < 0.7:
            draw.rectangle(panel, outline=_dark_color(rng), width=1)

        cls = spec.alphabet[k]
        ext = _stamp_label(img, draw, rng, cls.glyph, spec.glyph_style, font, cell, panel,
                           spec.label_position)

        lbox = BBox.from_extent(ext[0] / size, ext[1] / size, (ext[2] + 1) / size, (ext[3] + 1) / size)
        pbox = BBox.from_extent(panel[0] / size, panel[1] / size,
                                (panel[2] + 1) / size, (panel[3] + 1) / size)
        label_boxes.append(LabeledBox(lbox, cls.id))
        subfig_boxes.append((pbox.union_extent(lbox), cls.id))

    record = FigureRecord(
        image_id=image_id or f"fig-{seed}",
        image=np.asarray(img),
        label_boxes=label_boxes,
        subfig_boxes=subfig_boxes,
    )
    return record.validate()


def sample_imbalanced(profile, n: int, seed: int) -> np.ndarray:
    """Draw n class ids (with replacement) proportionally to profile weights."""
    if not isinstance(profile, ImbalanceProfile):
        profile = ImbalanceProfile(tuple(profile))  # validates weights
    rng = np.random.default_rng(seed)
    ids = np.arange(1, len(profile.weights) + 1)
    return rng.choice(ids, size=n, p=profile.probabilities())


def _figure_classes(rng, alphabet, n_sub: int, profile: ImbalanceProfile | None):
    if profile is None:
        return alphabet[:n_sub]
    probs = profile.probabilities()
    if len(probs) != len(alphabet):
        raise ValueError("profile length must match alphabet length")
    n_avail = int(np.count_nonzero(probs))
    n_sub = min(n_sub, n_avail)
    idx = rng.choice(len(alphabet), size=n_sub, replace=False, p=probs)
    return [alphabet[i] for i in sorted(idx)]


def build_corpus(
    n_figures: int,
    options,
    seed: int,
    id_prefix: str = "fig",
    profile: ImbalanceProfile | None = None,
) -> tuple[list[FigureRecord], list[LabelClass]]:
    """Generate a corpus of varied layouts; returns (records, alphabet).

    Layout shape, label position, and typography are drawn per figure.
    With a profile, each figure's label classes are sampled (without
    replacement) from the profile instead of the natural sequential
    a, b, c, ... assignment, which is how rare-class corpora are built.
    """
    alphabet = default_alphabet(options.n_classes)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    child_seeds = np.random.SeedSequence(seed).spawn(n_figures)
    positions = options.label_positions
    records = []
    for i in range(n_figures):
        rows = int(rng.integers(1, options.max_rows + 1))
        cols = int(rng.integers(1, options.max_cols + 1))
        cells = rows * cols
        n_sub = int(rng.integers(max(1, cells - 2), cells + 1))
        classes = _figure_classes(rng, alphabet, n_sub, profile)
        spec = SyntheticLayoutSpec(
            rows=rows,
            cols=cols,
            n_subfigures=len(classes),
            alphabet=classes,
            jitter=options.jitter,
            label_position=positions[int(rng.integers(0, len(positions)))],
            canvas_size=options.canvas_size,
            glyph_style=("plain", "paren", "upper")[int(rng.integers(0, 3))],
        )
        fig_seed = int(child_seeds[i].generate_state(1)[0])
        records.append(generate_synthetic_figure(spec, fig_seed, image_id=f"{id_prefix}_{i:05d}"))
    return records, alphabet


def _crop_window(rng, rec: FigureRecord, tries: int = 40):
    """A random square window that avoids every ground-truth label stamp."""
    h, w = rec.image.shape[:2]
    side = int(rng.uniform(0.07, 0.18) * min(h, w))
    side = max(side, 16)
    label_ext = [
        (b.box.x0 * w, b.box.y0 * h, b.box.x1 * w, b.box.y1 * h) for b in rec.label_boxes
    ]
    for _ in range(tries):
        x0 = int(rng.integers(0, max(w - side, 1)))
        y0 = int(rng.integers(0, max(h - side, 1)))
        x1, y1 = x0 + side, y0 + side
        hit = any(x0 < ex1 and x1 > ex0 and y0 < ey1 and y1 > ey0
                  for ex0, ey0, ex1, ey1 in label_ext)
        if not hit:
            return rec.image[y0:y1, x0:x1]
    return np.full((side, side, 3), 235, dtype=np.uint8)


def generate_label_patch(
    corpus,
    alphabet,
    seed: int,
    p_bg: float = 0.5,
    patch_size: int = 64,
    weights=None,
) -> PatchSample:
    """One classifier training patch from a random figure background.

    With probability p_bg the patch stays background-only (class 0);
    otherwise a randomly styled glyph is pasted and its class returned.
    Glyph class is drawn uniformly unless per-class weights are given.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    rng = np.random.default_rng(seed)
    rec = corpus[int(rng.integers(0, len(corpus)))]
    crop = np.ascontiguousarray(_crop_window(rng, rec))

    if rng.random() < p_bg:
        patch = Image.fromarray(crop).resize((patch_size, patch_size), Image.BILINEAR)
        return PatchSample(np.asarray(patch), 0)

    if weights is not None:
        probs = np.asarray(weights, float)
        probs = probs / probs.sum()
        cls = alphabet[int(rng.choice(len(alphabet), p=probs))]
    else:
        cls = alphabet[int(rng.integers(0, len(alphabet)))]
    style = ("plain", "paren", "upper")[int(rng.integers(0, 3))]
    text = _styled(cls.glyph, style)

    im = Image.fromarray(crop)
    draw = ImageDraw.Draw(im)
    side = crop.shape[0]
    fonts = available_fonts()
    font_px = int(rng.uniform(0.42, 0.70) * side)
    font = ImageFont.truetype(fonts[int(rng.integers(0, len(fonts)))], max(font_px, 8))
    bx0, by0, bx1, by1 = draw.textbbox((0, 0), text, font=font)
    gw, gh = bx1 - bx0, by1 - by0
    tx = int(rng.integers(2, max(side - gw - 2, 3)))
    ty = int(rng.integers(2, max(side - gh - 2, 3)))
    (ix0, iy0, ix1, iy1), origin = _place_glyph(draw, rng, text, font, (tx, ty))
    if rng.random() < 0.4:
        draw.rectangle([ix0 - 3, iy0 - 3, ix1 + 3, iy1 + 3], fill=_light_color(rng, 230))
    dark = crop.mean() < 110
    draw.text(origin, text, font=font, fill=_light_color(rng, 215) if dark else _dark_color(rng))
    patch = im.resize((patch_size, patch_size), Image.BILINEAR)
    return PatchSample(np.asarray(patch), cls.id)


def iter_label_patches(corpus, alphabet, seed: int, n: int | None = None, **kwargs):
    """Stream of label patches; deterministic for a given seed."""
    ss = np.random.SeedSequence(seed)
    count = 0
    while n is None or count < n:
        (child,) = ss.spawn(1)
        yield generate_label_patch(corpus, alphabet, int(child.generate_state(1)[0]), **kwargs)
        count += 1
