"""Corpus persistence.

Directory layout::

    <corpus>/images/<image_id>.png
    <corpus>/annotations.jsonl     # one JSON object per record
    <corpus>/manifest.json         # alphabet, generator echo, fonts (optional)

Each annotation line is
``{"image_id", "width", "height", "labels": [...], "subfigures": [...]}``
with boxes in normalized center format and classes as glyph strings.
Unknown keys are ignored on read and never emitted on write.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import CorpusError, MalformedAnnotationError, MissingImageError
from ..geometry import BBox
from .records import FigureRecord, LabelClass, LabeledBox

__all__ = ["save_corpus", "load_corpus", "read_manifest"]

_ANNOTATIONS = "annotations.jsonl"
_MANIFEST = "manifest.json"
_IMAGES = "images"


def _box_json(b: BBox) -> dict:
    return {"x": b.x, "y": b.y, "w": b.w, "h": b.h}


def _box_from_json(d: dict, where: str) -> BBox:
    try:
        box = BBox(float(d["x"]), float(d["y"]), float(d["w"]), float(d["h"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedAnnotationError(f"{where}: bad box {d!r}") from exc
    try:
        box.validate()
    except ValueError as exc:
        raise MalformedAnnotationError(f"{where}: {exc}") from exc
    return box


def save_corpus(records, path, alphabet, manifest_extra: dict | None = None) -> None:
    """Write records losslessly; load_corpus(save_corpus(x)) == x."""
    root = Path(path)
    (root / _IMAGES).mkdir(parents=True, exist_ok=True)
    glyph_of = {c.id: c.glyph for c in alphabet}
    lines = []
    for rec in records:
        rec.validate()
        h, w = rec.image.shape[:2]
        entry = {
            "image_id": rec.image_id,
            "width": int(w),
            "height": int(h),
            "labels": [
                {"class": glyph_of[lb.class_id], **_box_json(lb.box)} for lb in rec.label_boxes
            ],
            "subfigures": [
                {"class": glyph_of[cid], **_box_json(box)} for box, cid in rec.subfig_boxes
            ],
        }
        lines.append(json.dumps(entry, sort_keys=True))
        Image.fromarray(rec.image).save(root / _IMAGES / f"{rec.image_id}.png")
    (root / _ANNOTATIONS).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    manifest = {
        "alphabet": [{"id": c.id, "glyph": c.glyph} for c in alphabet],
        "n_records": len(lines),
    }
    if manifest_extra:
        manifest.update(manifest_extra)
    (root / _MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")


def read_manifest(path) -> dict | None:
    p = Path(path) / _MANIFEST
    if not p.exists():
        return None
    return json.loads(p.read_text(encoding="utf-8"))


def corpus_alphabet(path) -> list[LabelClass] | None:
    """Alphabet recorded in the corpus manifest, if any."""
    manifest = read_manifest(path)
    if manifest is None or "alphabet" not in manifest:
        return None
    return [LabelClass(e["id"], e["glyph"]) for e in manifest["alphabet"]]


def _derive_alphabet(entries) -> list[LabelClass]:
    glyphs = sorted(
        {item["class"] for e in entries for item in e.get("labels", []) + e.get("subfigures", [])}
    )
    return [LabelClass(i + 1, g) for i, g in enumerate(glyphs)]


def load_corpus(path) -> list[FigureRecord]:
    """Load and validate every record; violations are reported by record id.

    An empty or missing annotations file yields an empty list. Each failure
    mode raises a distinct error kind: MissingImageError for absent image
    files, MalformedAnnotationError for unparsable lines or bad boxes, and
    DanglingClassError for a subfigure whose class is not among the labels.
    """
    root = Path(path)
    ann = root / _ANNOTATIONS
    if not ann.exists():
        return []
    entries = []
    for lineno, line in enumerate(ann.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedAnnotationError(f"{ann}:{lineno}: not valid JSON") from exc
        if not isinstance(obj, dict) or "image_id" not in obj:
            raise MalformedAnnotationError(f"{ann}:{lineno}: missing image_id")
        entries.append(obj)

    alphabet = corpus_alphabet(root) or _derive_alphabet(entries)
    id_of = {c.glyph: c.id for c in alphabet}

    records = []
    for entry in entries:
        image_id = str(entry["image_id"])
        img_path = root / _IMAGES / f"{image_id}.png"
        if not img_path.exists():
            raise MissingImageError(f"{image_id}: image file {img_path} not found")
        image = np.asarray(Image.open(img_path).convert("RGB"))

        def class_id(glyph: str, what: str) -> int:
            if glyph not in id_of:
                raise MalformedAnnotationError(
                    f"{image_id}: unknown {what} class {glyph!r} (not in alphabet)"
                )
            return id_of[glyph]

        labels = [
            LabeledBox(_box_from_json(d, image_id), class_id(d["class"], "label"))
            for d in entry.get("labels", [])
        ]
        subfigs = [
            (_box_from_json(d, image_id), class_id(d["class"], "subfigure"))
            for d in entry.get("subfigures", [])
        ]
        rec = FigureRecord(image_id=image_id, image=image, label_boxes=labels, subfig_boxes=subfigs)
        rec.validate()  # raises DanglingClassError / MalformedAnnotationError
        records.append(rec)
    return records
