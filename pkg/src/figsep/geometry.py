"""Pure geometric primitives: boxes, grid coordinates, IoU and binary layout masks.

Conventions used throughout the package:

* Box coordinates are normalized to [0, 1] in center format (x, y, w, h).
  Pixel coordinates appear only at I/O boundaries.
* Point-in-box membership uses half-open intervals [min, max) so that two
  boxes sharing an edge never both claim the same pixel center.
* Boxes are stored unclipped; rasterization clips to the image implicitly
  because only pixel centers inside [0, 1]^2 exist.

All functions here are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BBox",
    "GridCoord",
    "BinaryMask",
    "iou",
    "iou_matrix",
    "rasterize_mask",
    "grid_cell_of",
    "cells_in_box",
]


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in normalized center format.

    The extent [x - w/2, x + w/2] x [y - h/2, y + h/2] may spill outside
    [0, 1]^2; it is clipped only when rasterized.
    """

    x: float
    y: float
    w: float
    h: float

    @property
    def x0(self) -> float:
        return self.x - self.w / 2.0

    @property
    def x1(self) -> float:
        return self.x + self.w / 2.0

    @property
    def y0(self) -> float:
        return self.y - self.h / 2.0

    @property
    def y1(self) -> float:
        return self.y + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    def validate(self) -> "BBox":
        """Raise ValueError unless the box has positive, finite dimensions."""
        vals = (self.x, self.y, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box {self}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"degenerate box (w={self.w}, h={self.h})")
        return self

    @classmethod
    def from_extent(cls, x0: float, y0: float, x1: float, y1: float) -> "BBox":
        return cls((x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0)

    def union_extent(self, other: "BBox") -> "BBox":
        """Smallest box covering both self and other."""
        return BBox.from_extent(
            min(self.x0, other.x0),
            min(self.y0, other.y0),
            max(self.x1, other.x1),
            max(self.y1, other.y1),
        )

    def contains_box(self, inner: "BBox", tol: float = 1e-6) -> bool:
        """True if inner's extent lies inside self's extent (within tol)."""
        return (
            inner.x0 >= self.x0 - tol
            and inner.y0 >= self.y0 - tol
            and inner.x1 <= self.x1 + tol
            and inner.y1 <= self.y1 + tol
        )


@dataclass(frozen=True)
class GridCoord:
    """A cell of one feature-map scale: row i, column j."""

    i: int
    j: int
    scale: int = 0


@dataclass(frozen=True)
class BinaryMask:
    """A height x width grid of {0, 1} values (uint8)."""

    height: int
    width: int
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.shape != (self.height, self.width):
            raise ValueError(f"mask shape {v.shape} != ({self.height}, {self.width})")
        if v.dtype != np.uint8:
            raise ValueError(f"mask dtype must be uint8, got {v.dtype}")
        bad = (v != 0) & (v != 1)
        if bad.any():
            raise ValueError("mask values must be exactly 0 or 1")

    def popcount(self) -> int:
        return int(self.values.sum())


def iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union of two boxes, in [0, 1]. Symmetric."""
    a.validate()
    b.validate()
    iw = min(a.x1, b.x1) - max(a.x0, b.x0)
    ih = min(a.y1, b.y1) - max(a.y0, b.y0)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return min(max(inter / union, 0.0), 1.0)


def iou_matrix(boxes_a: list[BBox], boxes_b: list[BBox]) -> np.ndarray:
    """Pairwise IoU, shape (len(a), len(b))."""
    if not boxes_a or not boxes_b:
        return np.zeros((len(boxes_a), len(boxes_b)))
    ax = np.array([[b.x0, b.y0, b.x1, b.y1] for b in boxes_a])
    bx = np.array([[b.x0, b.y0, b.x1, b.y1] for b in boxes_b])
    iw = np.minimum(ax[:, None, 2], bx[None, :, 2]) - np.maximum(ax[:, None, 0], bx[None, :, 0])
    ih = np.minimum(ax[:, None, 3], bx[None, :, 3]) - np.maximum(ax[:, None, 1], bx[None, :, 1])
    inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
    area_a = (ax[:, 2] - ax[:, 0]) * (ax[:, 3] - ax[:, 1])
    area_b = (bx[:, 2] - bx[:, 0]) * (bx[:, 3] - bx[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return inter / union


def _pixel_centers(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def rasterize_mask(boxes, height: int, width: int) -> BinaryMask:
    """Binary layout mask: 1 where a pixel center falls inside any box.

    Pixel (v, u) has its center at ((u + 0.5) / width, (v + 0.5) / height);
    membership is half-open, [x0, x1) x [y0, y1). Boxes are effectively
    clipped to the image because centers outside [0, 1]^2 do not exist.
    """
    if height < 1 or width < 1:
        raise ValueError(f"invalid mask dimensions {height}x{width}")
    acc = np.zeros((height, width), dtype=bool)
    xs = _pixel_centers(width)
    ys = _pixel_centers(height)
    for box in boxes:
        box.validate()
        in_x = (xs >= box.x0) & (xs < box.x1)
        in_y = (ys >= box.y0) & (ys < box.y1)
        acc |= in_y[:, None] & in_x[None, :]
    return BinaryMask(height, width, acc.astype(np.uint8))


def grid_cell_of(point, grid_shape, scale: int = 0) -> GridCoord:
    """Map a normalized (x, y) point to the grid cell containing it.

    The floor mapping inverts the cell-center mapping up to quantization;
    points exactly on the far boundary (x == 1 or y == 1) clamp into the
    last row/column.
    """
    x, y = point
    grid_h, grid_w = grid_shape
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"point ({x}, {y}) outside [0, 1]^2")
    j = min(int(x * grid_w), grid_w - 1)
    i = min(int(y * grid_h), grid_h - 1)
    return GridCoord(i, j, scale)


def cell_center(cell: GridCoord, grid_shape) -> tuple[float, float]:
    """Normalized (x, y) of a cell's center."""
    grid_h, grid_w = grid_shape
    return (cell.j + 0.5) / grid_w, (cell.i + 0.5) / grid_h


def cells_in_box(box: BBox, grid_shape, scale: int = 0) -> list[GridCoord]:
    """Grid cells whose centers fall inside the box extent (half-open).

    Never empty: when no cell center lands inside the box (e.g. the box is
    smaller than one cell), the single cell containing the box center is
    returned instead. Cells are listed row-major, without duplicates.
    """
    box.validate()
    grid_h, grid_w = grid_shape
    xs = _pixel_centers(grid_w)
    ys = _pixel_centers(grid_h)
    cols = np.nonzero((xs >= box.x0) & (xs < box.x1))[0]
    rows = np.nonzero((ys >= box.y0) & (ys < box.y1))[0]
    if len(cols) == 0 or len(rows) == 0:
        cx = min(max(box.x, 0.0), 1.0)
        cy = min(max(box.y, 0.0), 1.0)
        return [grid_cell_of((cx, cy), grid_shape, scale)]
    return [GridCoord(int(i), int(j), scale) for i in rows for j in cols]
