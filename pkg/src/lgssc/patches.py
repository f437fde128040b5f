"""Top-down division of image galleries into an s-level, p-way patch grid.

Every node covers a rectangle of the root image; its pixel indices always
refer to the root's row-major vectorization (row index varies slowest), so
a node's rows can be picked straight out of the full gallery.
"""

from dataclasses import dataclass

import numpy as np

from .datatypes import DataGallery, normalize_columns
from .errors import GeometryMismatch, PatchTooSmall

_GRID = {4: 2, 9: 3}


@dataclass(frozen=True)
class PatchNode:
    """One rectangular patch: its level, position and pixel footprint."""

    level: int
    index_in_level: int
    row0: int
    col0: int
    height: int
    width: int
    pixel_indices: np.ndarray
    children: tuple

    def __post_init__(self):
        idx = np.asarray(self.pixel_indices, dtype=np.int64)
        idx.setflags(write=False)
        object.__setattr__(self, "pixel_indices", idx)
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class PatchHierarchy:
    """All nodes level by level; level i holds p**(i-1) nodes."""

    nodes_by_level: tuple
    s: int
    p: int
    overlap_fraction: float
    image_height: int
    image_width: int

    @property
    def root(self) -> PatchNode:
        return self.nodes_by_level[0][0]

    @property
    def leaves(self):
        return self.nodes_by_level[-1]

    def node(self, level, index) -> PatchNode:
        return self.nodes_by_level[level - 1][index]


def _split_lengths(length, parts):
    """Split ``length`` into ``parts`` integers, larger segments first."""
    q, r = divmod(length, parts)
    return [q + 1] * r + [q] * (parts - r)


def _pixel_indices(row0, col0, height, width, image_width):
    rows = np.arange(row0, row0 + height, dtype=np.int64)
    cols = np.arange(col0, col0 + width, dtype=np.int64)
    return (rows[:, None] * image_width + cols[None, :]).ravel()


def _tile(parent, grid, overlap_fraction, image_width):
    """Rectangles of the grid x grid split of a parent rectangle.

    Non-overlap mode partitions the parent exactly. In overlap mode each
    tile grows by round(overlap_fraction * tile side) on every interior
    side, clipped to the parent.
    """
    r0, c0, H, W = parent
    heights = _split_lengths(H, grid)
    widths = _split_lengths(W, grid)
    row_starts = np.concatenate([[0], np.cumsum(heights)[:-1]]) + r0
    col_starts = np.concatenate([[0], np.cumsum(widths)[:-1]]) + c0
    tiles = []
    for i in range(grid):
        for j in range(grid):
            tr, tc, th, tw = int(row_starts[i]), int(col_starts[j]), heights[i], widths[j]
            if overlap_fraction > 0:
                dr = int(np.floor(overlap_fraction * th + 0.5))
                dc = int(np.floor(overlap_fraction * tw + 0.5))
                top = dr if i > 0 else 0
                bottom = dr if i < grid - 1 else 0
                left = dc if j > 0 else 0
                right = dc if j < grid - 1 else 0
                new_r = max(r0, tr - top)
                new_c = max(c0, tc - left)
                th = min(r0 + H, tr + th + bottom) - new_r
                tw = min(c0 + W, tc + tw + right) - new_c
                tr, tc = new_r, new_c
            tiles.append((tr, tc, th, tw))
    return tiles


def build_hierarchy(height, width, s, p, overlap_fraction=0.0) -> PatchHierarchy:
    """Build the s-level hierarchy of 2x2 (p=4) or 3x3 (p=9) grid splits.

    Odd side lengths split with the larger part first. Raises PatchTooSmall
    if any leaf patch would end up narrower than 2 pixels in either
    dimension.
    """
    if p not in _GRID:
        raise ValueError(f"p must be one of {sorted(_GRID)}, got {p}")
    if s < 1:
        raise ValueError("s must be at least 1")
    if not 0.0 <= overlap_fraction < 0.5:
        raise ValueError("overlap_fraction must lie in [0, 0.5)")
    grid = _GRID[p]

    rects_by_level = [[(0, 0, height, width)]]
    for _ in range(s - 1):
        nxt = []
        for rect in rects_by_level[-1]:
            nxt.extend(_tile(rect, grid, overlap_fraction, width))
        rects_by_level.append(nxt)

    for r0, c0, h, w in rects_by_level[-1]:
        if h < 2 or w < 2:
            raise PatchTooSmall(
                f"leaf patch at ({r0},{c0}) is {h}x{w}; both sides must be >= 2"
            )

    levels = []
    for li, rects in enumerate(rects_by_level):
        level = li + 1
        nodes = []
        for idx, (r0, c0, h, w) in enumerate(rects):
            children = ()
            if level < s:
                children = tuple(range(idx * p, (idx + 1) * p))
            nodes.append(
                PatchNode(
                    level=level,
                    index_in_level=idx,
                    row0=r0,
                    col0=c0,
                    height=h,
                    width=w,
                    pixel_indices=_pixel_indices(r0, c0, h, w, width),
                    children=children,
                )
            )
        levels.append(tuple(nodes))
    return PatchHierarchy(
        nodes_by_level=tuple(levels),
        s=s,
        p=p,
        overlap_fraction=overlap_fraction,
        image_height=height,
        image_width=width,
    )


def extract_patch_gallery(g: DataGallery, node: PatchNode) -> DataGallery:
    """Sub-gallery of the node's pixel rows, columns re-normalized to unit norm."""
    if g.height * g.width != g.n_pixels:
        raise GeometryMismatch("gallery geometry is inconsistent")
    if node.pixel_indices.max() >= g.n_pixels:
        raise GeometryMismatch("patch node does not fit the gallery geometry")
    sub = g.data[node.pixel_indices, :]
    return normalize_columns(DataGallery(sub, node.height, node.width, g.labels))
