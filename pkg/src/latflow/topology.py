"""Procedural adjacency-matrix generation for lattices and random digraphs.

The 1D and 2D lattice generators walk every cell and every stencil offset,
writing the stencil weight into the adjacency row of the cell.  On a wrapped
grid the offset indices are reduced modulo the grid size, so the first and
last cells become neighbors; on an unwrapped grid the out-of-range offsets
are simply skipped (no padding, no ghost cells).

Cells of a 2D grid are flattened row-major: cell (r, c) has index
r * width + c, and a stencil offset (dr, dc) relative to the center targets
flat index ((r + dr) mod height) * width + ((c + dc) mod width).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentTooSmall, DegreeTooLarge, StencilWiderThanGrid
from .sparse import SparseMatrix


@dataclass(frozen=True)
class GridSpec:
    """Grid dimensions and boundary behavior (height 1 for 1D grids)."""

    width: int
    height: int = 1
    wrapped: bool = True

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ArgumentTooSmall(f"grid {self.width}x{self.height} is empty")

    @property
    def n_cells(self):
        return self.width * self.height


@dataclass(frozen=True)
class NeighborhoodSpec1D:
    """Stencil weights plus the 0-based position of the central cell."""

    weights: tuple
    center_index: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not 0 <= self.center_index < len(self.weights):
            raise ArgumentTooSmall(
                f"center {self.center_index} outside stencil of {len(self.weights)}"
            )
        if not any(w != 0.0 for w in self.weights):
            raise ArgumentTooSmall("stencil has no nonzero weight")


@dataclass(frozen=True)
class NeighborhoodSpec2D:
    """2D stencil weights plus the (row, col) index of the central cell.

    Stencil row 0 lies above the cell and column 0 to its left, matching how
    a neighborhood is drawn on the grid.
    """

    weights: np.ndarray = field(repr=False)
    center: tuple = (0, 0)

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "center", (int(self.center[0]), int(self.center[1])))
        r, c = self.center
        if not (0 <= r < w.shape[0] and 0 <= c < w.shape[1]):
            raise ArgumentTooSmall(f"center {self.center} outside stencil {w.shape}")
        if not np.any(w != 0.0):
            raise ArgumentTooSmall("stencil has no nonzero weight")


def pattern_weights(n_states, k_neighbors):
    """Positional weights [n^0, n^1, ..., n^(k-1)], least significant first.

    Arranged into a stencil these make every neighborhood configuration
    produce a distinct integer under the matvec, so a lookup table can
    recover the full pattern from the mixed value.
    """
    if n_states < 2:
        raise ArgumentTooSmall(f"need at least 2 states, got {n_states}")
    if k_neighbors < 1:
        raise ArgumentTooSmall(f"need at least 1 neighbor, got {k_neighbors}")
    return [float(n_states) ** i for i in range(k_neighbors)]


def generate_ca_1d(grid, nb):
    """Adjacency matrix of a 1D lattice with the given stencil.

    Row i receives weight ``nb.weights[j + center]`` at column
    (i + j) mod width for each in-range offset j.
    """
    if grid.height != 1:
        raise ArgumentTooSmall("1D generation requires height 1")
    width = grid.width
    weights = nb.weights
    center = nb.center_index
    if len(weights) > width:
        raise StencilWiderThanGrid(
            f"stencil of {len(weights)} on a width-{width} grid"
        )
    triplets = []
    for i in range(width):
        for j in range(-center, len(weights) - center):
            w = weights[j + center]
            if w == 0.0:
                continue
            if grid.wrapped or 0 <= i + j < width:
                triplets.append((i, (i + j) % width, w))
    return SparseMatrix.from_triplets(width, width, triplets)


def generate_ca_2d(grid, nb):
    """Adjacency matrix of a 2D lattice with the given stencil."""
    height, width = grid.height, grid.width
    sh, sw = nb.weights.shape
    if sh > height or sw > width:
        raise StencilWiderThanGrid(
            f"stencil {sh}x{sw} on a {height}x{width} grid"
        )
    cr, cc = nb.center
    n = grid.n_cells
    triplets = []
    for i in range(n):
        r, c = divmod(i, width)
        for sr in range(sh):
            for sc in range(sw):
                w = nb.weights[sr, sc]
                if w == 0.0:
                    continue
                dr, dc = sr - cr, sc - cc
                if grid.wrapped:
                    col = ((r + dr) % height) * width + (c + dc) % width
                elif 0 <= r + dr < height and 0 <= c + dc < width:
                    col = (r + dr) * width + (c + dc)
                else:
                    continue
                triplets.append((i, col, float(w)))
    return SparseMatrix.from_triplets(n, n, triplets)


@dataclass(frozen=True)
class PositionalBase:
    """Weight scheme: input m of a node gets weight n_states^m."""

    n_states: int = 2


@dataclass(frozen=True)
class UniformWeights:
    """Weight scheme: weights drawn uniformly from [low, high)."""

    low: float
    high: float


def generate_random_digraph(n_nodes, in_degree, weight_scheme, allow_self, seed):
    """Random digraph where every node receives exactly ``in_degree`` inputs.

    Inputs are distinct, drawn uniformly by a PCG64 generator seeded with
    ``seed``; the whole construction is a pure function of its arguments.
    Returns (matrix, input_lists) where input_lists[i] is node i's inputs in
    draw order, the order the positional weights follow.
    """
    limit = n_nodes if allow_self else n_nodes - 1
    if in_degree > limit:
        raise DegreeTooLarge(
            f"in-degree {in_degree} with {n_nodes} nodes (allow_self={allow_self})"
        )
    rng = np.random.default_rng(seed)
    if isinstance(weight_scheme, PositionalBase):
        row_weights = pattern_weights(weight_scheme.n_states, max(in_degree, 1))
    triplets = []
    input_lists = []
    for i in range(n_nodes):
        if in_degree == 0:
            input_lists.append([])
            continue
        picks = rng.choice(limit, size=in_degree, replace=False)
        if not allow_self:
            picks = np.where(picks >= i, picks + 1, picks)
        inputs = [int(p) for p in picks]
        input_lists.append(inputs)
        if isinstance(weight_scheme, PositionalBase):
            ws = row_weights[:in_degree]
        else:
            ws = rng.uniform(weight_scheme.low, weight_scheme.high, size=in_degree)
        for src, w in zip(inputs, ws):
            triplets.append((i, src, float(w)))
    return SparseMatrix.from_triplets(n_nodes, n_nodes, triplets), input_lists
