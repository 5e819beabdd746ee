"""Core data model for spiking GeMM.

A spiking GeMM multiplies a binary spike matrix (M x K) with a weight
matrix (K x N).  Because spikes are 0/1, every inner product degenerates
into a selective accumulation of weight rows: output row i is the sum of
the weight rows picked out by the 1-bits of spike row i.

This module provides the bit-packed :class:`SpikeMatrix`, the weight and
output containers, tiling, and two reference executions:

* :func:`dense_gemm` -- the ground-truth matrix product, against which
  every other execution mode is checked bit-exactly (integer mode).
* :func:`bitsparse_gemm` -- per-row accumulation that skips zero bits, as
  a baseline accelerator would.

Bit convention: bit 0 of a row is column 0, and the leftmost character of
a row string such as ``"1011"`` is column 0.  Packed storage is one byte
per 8 columns, least-significant-bit first, padding bits always zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import UsageError

# int32 accumulators never overflow for K <= 2^23 rows of int8 weights.
MAX_INT_ACCUM_DEPTH = 1 << 23

DEFAULT_TILE_M = 256
DEFAULT_TILE_N = 128
DEFAULT_TILE_K = 16


def packed_width(cols: int) -> int:
    """Bytes needed to store ``cols`` bits."""
    return (cols + 7) // 8


def _tail_mask(cols: int) -> int:
    """Mask of valid bits in the last byte of a packed row (0xFF when full)."""
    rem = cols % 8
    return 0xFF if rem == 0 else (1 << rem) - 1


@dataclass(frozen=True, eq=False)
class SpikeMatrix:
    """Bit-packed binary matrix, one bit per spike.

    ``packed`` has shape ``(rows, ceil(cols / 8))`` and dtype uint8; bit b
    of byte t in a row holds column ``8 * t + b``.  Instances are
    immutable: the packed buffer is marked read-only on construction.
    """

    rows: int
    cols: int
    packed: np.ndarray

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise UsageError(f"spike matrix must be at least 1x1, got {self.rows}x{self.cols}")
        expect = (self.rows, packed_width(self.cols))
        if self.packed.dtype != np.uint8 or self.packed.shape != expect:
            raise UsageError(
                f"packed buffer must be uint8 with shape {expect}, "
                f"got {self.packed.dtype} {self.packed.shape}"
            )
        if np.any(self.packed[:, -1] & ~np.uint8(_tail_mask(self.cols))):
            raise UsageError("padding bits beyond the last column must be zero")
        self.packed.setflags(write=False)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SpikeMatrix":
        """Pack a 2-D array of 0/1 values (any integer or bool dtype)."""
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise UsageError(f"expected a 2-D array, got ndim={dense.ndim}")
        if dense.dtype != np.bool_ and not np.all((dense == 0) | (dense == 1)):
            raise UsageError("spike values must be 0 or 1")
        packed = np.packbits(dense.astype(np.uint8), axis=1, bitorder="little")
        return cls(dense.shape[0], dense.shape[1], packed)

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "SpikeMatrix":
        """Build from row strings like ``"1011"`` (leftmost char = column 0)."""
        if not rows:
            raise UsageError("at least one row is required")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise UsageError("all row strings must have equal length")
        if any(set(r) - {"0", "1"} for r in rows):
            raise UsageError("row strings may contain only '0' and '1'")
        dense = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)
        return cls.from_dense(dense)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SpikeMatrix":
        return cls(rows, cols, np.zeros((rows, packed_width(cols)), dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        """Unpack to a ``(rows, cols)`` uint8 array of 0/1 values."""
        return np.unpackbits(self.packed, axis=1, count=self.cols, bitorder="little")

    def row_popcounts(self) -> np.ndarray:
        """Number of spikes in each row, as an int64 vector."""
        return np.bitwise_count(self.packed).sum(axis=1, dtype=np.int64)

    def row_string(self, row: int) -> str:
        return "".join("1" if b else "0" for b in self.to_dense()[row])

    def tile(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> "SpikeMatrix":
        """Extract a sub-matrix; repacks when the column slice is unaligned."""
        if not (0 <= row_start < row_stop <= self.rows and 0 <= col_start < col_stop <= self.cols):
            raise UsageError(
                f"tile [{row_start}:{row_stop}, {col_start}:{col_stop}] outside "
                f"{self.rows}x{self.cols} matrix"
            )
        width = col_stop - col_start
        if col_start % 8 == 0:
            b0 = col_start // 8
            nb = packed_width(width)
            sub = self.packed[row_start:row_stop, b0 : b0 + nb].copy()
            sub[:, -1] &= np.uint8(_tail_mask(width))
            return SpikeMatrix(row_stop - row_start, width, sub)
        dense = self.to_dense()[row_start:row_stop, col_start:col_stop]
        return SpikeMatrix.from_dense(dense)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpikeMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.packed, other.packed)
        )

    def __repr__(self) -> str:
        return f"SpikeMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Weight operand: signed 8-bit integers (default) or floating values."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.shape != (self.rows, self.cols):
            raise UsageError(
                f"weight data shape {self.data.shape} does not match {self.rows}x{self.cols}"
            )
        if self.data.dtype not in (np.int8, np.float32, np.float64) and self.data.dtype != object:
            raise UsageError(f"unsupported weight dtype {self.data.dtype}")
        self.data.setflags(write=False)

    @classmethod
    def from_array(cls, data: np.ndarray) -> "WeightMatrix":
        data = np.asarray(data)
        if data.ndim != 2:
            raise UsageError(f"expected a 2-D weight array, got ndim={data.ndim}")
        return cls(data.shape[0], data.shape[1], data)

    @property
    def is_integer(self) -> bool:
        return self.data.dtype == np.int8

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.data.dtype == other.data.dtype and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class OutputMatrix:
    """Accumulated result: int32 in integer mode, else the float dtype in use."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.shape != (self.rows, self.cols):
            raise UsageError(
                f"output data shape {self.data.shape} does not match {self.rows}x{self.cols}"
            )

    @classmethod
    def from_array(cls, data: np.ndarray) -> "OutputMatrix":
        return cls(data.shape[0], data.shape[1], data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutputMatrix):
            return NotImplemented
        return np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class TileConfig:
    """Working block sizes: m spike rows, n output columns, k spike columns."""

    m: int = DEFAULT_TILE_M
    n: int = DEFAULT_TILE_N
    k: int = DEFAULT_TILE_K

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1 or self.k < 1:
            raise UsageError(f"tile dimensions must be >= 1, got {self}")


@dataclass(frozen=True)
class GemmProblem:
    """A spiking GeMM instance: spikes (M x K), weights (K x N), tile sizes."""

    spikes: SpikeMatrix
    weights: WeightMatrix
    tile: TileConfig = field(default_factory=TileConfig)

    def __post_init__(self) -> None:
        if self.spikes.cols != self.weights.rows:
            raise UsageError(
                f"spike columns ({self.spikes.cols}) must equal weight rows ({self.weights.rows})"
            )


def accumulator_dtype(weight_dtype: np.dtype) -> np.dtype:
    """Accumulator dtype for a weight dtype (int8 -> int32, floats unchanged)."""
    if weight_dtype == np.int8:
        return np.dtype(np.int32)
    if weight_dtype in (np.float32, np.float64) or weight_dtype == object:
        return np.dtype(weight_dtype)
    raise UsageError(f"unsupported weight dtype {weight_dtype}")


def _check_accum_depth(problem: GemmProblem) -> None:
    if problem.weights.is_integer and problem.weights.rows > MAX_INT_ACCUM_DEPTH:
        raise UsageError(
            f"integer mode supports at most K={MAX_INT_ACCUM_DEPTH} without overflow, "
            f"got K={problem.weights.rows}"
        )


def popcount_row(matrix: SpikeMatrix, row: int) -> int:
    """Number of spikes in one row (|S_row|)."""
    if not 0 <= row < matrix.rows:
        raise UsageError(f"row {row} out of range for {matrix.rows} rows")
    return int(np.bitwise_count(matrix.packed[row]).sum())


def subset_test(matrix: SpikeMatrix, candidate: int, query: int) -> bool:
    """True iff the candidate row's spike set is contained in the query row's.

    Computed as ``rows[candidate] AND NOT rows[query] == 0``; padding bits
    are zero in both operands so no masking is needed.
    """
    for idx in (candidate, query):
        if not 0 <= idx < matrix.rows:
            raise UsageError(f"row {idx} out of range for {matrix.rows} rows")
    return not np.any(matrix.packed[candidate] & ~matrix.packed[query])


def dense_gemm(problem: GemmProblem) -> OutputMatrix:
    """Reference spiking GeMM: O[i, j] = sum_t M[i, t] * W[t, j].

    Ground truth for every other execution mode; integer mode is exact.
    """
    _check_accum_depth(problem)
    acc = accumulator_dtype(problem.weights.data.dtype)
    dense = problem.spikes.to_dense().astype(acc, copy=False)
    out = dense @ problem.weights.data.astype(acc, copy=False)
    return OutputMatrix.from_array(out)


def bitsparse_gemm(problem: GemmProblem) -> tuple[OutputMatrix, int]:
    """Row-wise accumulation that skips zero bits (bit-sparsity baseline).

    Returns the output plus the number of weight-row accumulations that a
    tiled execution would perform: sum of row popcounts times the number
    of n-tiles (the same spike row is consumed once per n-tile).
    """
    _check_accum_depth(problem)
    acc = accumulator_dtype(problem.weights.data.dtype)
    weights = problem.weights.data.astype(acc, copy=False)
    dense = problem.spikes.to_dense()
    out = np.zeros((problem.spikes.rows, problem.weights.cols), dtype=acc)
    for i in range(problem.spikes.rows):
        (idx,) = np.nonzero(dense[i])
        if idx.size:
            out[i] = weights[idx].sum(axis=0)
    n_tiles = -(-problem.weights.cols // problem.tile.n)
    accumulations = int(problem.spikes.row_popcounts().sum()) * n_tiles
    return OutputMatrix.from_array(out), accumulations


@dataclass(frozen=True)
class TileView:
    """One tile coordinate of a GemmProblem, with materialized operand views."""

    row_tile: int
    k_tile: int
    n_tile: int
    row_start: int
    row_stop: int
    k_start: int
    k_stop: int
    n_start: int
    n_stop: int
    spikes: SpikeMatrix
    weights: np.ndarray


def tile_ranges(total: int, step: int) -> list[tuple[int, int]]:
    """Half-open ranges covering [0, total) in blocks of ``step``."""
    return [(s, min(total, s + step)) for s in range(0, total, step)]


def iterate_tiles(problem: GemmProblem) -> Iterator[TileView]:
    """Yield every tile of the problem in the fixed execution order.

    Order is row-tile outer, k-tile middle, n-tile inner, so meta built
    for a (row-tile, k-tile) spike tile can be reused across consecutive
    n-tiles.  Edge tiles carry their true (smaller) dimensions; detection
    on a truncated tile is identical to detection on a zero-padded one
    because all-zero rows are never prefix candidates.
    """
    spikes, weights, tile = problem.spikes, problem.weights, problem.tile
    for rt, (r0, r1) in enumerate(tile_ranges(spikes.rows, tile.m)):
        for kt, (k0, k1) in enumerate(tile_ranges(spikes.cols, tile.k)):
            spike_tile = spikes.tile(r0, r1, k0, k1)
            for nt, (n0, n1) in enumerate(tile_ranges(weights.cols, tile.n)):
                yield TileView(
                    row_tile=rt,
                    k_tile=kt,
                    n_tile=nt,
                    row_start=r0,
                    row_stop=r1,
                    k_start=k0,
                    k_stop=k1,
                    n_start=n0,
                    n_stop=n1,
                    spikes=spike_tile,
                    weights=weights.data[k0:k1, n0:n1],
                )
