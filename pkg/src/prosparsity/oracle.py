"""Set-based brute-force checker and density metrics.

Everything here recomputes what the bit-packed engine computes, but with
Python ``frozenset`` arithmetic and explicit loops.  It is deliberately
slow and deliberately independent: no packed bytes, no numpy broadcast
tricks, no code shared with :mod:`.engine` beyond the result containers.
Tests compare the two implementations row by row.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import SpikeMatrix, TileConfig, tile_ranges
from .engine import NO_PREFIX, PrefixTable
from .errors import IntegrityError, UsageError

BRUTE_FORCE_MAX_ROWS = 4096


def row_sets(matrix: SpikeMatrix) -> list[frozenset[int]]:
    """Each row as the set of its spiking column indices."""
    dense = matrix.to_dense()
    return [frozenset(int(c) for c in np.nonzero(dense[i])[0]) for i in range(matrix.rows)]


class RelationKind(enum.Enum):
    """How two rows' spike sets relate."""

    EQUAL = "equal"
    PROPER_SUBSET = "proper_subset"
    INTERSECTION = "intersection"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class PairRelation:
    """Classified relation between rows i < j.

    For PROPER_SUBSET, ``subset_row`` says which of the two is contained
    in the other; it is None otherwise.
    """

    i: int
    j: int
    kind: RelationKind
    common: frozenset[int]
    subset_row: int | None = None


def classify_pair(a: frozenset[int], b: frozenset[int], i: int, j: int) -> PairRelation:
    common = a & b
    if a == b:
        return PairRelation(i, j, RelationKind.EQUAL, common)
    if a < b:
        return PairRelation(i, j, RelationKind.PROPER_SUBSET, common, subset_row=i)
    if b < a:
        return PairRelation(i, j, RelationKind.PROPER_SUBSET, common, subset_row=j)
    if common:
        return PairRelation(i, j, RelationKind.INTERSECTION, common)
    return PairRelation(i, j, RelationKind.DISJOINT, common)


def brute_force_graph(matrix: SpikeMatrix) -> list[PairRelation]:
    """Classify every unordered row pair by exhaustive set comparison."""
    if matrix.rows > BRUTE_FORCE_MAX_ROWS:
        raise UsageError(
            f"brute force is limited to {BRUTE_FORCE_MAX_ROWS} rows, got {matrix.rows}"
        )
    sets = row_sets(matrix)
    return [
        classify_pair(sets[i], sets[j], i, j)
        for i, j in itertools.combinations(range(matrix.rows), 2)
    ]


def oracle_match_set(matrix: SpikeMatrix, query: int) -> list[int]:
    """All rows contained in the query row's set, by direct set comparison."""
    sets = row_sets(matrix)
    return [c for c in range(matrix.rows) if sets[c] <= sets[query]]


def oracle_prefix_select(matrix: SpikeMatrix) -> PrefixTable:
    """Reference prefix selection via explicit set arithmetic.

    Applies the same candidate filtering as the engine -- no self match,
    no equal set with a larger index, no empty candidate, no prefix for
    rows with fewer than two spikes -- then picks the largest candidate
    set, breaking ties toward the largest index.  Returns the shared
    :class:`~prosparsity.engine.PrefixTable` container so tests can
    compare field by field.
    """
    sets = row_sets(matrix)
    m = matrix.rows
    prefix = np.full(m, NO_PREFIX, dtype=np.int64)
    pattern_rows: list[frozenset[int]] = []
    for i in range(m):
        if len(sets[i]) < 2:
            pattern_rows.append(sets[i])
            continue
        best: int | None = None
        for j in range(m):
            if j == i or not sets[j] or not sets[j] <= sets[i]:
                continue
            if sets[j] == sets[i] and j > i:
                continue
            if best is None or (len(sets[j]), j) > (len(sets[best]), best):
                best = j
        if best is None:
            pattern_rows.append(sets[i])
        else:
            prefix[i] = best
            pattern_rows.append(sets[i] - sets[best])
    dense = np.zeros((m, matrix.cols), dtype=np.uint8)
    for i, s in enumerate(pattern_rows):
        for c in s:
            dense[i, c] = 1
    return PrefixTable(prefix=prefix, patterns=SpikeMatrix.from_dense(dense))


@dataclass(frozen=True)
class TwoPrefixResult:
    """Best pair of disjoint reusable subsets for one query row.

    ``first`` is the single-prefix choice; ``second`` (may be None) is
    the largest candidate disjoint from it; ``residual`` holds the
    spikes covered by neither.
    """

    row: int
    first: int | None
    second: int | None
    residual: frozenset[int]
    covered: int


def two_prefix_table(matrix: SpikeMatrix) -> list[TwoPrefixResult]:
    """Greedy two-level reuse for every row: after the usual prefix, take
    the largest remaining candidate disjoint from it (ties to the largest
    index).

    This quantifies how much residual work a second reuse slot could
    remove; the execution engine itself only ever uses one prefix.
    """
    sets = row_sets(matrix)
    table = oracle_prefix_select(matrix)
    results: list[TwoPrefixResult] = []
    for row in range(matrix.rows):
        p = int(table.prefix[row])
        if p == NO_PREFIX:
            results.append(TwoPrefixResult(row, None, None, sets[row], 0))
            continue
        residual = sets[row] - sets[p]
        second: int | None = None
        for j in range(matrix.rows):
            if j in (row, p) or not sets[j]:
                continue
            if not (sets[j] <= residual):
                continue
            if second is None or (len(sets[j]), j) > (len(sets[second]), second):
                second = j
        if second is not None:
            residual = residual - sets[second]
        covered = len(sets[p]) + (len(sets[second]) if second is not None else 0)
        results.append(TwoPrefixResult(row, p, second, residual, covered))
    return results


def two_prefix_analysis(matrix: SpikeMatrix, row: int) -> TwoPrefixResult:
    """Two-level reuse for a single row (see :func:`two_prefix_table`)."""
    if not 0 <= row < matrix.rows:
        raise UsageError(f"row {row} out of range for {matrix.rows} rows")
    return two_prefix_table(matrix)[row]


@dataclass(frozen=True)
class DensityReport:
    """Tile-aggregated work densities for one spike matrix.

    ``bit_density`` counts every spike; ``pro_density`` counts residual
    pattern spikes after prefix reuse.  Both are fractions of the full
    m*k bit volume, summed over all tiles of the true matrix.

    Row counters are per tile instance (the same matrix row counts once
    per k-tile): ``em_rows`` reused an identical row (empty residual),
    ``pm_rows`` reused a proper subset, and the rest took no prefix.
    """

    rows: int
    cols: int
    total_bits: int
    spike_bits: int
    pattern_bits: int
    row_instances: int
    em_rows: int
    pm_rows: int

    @property
    def bit_density(self) -> float:
        return self.spike_bits / self.total_bits

    @property
    def pro_density(self) -> float:
        return self.pattern_bits / self.total_bits

    @property
    def reduction(self) -> float:
        """Spike bits over residual bits (inf when everything was reused)."""
        if self.pattern_bits == 0:
            return float("inf") if self.spike_bits else 1.0
        return self.spike_bits / self.pattern_bits

    @property
    def prefixed_rows(self) -> int:
        return self.em_rows + self.pm_rows

    @property
    def em_fraction(self) -> float:
        return self.em_rows / self.row_instances

    @property
    def pm_fraction(self) -> float:
        return self.pm_rows / self.row_instances

    @property
    def no_prefix_fraction(self) -> float:
        return 1.0 - (self.em_rows + self.pm_rows) / self.row_instances


def density_metrics(
    matrix: SpikeMatrix,
    tile: TileConfig | None = None,
    selector: Callable[[SpikeMatrix], PrefixTable] = oracle_prefix_select,
) -> DensityReport:
    """Aggregate bit and product densities over all (m, k) tiles.

    ``selector`` defaults to the slow set-based chooser; pass
    :func:`prosparsity.engine.prune_prefixes` to measure the production
    path (the two agree -- tests enforce it).
    """
    spike_bits = 0
    pattern_bits = 0
    row_instances = 0
    em = 0
    pm = 0
    if tile is None:
        tiles: Sequence[SpikeMatrix] = [matrix]
    else:
        tiles = [
            matrix.tile(r0, r1, k0, k1)
            for r0, r1 in tile_ranges(matrix.rows, tile.m)
            for k0, k1 in tile_ranges(matrix.cols, tile.k)
        ]
    for sub in tiles:
        table = selector(sub)
        pattern_counts = table.patterns.row_popcounts()
        has = table.prefix != NO_PREFIX
        spike_bits += int(sub.row_popcounts().sum())
        pattern_bits += int(pattern_counts.sum())
        row_instances += sub.rows
        em += int(np.count_nonzero(has & (pattern_counts == 0)))
        pm += int(np.count_nonzero(has & (pattern_counts > 0)))
    return DensityReport(
        rows=matrix.rows,
        cols=matrix.cols,
        total_bits=matrix.rows * matrix.cols,
        spike_bits=spike_bits,
        pattern_bits=pattern_bits,
        row_instances=row_instances,
        em_rows=em,
        pm_rows=pm,
    )


@dataclass(frozen=True)
class ForestStats:
    """Shape of the reuse forest for one tile."""

    trees: int
    max_depth: int
    node_counts: list[int]


def forest_stats(prefix: Sequence[int]) -> ForestStats:
    """Tree count, depth, and per-tree sizes from a parent vector.

    Depths are memoized by chasing parents; a cycle raises
    :class:`~prosparsity.errors.IntegrityError`.  ``node_counts`` lists
    tree sizes in root-index order.
    """
    m = len(prefix)
    depth: dict[int, int] = {}

    def chase(node: int, trail: set[int]) -> int:
        if node in depth:
            return depth[node]
        if node in trail:
            raise IntegrityError(f"prefix chain through row {node} forms a cycle")
        trail.add(node)
        parent = prefix[node]
        d = 0 if parent == NO_PREFIX else chase(parent, trail) + 1
        depth[node] = d
        return d

    for i in range(m):
        chase(i, set())

    roots = [i for i in range(m) if prefix[i] == NO_PREFIX]

    def root_of(node: int) -> int:
        while prefix[node] != NO_PREFIX:
            node = prefix[node]
        return node

    counts = {r: 0 for r in roots}
    for i in range(m):
        counts[root_of(i)] += 1
    return ForestStats(
        trees=len(roots),
        max_depth=max(depth.values(), default=0),
        node_counts=[counts[r] for r in sorted(roots)],
    )
