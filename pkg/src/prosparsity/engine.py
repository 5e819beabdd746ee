"""Product-sparsity engine: detect, prune, order, execute.

The pipeline per spike tile:

1. **Detect** -- for every query row, find all rows whose spike set is a
   subset of the query's.  This mirrors a TCAM search in which the query
   row's zero bits are wildcards: a stored row matches when it has no
   spike where the query has none.
2. **Prune** -- reduce each row's candidate set to at most one *prefix*
   row whose partial sum will be reused.  The leftover spikes (row XOR
   prefix) form the row's *residual pattern*.
3. **Order** -- sort rows by spike count (stable) so every prefix is
   executed before any row that reuses it.
4. **Execute** -- walk rows in order, accumulating each row's residual
   pattern on top of its prefix row's finished result.

Outputs are bit-exact against the dense reference in integer mode; the
only thing product sparsity changes is how much work gets skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SpikeMatrix, accumulator_dtype
from .errors import IntegrityError, UsageError

NO_PREFIX = -1


def detect_subsets(matrix: SpikeMatrix) -> np.ndarray:
    """All-pairs subset relation as an (m, m) boolean array.

    ``result[q, c]`` is True when row c's spike set is a subset of row
    q's (candidate c matched query q).  The diagonal is True: every row
    matches itself.  Vectorized as ``candidate AND NOT query == 0`` over
    the packed bytes; padding bits are zero on both sides.
    """
    packed = matrix.packed
    # (query, candidate, byte): candidate bits not covered by the query.
    stray = packed[None, :, :] & ~packed[:, None, :]
    return ~np.any(stray, axis=2)


def match_set(matrix: SpikeMatrix, query: int) -> list[int]:
    """Indices of all rows whose spike set is contained in the query row's."""
    if not 0 <= query < matrix.rows:
        raise UsageError(f"row {query} out of range for {matrix.rows} rows")
    return [int(c) for c in np.nonzero(detect_subsets(matrix)[query])[0]]


@dataclass(frozen=True)
class PrefixEntry:
    """Pruning outcome for one row."""

    row: int
    prefix: int | None
    pattern_popcount: int


@dataclass(frozen=True, eq=False)
class PrefixTable:
    """Per-row prefix assignment plus residual patterns for one tile.

    ``prefix[i]`` is the reused row index, or :data:`NO_PREFIX` when row
    i accumulates from scratch.  ``patterns`` holds the residual spike
    pattern of every row (equal to the row itself when it has no prefix).
    """

    prefix: np.ndarray
    patterns: SpikeMatrix

    def __post_init__(self) -> None:
        m = self.patterns.rows
        if self.prefix.shape != (m,):
            raise UsageError(f"prefix vector shape {self.prefix.shape} != ({m},)")
        bad = (self.prefix < NO_PREFIX) | (self.prefix >= m) | (self.prefix == np.arange(m))
        if np.any(bad):
            raise UsageError("prefix entries must be NO_PREFIX or another row's index")
        self.prefix.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.patterns.rows

    def entry(self, row: int) -> PrefixEntry:
        if not 0 <= row < self.rows:
            raise UsageError(f"row {row} out of range for {self.rows} rows")
        p = int(self.prefix[row])
        from .core import popcount_row

        return PrefixEntry(
            row=row,
            prefix=None if p == NO_PREFIX else p,
            pattern_popcount=popcount_row(self.patterns, row),
        )


def prune_prefixes(matrix: SpikeMatrix, subsets: np.ndarray | None = None) -> PrefixTable:
    """Pick at most one prefix per row and derive residual patterns.

    Candidate filtering, applied to each query row i over the raw match
    set:

    * drop the self match;
    * drop equal-match rows with a larger index (rows j with the same
      spike count as i and j > i keep row i as *their* candidate, never
      the other way round, which breaks reuse cycles among identical rows);
    * drop empty candidates (no spikes means nothing to reuse);
    * rows with fewer than two spikes take no prefix (reusing a
      single-spike partial sum saves nothing).

    Among survivors the candidate with the most spikes wins; ties go to
    the largest row index.  The residual pattern is row XOR prefix, which
    equals set difference because the prefix is a subset.
    """
    if subsets is None:
        subsets = detect_subsets(matrix)
    m = matrix.rows
    if subsets.shape != (m, m):
        raise UsageError(f"subset matrix shape {subsets.shape} != ({m}, {m})")
    counts = matrix.row_popcounts()

    cand = subsets.copy()
    np.fill_diagonal(cand, False)
    same_count = counts[None, :] == counts[:, None]
    larger_index = np.arange(m)[None, :] > np.arange(m)[:, None]
    cand &= ~(same_count & larger_index)
    cand &= counts[None, :] > 0

    # Highest spike count wins, ties to the largest index: encode both in
    # one score so a single argmax resolves the choice.
    score = np.where(cand, counts[None, :] * m + np.arange(m)[None, :], -1)
    best = score.argmax(axis=1)
    prefix = np.where((score.max(axis=1) >= 0) & (counts >= 2), best, NO_PREFIX)

    has = prefix != NO_PREFIX
    pattern_bytes = matrix.packed.copy()
    pattern_bytes[has] ^= matrix.packed[prefix[has]]
    patterns = SpikeMatrix(m, matrix.cols, pattern_bytes)
    return PrefixTable(prefix=prefix.astype(np.int64), patterns=patterns)


@dataclass(frozen=True, eq=False)
class ExecutionOrder:
    """A permutation of tile rows; execution walks ``order`` left to right."""

    order: np.ndarray

    def __post_init__(self) -> None:
        m = self.order.shape[0]
        if not np.array_equal(np.sort(self.order), np.arange(m)):
            raise UsageError("execution order must be a permutation of row indices")
        self.order.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.order.shape[0]

    def positions(self) -> np.ndarray:
        """Inverse permutation: ``positions()[row]`` is the execution slot."""
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(self.rows)
        return pos


def order_rows(matrix: SpikeMatrix) -> ExecutionOrder:
    """Stable sort of rows by ascending spike count.

    Stability makes equal-count rows keep index order, which together
    with the pruning rules guarantees every prefix lands before the rows
    that reuse it: a proper-subset prefix has strictly fewer spikes, and
    an equal-count prefix always has a smaller index.
    """
    counts = matrix.row_popcounts()
    return ExecutionOrder(np.argsort(counts, kind="stable"))


@dataclass(frozen=True, eq=False)
class ProSparsityForest:
    """Reuse structure of a tile: ``parents[i]`` is row i's prefix or NO_PREFIX.

    Rows without a prefix are roots; following parents from any row must
    reach a root (no cycles), which :meth:`validate` enforces.
    """

    parents: np.ndarray

    def __post_init__(self) -> None:
        self.parents.setflags(write=False)
        self.validate()

    @property
    def rows(self) -> int:
        return self.parents.shape[0]

    @property
    def roots(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.parents == NO_PREFIX)[0]]

    def depth(self, row: int) -> int:
        """Reuse-chain length from ``row`` up to its root (root depth = 0)."""
        d = 0
        node = row
        while self.parents[node] != NO_PREFIX:
            node = int(self.parents[node])
            d += 1
        return d

    def validate(self) -> None:
        m = self.rows
        state = np.zeros(m, dtype=np.int8)  # 0 unseen, 1 in progress, 2 done
        for start in range(m):
            path = []
            node = start
            while state[node] == 0:
                state[node] = 1
                path.append(node)
                parent = int(self.parents[node])
                if parent == NO_PREFIX:
                    break
                node = parent
            if state[node] == 1 and int(self.parents[node]) != NO_PREFIX:
                raise IntegrityError(f"prefix chain starting at row {start} forms a cycle")
            for n in path:
                state[n] = 2


@dataclass(frozen=True)
class TileMeta:
    """Everything the executor needs for one spike tile."""

    table: PrefixTable
    order: ExecutionOrder
    forest: ProSparsityForest
    pattern_popcounts: np.ndarray


def build_meta(matrix: SpikeMatrix) -> TileMeta:
    """Run detect -> prune -> order for one tile and bundle the results.

    Verifies the prefix-before-suffix guarantee explicitly; a violation
    is an internal bug, not a caller error.
    """
    table = prune_prefixes(matrix)
    order = order_rows(matrix)
    forest = ProSparsityForest(parents=table.prefix.copy())
    pos = order.positions()
    has = table.prefix != NO_PREFIX
    if np.any(pos[table.prefix[has]] >= pos[has]):
        raise IntegrityError("execution order places a prefix after its dependent row")
    return TileMeta(
        table=table,
        order=order,
        forest=forest,
        pattern_popcounts=table.patterns.row_popcounts(),
    )


@dataclass(frozen=True)
class TileExecStats:
    """Work counters for one tile execution (one n-tile pass)."""

    rows: int
    accumulations: int
    reused_rows: int


def prosparse_execute_tile(
    spikes: SpikeMatrix, weights: np.ndarray, meta: TileMeta
) -> tuple[np.ndarray, TileExecStats]:
    """Execute one spike tile against one weight tile with prefix reuse.

    Each row accumulates only its residual pattern (the delta on top of
    its prefix), then adds the prefix row's already-finished result.
    Rows are visited in ``meta.order``; an internal check trips if a
    prefix has not been written when a dependent row needs it.
    """
    if spikes.rows != meta.table.rows:
        raise UsageError(f"meta built for {meta.table.rows} rows, tile has {spikes.rows}")
    if weights.shape[0] != spikes.cols:
        raise UsageError(
            f"weight tile has {weights.shape[0]} rows, spike tile has {spikes.cols} columns"
        )
    acc = accumulator_dtype(weights.dtype)
    weights = weights.astype(acc, copy=False)
    deltas = meta.table.patterns.to_dense().astype(acc) @ weights
    out = np.zeros_like(deltas)
    written = np.zeros(spikes.rows, dtype=bool)
    prefix = meta.table.prefix
    reused = 0
    for row in meta.order.order:
        row = int(row)
        p = int(prefix[row])
        if p == NO_PREFIX:
            out[row] = deltas[row]
        else:
            if not written[p]:
                raise IntegrityError(f"row {row} reuses row {p} before it was computed")
            out[row] = deltas[row] + out[p]
            reused += 1
        written[row] = True
    return out, TileExecStats(
        rows=spikes.rows,
        accumulations=int(meta.pattern_popcounts.sum()),
        reused_rows=reused,
    )


@dataclass(frozen=True)
class RunStatistics:
    """Aggregate work counters for a whole prefix-reuse GeMM."""

    tiles: int
    accumulations: int
    reused_rows: int
    bitsparse_accumulations: int

    @property
    def accumulation_reduction(self) -> float:
        """Bit-sparse accumulations divided by prefix-reuse accumulations."""
        if self.accumulations == 0:
            return float("inf") if self.bitsparse_accumulations else 1.0
        return self.bitsparse_accumulations / self.accumulations


def prosparse_gemm(problem, meta_hook=None):
    """Full tiled GeMM with prefix reuse.

    Meta is built once per (row-tile, k-tile) spike tile and reused for
    every n-tile; each (row-tile, k-tile, n-tile) execution produces a
    fresh contribution that is added into the output, so partial sums
    are only ever reused *within* a k-tile, never across k-tiles.

    ``meta_hook``, when given, may replace the meta for a tile (used by
    tests to inject faults); it receives ``(row_tile, k_tile, meta)``.

    Returns ``(OutputMatrix, RunStatistics)``.
    """
    from .core import GemmProblem, OutputMatrix, iterate_tiles

    if not isinstance(problem, GemmProblem):
        raise UsageError("prosparse_gemm expects a GemmProblem")
    acc = accumulator_dtype(problem.weights.data.dtype)
    out = np.zeros((problem.spikes.rows, problem.weights.cols), dtype=acc)
    metas: dict[tuple[int, int], TileMeta] = {}
    tiles = 0
    accumulations = 0
    reused = 0
    bitsparse = 0
    for view in iterate_tiles(problem):
        key = (view.row_tile, view.k_tile)
        if key not in metas:
            meta = build_meta(view.spikes)
            if meta_hook is not None:
                meta = meta_hook(view.row_tile, view.k_tile, meta)
            metas[key] = meta
        meta = metas[key]
        contrib, stats = prosparse_execute_tile(view.spikes, view.weights, meta)
        out[view.row_start : view.row_stop, view.n_start : view.n_stop] += contrib
        tiles += 1
        accumulations += stats.accumulations
        reused += stats.reused_rows
        bitsparse += int(view.spikes.row_popcounts().sum())
    return (
        OutputMatrix.from_array(out),
        RunStatistics(
            tiles=tiles,
            accumulations=accumulations,
            reused_rows=reused,
            bitsparse_accumulations=bitsparse,
        ),
    )
