"""Cycle-level model of the processing unit.

Models a two-phase pipeline per spike tile:

* **Preprocessing phase** -- the detect/prune/sort hardware streams the
  tile's m rows through a 5-stage pipeline, finishing after
  ``m + stages - 1`` cycles.
* **Compute phase** -- the accumulate pipeline retires one weight-row
  accumulation per cycle; a row with an empty residual pattern still
  occupies one cycle (its result is a pure copy of its prefix).  A
  4-stage fill is paid once per pass.

Consecutive tiles overlap: while tile t computes, tile t+1 preprocesses.
Three execution modes share the compute-phase model and differ only in
how many accumulations each row needs: dense (all k), bit-sparse (one
per spike), and product-sparse (one per residual-pattern spike).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import GemmProblem, SpikeMatrix, TileConfig, tile_ranges
from .engine import build_meta
from .errors import UsageError

PROSPARSITY_STAGES = 5
PROCESSOR_STAGES = 4
PE_WIDTH = 128


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline depths and processing-element width."""

    prosparsity_stages: int = PROSPARSITY_STAGES
    processor_stages: int = PROCESSOR_STAGES
    pe_width: int = PE_WIDTH

    def __post_init__(self) -> None:
        if self.prosparsity_stages < 1 or self.processor_stages < 1 or self.pe_width < 1:
            raise UsageError(f"pipeline parameters must be >= 1, got {self}")


def prosparsity_phase_cycles(m: int, config: PipelineConfig = PipelineConfig()) -> int:
    """Cycles to detect, prune, and sort an m-row tile: m + stages - 1."""
    if m < 1:
        raise UsageError(f"tile must have at least one row, got m={m}")
    return m + config.prosparsity_stages - 1


def row_compute_cycles(popcounts: np.ndarray) -> np.ndarray:
    """Per-row compute cycles: one per accumulation, minimum one per row."""
    return np.maximum(1, np.asarray(popcounts))


def compute_phase_cycles(popcounts: np.ndarray, config: PipelineConfig = PipelineConfig()) -> int:
    """One pass over a tile: sum of per-row cycles plus pipeline fill."""
    return int(row_compute_cycles(popcounts).sum()) + config.processor_stages


def dense_compute_cycles(m: int, k: int, config: PipelineConfig = PipelineConfig()) -> int:
    """Dense baseline pass: every row accumulates all k weight rows."""
    return m * k + config.processor_stages


def overlap_schedule(phases: Sequence[int], computes: Sequence[int]) -> int:
    """Total cycles for a tile sequence with phase/compute overlap.

    Tile t+1's preprocessing runs under tile t's compute, so the total is
    ``P[0] + sum(max(C[t], P[t+1])) + C[-1]``.
    """
    if len(phases) != len(computes):
        raise UsageError(f"{len(phases)} phases vs {len(computes)} computes")
    if not phases:
        return 0
    total = phases[0]
    for t in range(len(phases) - 1):
        total += max(computes[t], phases[t + 1])
    return total + computes[-1]


@dataclass(frozen=True)
class TileCycles:
    """Cycle breakdown for one spike tile (all its n-passes folded in)."""

    row_tile: int
    k_tile: int
    m: int
    k: int
    n_passes: int
    prosparsity_phase: int
    prosparse_compute: int
    bitsparse_compute: int
    dense_compute: int


@dataclass(frozen=True)
class RunReport:
    """Whole-run cycle and work accounting.

    ``*_compute`` totals cover compute phases only, which is the
    apples-to-apples comparison (the baselines have no preprocessing
    phase).  ``prosparse_total`` additionally schedules the preprocessing
    phases with overlap; for a single tile nothing hides the first phase,
    so this can exceed ``bitsparse_compute``.
    """

    tiles: list[TileCycles]
    prosparse_compute: int
    bitsparse_compute: int
    dense_compute: int
    prosparse_total: int
    prosparse_accumulations: int
    bitsparse_accumulations: int
    dense_accumulations: int
    spike_traffic_bytes: int
    prosparse_weight_bytes: int
    bitsparse_weight_bytes: int
    dense_weight_bytes: int

    def __post_init__(self) -> None:
        if not self.prosparse_compute <= self.bitsparse_compute <= self.dense_compute:
            raise UsageError(
                "compute totals must be ordered prosparse <= bitsparse <= dense, got "
                f"{self.prosparse_compute}/{self.bitsparse_compute}/{self.dense_compute}"
            )

    @property
    def speedup_vs_dense(self) -> float:
        """Compute-phase cycles: dense over product-sparse."""
        return self.dense_compute / self.prosparse_compute

    @property
    def speedup_vs_bitsparse(self) -> float:
        return self.bitsparse_compute / self.prosparse_compute

    @property
    def full_speedup_vs_dense(self) -> float:
        """Dense compute over the overlapped product-sparse total."""
        return self.dense_compute / self.prosparse_total

    @property
    def full_speedup_vs_bitsparse(self) -> float:
        return self.bitsparse_compute / self.prosparse_total


def simulate(
    spikes: SpikeMatrix,
    tile: TileConfig = TileConfig(),
    n_total: int = PE_WIDTH,
    config: PipelineConfig = PipelineConfig(),
) -> RunReport:
    """Model a full run over ``spikes`` against an N-column weight matrix.

    Weight values never matter for timing, only N does.  Each (row-tile,
    k-tile) spike tile is preprocessed once; its compute phase repeats
    for every n-tile of the weights.  Tiles enter the overlap schedule
    in execution order.
    """
    if n_total < 1:
        raise UsageError(f"weight matrix must have at least one column, got N={n_total}")
    n_ranges = tile_ranges(n_total, tile.n)
    n_passes = len(n_ranges)
    n_bytes_per_row = sum(n1 - n0 for n0, n1 in n_ranges)

    tiles: list[TileCycles] = []
    phases: list[int] = []
    computes: list[int] = []
    accum = {"pro": 0, "bit": 0, "dense": 0}
    spike_bytes = 0
    for rt, (r0, r1) in enumerate(tile_ranges(spikes.rows, tile.m)):
        for kt, (k0, k1) in enumerate(tile_ranges(spikes.cols, tile.k)):
            sub = spikes.tile(r0, r1, k0, k1)
            meta = build_meta(sub)
            phase = prosparsity_phase_cycles(sub.rows, config)
            pro_pass = compute_phase_cycles(meta.pattern_popcounts, config)
            bit_pass = compute_phase_cycles(sub.row_popcounts(), config)
            dense_pass = dense_compute_cycles(sub.rows, sub.cols, config)
            tiles.append(
                TileCycles(
                    row_tile=rt,
                    k_tile=kt,
                    m=sub.rows,
                    k=sub.cols,
                    n_passes=n_passes,
                    prosparsity_phase=phase,
                    prosparse_compute=pro_pass * n_passes,
                    bitsparse_compute=bit_pass * n_passes,
                    dense_compute=dense_pass * n_passes,
                )
            )
            phases.append(phase)
            computes.append(pro_pass * n_passes)
            accum["pro"] += int(meta.pattern_popcounts.sum()) * n_passes
            accum["bit"] += int(sub.row_popcounts().sum()) * n_passes
            accum["dense"] += sub.rows * sub.cols * n_passes
            spike_bytes += sub.packed.nbytes
    return RunReport(
        tiles=tiles,
        prosparse_compute=sum(t.prosparse_compute for t in tiles),
        bitsparse_compute=sum(t.bitsparse_compute for t in tiles),
        dense_compute=sum(t.dense_compute for t in tiles),
        prosparse_total=overlap_schedule(phases, computes),
        prosparse_accumulations=accum["pro"],
        bitsparse_accumulations=accum["bit"],
        dense_accumulations=accum["dense"],
        spike_traffic_bytes=spike_bytes,
        prosparse_weight_bytes=accum["pro"] // n_passes * n_bytes_per_row
        if n_passes
        else 0,
        bitsparse_weight_bytes=accum["bit"] // n_passes * n_bytes_per_row if n_passes else 0,
        dense_weight_bytes=accum["dense"] // n_passes * n_bytes_per_row if n_passes else 0,
    )


def baseline_and_speedup(problem: GemmProblem, config: PipelineConfig = PipelineConfig()) -> RunReport:
    """Cycle report for a concrete GeMM problem (timing ignores weight values)."""
    return simulate(problem.spikes, problem.tile, problem.weights.cols, config)
