"""Analytic trade-off model and tile-size design-space sweep.

The preprocessing hardware spends bitwise search operations to save
multiply-accumulates.  With a tile of m rows by k spike columns feeding
an n-wide processing array:

* search cost: ``m^2 * k`` bitwise ops (all-pairs subset match), plus
  ``2 m log2 m`` sorter comparisons and ``m + log2 m`` pruner
  comparisons, both negligible next to the search term;
* benefit: a density drop of ``delta_s`` saves ``delta_s * m * k * n``
  accumulations, each worth ``flop_to_tcam_ratio`` (default 45) search
  ops.

The benefit/cost ratio collapses to ``45 * delta_s * n / m``: k cancels,
so only the row count and array width decide when preprocessing pays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import SpikeMatrix, TileConfig, WeightMatrix
from .cycles import PE_WIDTH, PipelineConfig, simulate
from .errors import UsageError
from .oracle import density_metrics

FLOP_TO_TCAM_RATIO = 45.0


@dataclass(frozen=True)
class CostModelConfig:
    """Relative cost of one accumulation versus one bitwise search op."""

    flop_to_tcam_ratio: float = FLOP_TO_TCAM_RATIO

    def __post_init__(self) -> None:
        if self.flop_to_tcam_ratio <= 0:
            raise UsageError(f"flop_to_tcam_ratio must be positive, got {self.flop_to_tcam_ratio}")


def breakeven_delta_s(m: int, n: int, config: CostModelConfig = CostModelConfig()) -> float:
    """Density drop at which preprocessing exactly pays for itself: m / (ratio * n)."""
    if m < 1 or n < 1:
        raise UsageError(f"m and n must be >= 1, got m={m}, n={n}")
    return m / (config.flop_to_tcam_ratio * n)


def benefit_cost_ratio(
    delta_s: float, m: int, k: int, n: int, config: CostModelConfig = CostModelConfig()
) -> float:
    """Accumulations saved over search ops spent: ratio * delta_s * n / m.

    ``k`` appears in both benefit and cost and cancels; it stays in the
    signature because callers think in full tile shapes.
    """
    if not 0 <= delta_s <= 1:
        raise UsageError(f"delta_s must lie in [0, 1], got {delta_s}")
    if m < 1 or k < 1 or n < 1:
        raise UsageError(f"tile dims must be >= 1, got m={m}, k={k}, n={n}")
    return config.flop_to_tcam_ratio * delta_s * n / m


@dataclass(frozen=True)
class CostReport:
    """Operation counts and the benefit/cost summary for one tile shape."""

    m: int
    k: int
    n: int
    delta_s: float
    tcam_ops: int
    sorter_ops: float
    pruner_ops: float
    saved_flops: float
    ratio: float
    breakeven_delta_s: float

    @property
    def ratio_full(self) -> float:
        """Ratio against the full overhead, sorter and pruner included."""
        flop_ratio = self.ratio * self.tcam_ops / self.saved_flops if self.saved_flops else 0.0
        total = self.tcam_ops + self.sorter_ops + self.pruner_ops
        return self.saved_flops * flop_ratio / total if self.saved_flops else 0.0


def overhead_ops(m: int, k: int) -> tuple[int, float, float]:
    """Preprocessing op counts (tcam, sorter, pruner) for an m x k tile."""
    if m < 2 or k < 1:
        raise UsageError(f"overhead model needs m >= 2 and k >= 1, got m={m}, k={k}")
    return m * m * k, 2.0 * m * math.log2(m), m + math.log2(m)


def cost_report(
    delta_s: float, m: int, k: int, n: int, config: CostModelConfig = CostModelConfig()
) -> CostReport:
    """Full cost-model evaluation for one (delta_s, tile shape) point."""
    tcam, sorter, pruner = overhead_ops(m, k)
    return CostReport(
        m=m,
        k=k,
        n=n,
        delta_s=delta_s,
        tcam_ops=tcam,
        sorter_ops=sorter,
        pruner_ops=pruner,
        saved_flops=delta_s * m * k * n,
        ratio=benefit_cost_ratio(delta_s, m, k, n, config),
        breakeven_delta_s=breakeven_delta_s(m, n, config),
    )


@dataclass(frozen=True)
class DsePoint:
    """One (m, k) tile-shape candidate in a design-space sweep."""

    m: int
    k: int
    bit_density: float
    pro_density: float
    prosparsity_cycles: int
    bitsparse_cycles: int

    @property
    def relative_latency(self) -> float:
        """Overlapped product-sparse total over the bit-sparse compute total."""
        return self.prosparsity_cycles / self.bitsparse_cycles


def dse_sweep(
    matrix: SpikeMatrix,
    m_values: Sequence[int],
    k_values: Sequence[int],
    weights: WeightMatrix | None = None,
    n_total: int | None = None,
    pipeline: PipelineConfig = PipelineConfig(),
) -> list[DsePoint]:
    """Evaluate every (m, k) tile shape on a fixed spike matrix.

    Densities come from full retiling; cycle totals include the
    preprocessing phases under the overlap schedule, so small m pays for
    frequent phase restarts and the sweep exposes the trade-off.  The
    weight matrix only contributes its column count (``n_total`` may be
    given instead; default one full array width).
    """
    if not m_values or not k_values:
        raise UsageError("m_values and k_values must be non-empty")
    if weights is not None:
        n_total = weights.cols
    elif n_total is None:
        n_total = PE_WIDTH
    from .engine import prune_prefixes

    points = []
    for m in m_values:
        for k in k_values:
            tile = TileConfig(m=m, n=PE_WIDTH, k=k)
            report = simulate(matrix, tile, n_total, pipeline)
            dens = density_metrics(matrix, tile, selector=prune_prefixes)
            points.append(
                DsePoint(
                    m=m,
                    k=k,
                    bit_density=dens.bit_density,
                    pro_density=dens.pro_density,
                    prosparsity_cycles=report.prosparse_total,
                    bitsparse_cycles=report.bitsparse_compute,
                )
            )
    return points


def best_point(points: Sequence[DsePoint]) -> DsePoint:
    """Sweep point with the lowest modeled product-sparse latency."""
    if not points:
        raise UsageError("cannot pick a best point from an empty sweep")
    return min(points, key=lambda p: (p.prosparsity_cycles, p.m, p.k))
