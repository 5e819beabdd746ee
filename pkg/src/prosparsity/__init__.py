"""Product sparsity for spiking GeMM.

Spike matrices are binary, so matrix multiplication reduces to summing
selected weight rows -- and rows whose spike sets nest inside each other
can share partial sums.  This package detects that structure, executes
GeMMs with prefix reuse (bit-exact in integer mode), and models the
cycle-level and analytic cost of doing so in hardware.
"""

from .core import (
    GemmProblem,
    OutputMatrix,
    SpikeMatrix,
    TileConfig,
    WeightMatrix,
    bitsparse_gemm,
    dense_gemm,
    iterate_tiles,
    popcount_row,
    subset_test,
)
from .costmodel import (
    CostModelConfig,
    CostReport,
    DsePoint,
    benefit_cost_ratio,
    breakeven_delta_s,
    cost_report,
    dse_sweep,
    overhead_ops,
)
from .cycles import (
    PipelineConfig,
    RunReport,
    baseline_and_speedup,
    compute_phase_cycles,
    dense_compute_cycles,
    overlap_schedule,
    prosparsity_phase_cycles,
    simulate,
)
from .engine import (
    NO_PREFIX,
    ExecutionOrder,
    PrefixTable,
    ProSparsityForest,
    TileMeta,
    build_meta,
    detect_subsets,
    match_set,
    order_rows,
    prosparse_gemm,
    prune_prefixes,
)
from .errors import FormatError, IntegrityError, UsageError
from .fileio import (
    LayerTrace,
    SynthSpec,
    generate,
    generate_weights,
    load_manifest,
    load_spike_matrix,
    load_weight_matrix,
    save_manifest,
    save_spike_matrix,
    save_weight_matrix,
)
from .oracle import (
    DensityReport,
    RelationKind,
    brute_force_graph,
    density_metrics,
    forest_stats,
    oracle_prefix_select,
    two_prefix_analysis,
    two_prefix_table,
)

__version__ = "1.0.0"

__all__ = [
    "GemmProblem",
    "OutputMatrix",
    "SpikeMatrix",
    "TileConfig",
    "WeightMatrix",
    "bitsparse_gemm",
    "dense_gemm",
    "iterate_tiles",
    "popcount_row",
    "subset_test",
    "CostModelConfig",
    "CostReport",
    "DsePoint",
    "benefit_cost_ratio",
    "breakeven_delta_s",
    "cost_report",
    "dse_sweep",
    "overhead_ops",
    "PipelineConfig",
    "RunReport",
    "baseline_and_speedup",
    "compute_phase_cycles",
    "dense_compute_cycles",
    "overlap_schedule",
    "prosparsity_phase_cycles",
    "simulate",
    "NO_PREFIX",
    "ExecutionOrder",
    "PrefixTable",
    "ProSparsityForest",
    "TileMeta",
    "build_meta",
    "detect_subsets",
    "match_set",
    "order_rows",
    "prosparse_gemm",
    "prune_prefixes",
    "FormatError",
    "IntegrityError",
    "UsageError",
    "LayerTrace",
    "SynthSpec",
    "generate",
    "generate_weights",
    "load_manifest",
    "load_spike_matrix",
    "load_weight_matrix",
    "save_manifest",
    "save_spike_matrix",
    "save_weight_matrix",
    "DensityReport",
    "RelationKind",
    "brute_force_graph",
    "density_metrics",
    "forest_stats",
    "oracle_prefix_select",
    "two_prefix_analysis",
    "two_prefix_table",
    "__version__",
]
