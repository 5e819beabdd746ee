"""Command-line front end.

Subcommands bind the library into reproducible experiments: ``verify``
(cross-check all execution modes), ``density`` (bit vs product density),
``simulate`` (cycle model), ``dse`` (tile-size sweep), ``oracle``
(engine vs brute-force checker), ``cost`` (analytic model), ``gen``
(synthetic data).

Exit codes: 0 success; 1 a verification or equivalence check failed;
2 usage error; 3 I/O or file-format error.  Reports render as text
(default), JSON (schema-validated, see :mod:`.schemas`), or CSV for the
tabular commands; all formats are produced from the same dictionary so
the numbers never differ.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from .core import (
    GemmProblem,
    SpikeMatrix,
    TileConfig,
    WeightMatrix,
    bitsparse_gemm,
    dense_gemm,
)
from .costmodel import best_point, cost_report, dse_sweep
from .cycles import PE_WIDTH, PipelineConfig, RunReport, simulate
from .engine import NO_PREFIX, PrefixTable, TileMeta, prosparse_gemm, prune_prefixes
from .errors import FormatError, UsageError
from .fileio import (
    LayerTrace,
    SynthSpec,
    generate,
    generate_weights,
    load_layer,
    load_manifest,
    load_spike_matrix,
    load_weight_matrix,
    save_manifest,
    save_spike_matrix,
    save_weight_matrix,
)
from .oracle import (
    density_metrics,
    forest_stats,
    oracle_prefix_select,
    two_prefix_table,
)

FLOAT_TOLERANCE = 1e-5


def handle_errors(f):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except FormatError as exc:
            click.echo(f"format error: {exc}", err=True)
            sys.exit(3)
        except UsageError as exc:
            raise click.UsageError(str(exc)) from exc
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(3)

    return wrapper


def input_options(f):
    f = click.option("--manifest", type=click.Path(path_type=Path), help="Layer manifest JSON.")(f)
    f = click.option("--spikes", type=click.Path(path_type=Path), help="Single spike file.")(f)
    f = click.option("--weights", type=click.Path(path_type=Path), help="Single weight file.")(f)
    return f


def tile_options(f):
    f = click.option("--tile-m", type=int, default=256, show_default=True)(f)
    f = click.option("--tile-n", type=int, default=128, show_default=True)(f)
    f = click.option("--tile-k", type=int, default=16, show_default=True)(f)
    return f


def output_options(f):
    f = click.option(
        "--format",
        "fmt",
        type=click.Choice(["text", "json", "csv"]),
        default="text",
        show_default=True,
    )(f)
    f = click.option("--out", type=click.Path(path_type=Path), help="Write report to a file.")(f)
    return f


def _load_inputs(manifest: Path | None, spikes: Path | None, weights: Path | None):
    """Resolve inputs to a list of (name, SpikeMatrix, WeightMatrix|None, N)."""
    if (manifest is None) == (spikes is None):
        raise UsageError("provide exactly one of --manifest or --spikes")
    if manifest is not None:
        if weights is not None:
            raise UsageError("--weights only combines with --spikes")
        layers = []
        for trace in load_manifest(manifest):
            sp, wt = load_layer(trace)
            layers.append((trace.name, sp, wt, trace.N))
        return layers
    sp = load_spike_matrix(spikes)
    wt = load_weight_matrix(weights) if weights is not None else None
    n = wt.cols if wt is not None else PE_WIDTH
    return [(spikes.stem, sp, wt, n)]


def _emit(report: dict, fmt: str, out: Path | None, text_fn, csv_fn=None) -> None:
    if fmt == "json":
        rendered = json.dumps(report, indent=2) + "\n"
    elif fmt == "csv":
        if csv_fn is None:
            raise UsageError(f"csv output is not available for '{report['command']}'")
        rendered = csv_fn(report)
    else:
        rendered = text_fn(report)
    if out is not None:
        out.write_text(rendered)
    else:
        click.echo(rendered, nl=False)


def _tile_dict(tile: TileConfig) -> dict:
    return {"m": tile.m, "n": tile.n, "k": tile.k}


@click.group()
def main() -> None:
    """Product-sparsity toolkit for spiking GeMM."""


# --------------------------------------------------------------------------
# verify


def _inject_fault(rt: int, kt: int, meta: TileMeta) -> TileMeta:
    """Corrupt the first tile's prefix table (negative-path test hook)."""
    if (rt, kt) != (0, 0):
        return meta
    prefix = meta.table.prefix.copy()
    linked = np.nonzero(prefix != NO_PREFIX)[0]
    if linked.size:
        prefix[int(linked[0])] = NO_PREFIX
        table = PrefixTable(prefix=prefix, patterns=meta.table.patterns)
    else:
        dense = meta.table.patterns.to_dense().copy()
        dense[0, 0] ^= 1
        table = PrefixTable(prefix=prefix, patterns=SpikeMatrix.from_dense(dense))
    return TileMeta(
        table=table,
        order=meta.order,
        forest=meta.forest,
        pattern_popcounts=table.patterns.row_popcounts(),
    )


def _verify_layer(name, sp, wt, tile, mode, fault):
    if wt is None:
        raise UsageError(f"layer {name!r} has no weights; verify needs them")
    if mode == "int8" and not wt.is_integer:
        raise UsageError(f"layer {name!r} holds float weights but --mode is int8")
    if mode == "f32" and wt.is_integer:
        wt = WeightMatrix.from_array(wt.data.astype(np.float32))
    problem = GemmProblem(spikes=sp, weights=wt, tile=tile)
    reference = dense_gemm(problem).data
    hook = _inject_fault if fault else None
    pro, stats = prosparse_gemm(problem, meta_hook=hook)
    bit, bit_accum = bitsparse_gemm(problem)

    def compare(candidate: np.ndarray) -> tuple[bool, float, dict | None]:
        if mode == "int8":
            diff = candidate != reference
            if not diff.any():
                return True, 0.0, None
            r, c = (int(x[0]) for x in np.nonzero(diff))
            err = float(np.abs(candidate - reference).max() / max(1, np.abs(reference).max()))
            return False, err, {
                "row": r,
                "col": c,
                "expected": int(reference[r, c]),
                "got": int(candidate[r, c]),
            }
        scale = max(float(np.abs(reference).max()), 1e-30)
        abs_err = np.abs(candidate - reference)
        err = float(abs_err.max() / scale)
        if err <= FLOAT_TOLERANCE:
            return True, err, None
        r, c = (int(x[0]) for x in np.unravel_index(abs_err.argmax(), abs_err.shape))
        return False, err, {
            "row": r,
            "col": c,
            "expected": float(reference[r, c]),
            "got": float(candidate[r, c]),
        }

    pro_ok, pro_err, pro_miss = compare(pro.data)
    bit_ok, bit_err, _ = compare(bit.data)
    return {
        "name": name,
        "M": sp.rows,
        "K": sp.cols,
        "N": wt.cols,
        "passed": bool(pro_ok and bit_ok),
        "max_relative_error": max(pro_err, bit_err),
        "first_mismatch": pro_miss,
        "accumulations": {"prosparse": stats.accumulations, "bitsparse": bit_accum},
    }


def _verify_text(report: dict) -> str:
    lines = [f"verify (mode {report['mode']})"]
    for lay in report["layers"]:
        verdict = "PASS" if lay["passed"] else "FAIL"
        lines.append(
            f"  {lay['name']}: {lay['M']}x{lay['K']} by {lay['K']}x{lay['N']}  {verdict}"
            f"  max_relative_error={lay['max_relative_error']:.3g}"
            f"  accumulations prosparse={lay['accumulations']['prosparse']}"
            f" bitsparse={lay['accumulations']['bitsparse']}"
        )
        if lay["first_mismatch"] is not None:
            mm = lay["first_mismatch"]
            lines.append(
                f"    first mismatch at ({mm['row']}, {mm['col']}):"
                f" expected {mm['expected']}, got {mm['got']}"
            )
    lines.append("all layers passed" if report["all_passed"] else "verification FAILED")
    return "\n".join(lines) + "\n"


@main.command()
@input_options
@tile_options
@click.option("--mode", type=click.Choice(["int8", "f32"]), default="int8", show_default=True)
@output_options
@click.option("--inject-fault", is_flag=True, hidden=True)
@handle_errors
def verify(manifest, spikes, weights, tile_m, tile_n, tile_k, mode, fmt, out, inject_fault):
    """Check dense, bit-sparse, and product-sparse executions agree."""
    tile = TileConfig(m=tile_m, n=tile_n, k=tile_k)
    layers = [
        _verify_layer(name, sp, wt, tile, mode, inject_fault)
        for name, sp, wt, _ in _load_inputs(manifest, spikes, weights)
    ]
    report = {
        "command": "verify",
        "mode": mode,
        "layers": layers,
        "all_passed": all(lay["passed"] for lay in layers),
    }
    _emit(report, fmt, out, _verify_text)
    if not report["all_passed"]:
        sys.exit(1)


# --------------------------------------------------------------------------
# density


def _density_fields(rep) -> dict:
    return {
        "bit_density": rep.bit_density,
        "pro_density": rep.pro_density,
        "reduction": None if rep.reduction == float("inf") else rep.reduction,
        "em_fraction": rep.em_fraction,
        "pm_fraction": rep.pm_fraction,
        "no_prefix_fraction": rep.no_prefix_fraction,
    }


def _density_line(fields: dict) -> str:
    red = fields["reduction"]
    return (
        f"bit {fields['bit_density']:.4f}  pro {fields['pro_density']:.4f}"
        f"  reduction {'inf' if red is None else f'{red:.2f}x'}"
        f"  em {fields['em_fraction']:.3f}  pm {fields['pm_fraction']:.3f}"
        f"  none {fields['no_prefix_fraction']:.3f}"
    )


def _density_text(report: dict) -> str:
    t = report["tile"]
    lines = [f"density (tile m={t['m']} n={t['n']} k={t['k']})"]
    for lay in report["layers"]:
        lines.append(f"  {lay['name']}: {_density_line(lay)}")
    lines.append(f"aggregate: {_density_line(report['aggregate'])}")
    return "\n".join(lines) + "\n"


def _density_csv(report: dict) -> str:
    buf = io.StringIO()
    cols = [
        "name",
        "bit_density",
        "pro_density",
        "reduction",
        "em_fraction",
        "pm_fraction",
        "no_prefix_fraction",
    ]
    writer = csv.DictWriter(buf, fieldnames=cols)
    writer.writeheader()
    for lay in report["layers"]:
        writer.writerow({c: lay[c] for c in cols})
    writer.writerow({**{c: report["aggregate"][c] for c in cols[1:]}, "name": "aggregate"})
    return buf.getvalue()


@main.command()
@input_options
@tile_options
@output_options
@handle_errors
def density(manifest, spikes, weights, tile_m, tile_n, tile_k, fmt, out):
    """Report bit density vs product density per layer."""
    tile = TileConfig(m=tile_m, n=tile_n, k=tile_k)
    layers = []
    totals = {"total_bits": 0, "spike_bits": 0, "pattern_bits": 0, "rows": 0, "em": 0, "pm": 0}
    for name, sp, _, _ in _load_inputs(manifest, spikes, weights):
        rep = density_metrics(sp, tile, selector=prune_prefixes)
        layers.append({"name": name, **_density_fields(rep)})
        totals["total_bits"] += rep.total_bits
        totals["spike_bits"] += rep.spike_bits
        totals["pattern_bits"] += rep.pattern_bits
        totals["rows"] += rep.row_instances
        totals["em"] += rep.em_rows
        totals["pm"] += rep.pm_rows
    agg = {
        "bit_density": totals["spike_bits"] / totals["total_bits"],
        "pro_density": totals["pattern_bits"] / totals["total_bits"],
        "reduction": (totals["spike_bits"] / totals["pattern_bits"])
        if totals["pattern_bits"]
        else (None if totals["spike_bits"] else 1.0),
        "em_fraction": totals["em"] / totals["rows"],
        "pm_fraction": totals["pm"] / totals["rows"],
        "no_prefix_fraction": 1.0 - (totals["em"] + totals["pm"]) / totals["rows"],
    }
    report = {"command": "density", "tile": _tile_dict(tile), "layers": layers, "aggregate": agg}
    _emit(report, fmt, out, _density_text, _density_csv)


# --------------------------------------------------------------------------
# simulate


def _cycles_dict(rep: RunReport) -> dict:
    return {
        "dense": rep.dense_compute,
        "bitsparse": rep.bitsparse_compute,
        "prosparse_compute": rep.prosparse_compute,
        "prosparse_total": rep.prosparse_total,
    }


def _speedup_dict(cycles: dict) -> dict:
    return {
        "vs_dense": cycles["dense"] / cycles["prosparse_compute"],
        "vs_bitsparse": cycles["bitsparse"] / cycles["prosparse_compute"],
        "full_vs_dense": cycles["dense"] / cycles["prosparse_total"],
        "full_vs_bitsparse": cycles["bitsparse"] / cycles["prosparse_total"],
    }


def _simulate_text(report: dict) -> str:
    t = report["tile"]
    lines = [f"simulate (tile m={t['m']} n={t['n']} k={t['k']})"]
    for lay in report["layers"]:
        c, s = lay["cycles"], lay["speedup"]
        lines.append(
            f"  {lay['name']}: dense {c['dense']}  bitsparse {c['bitsparse']}"
            f"  prosparse {c['prosparse_compute']} (total {c['prosparse_total']})"
        )
        lines.append(
            f"    speedup vs dense {s['vs_dense']:.2f}x (full {s['full_vs_dense']:.2f}x)"
            f"  vs bitsparse {s['vs_bitsparse']:.2f}x (full {s['full_vs_bitsparse']:.2f}x)"
        )
    c, s = report["total"]["cycles"], report["total"]["speedup"]
    lines.append(
        f"total: dense {c['dense']}  bitsparse {c['bitsparse']}"
        f"  prosparse {c['prosparse_compute']} (total {c['prosparse_total']})"
        f"  speedup {s['vs_dense']:.2f}x/{s['vs_bitsparse']:.2f}x"
        f" (full {s['full_vs_dense']:.2f}x/{s['full_vs_bitsparse']:.2f}x)"
    )
    return "\n".join(lines) + "\n"


@main.command(name="simulate")
@input_options
@tile_options
@output_options
@handle_errors
def simulate_cmd(manifest, spikes, weights, tile_m, tile_n, tile_k, fmt, out):
    """Model execution cycles for every mode."""
    tile = TileConfig(m=tile_m, n=tile_n, k=tile_k)
    pipeline = PipelineConfig()
    layers = []
    total = {"dense": 0, "bitsparse": 0, "prosparse_compute": 0, "prosparse_total": 0}
    for name, sp, _, n_total in _load_inputs(manifest, spikes, weights):
        rep = simulate(sp, tile, n_total, pipeline)
        cyc = _cycles_dict(rep)
        layers.append(
            {
                "name": name,
                "cycles": cyc,
                "speedup": _speedup_dict(cyc),
                "accumulations": {
                    "dense": rep.dense_accumulations,
                    "bitsparse": rep.bitsparse_accumulations,
                    "prosparse": rep.prosparse_accumulations,
                },
                "traffic_bytes": {
                    "spikes": rep.spike_traffic_bytes,
                    "dense_weights": rep.dense_weight_bytes,
                    "bitsparse_weights": rep.bitsparse_weight_bytes,
                    "prosparse_weights": rep.prosparse_weight_bytes,
                },
            }
        )
        for key in total:
            total[key] += cyc[key]
    report = {
        "command": "simulate",
        "tile": _tile_dict(tile),
        "pipeline": {
            "prosparsity_stages": pipeline.prosparsity_stages,
            "processor_stages": pipeline.processor_stages,
            "pe_width": pipeline.pe_width,
        },
        "layers": layers,
        "total": {"cycles": total, "speedup": _speedup_dict(total)},
    }
    _emit(report, fmt, out, _simulate_text)


# --------------------------------------------------------------------------
# dse


def _parse_int_list(_ctx, _param, value: str) -> list[int]:
    try:
        items = [int(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from exc
    if not items:
        raise click.BadParameter("list must not be empty")
    return items


def _dse_text(report: dict) -> str:
    lines = ["dse sweep (prosparsity cycles include preprocessing phases)"]
    for p in report["points"]:
        mark = "  <- best" if p["best"] else ""
        lines.append(
            f"  m={p['m']:<4d} k={p['k']:<3d} bit {p['bit_density']:.4f}"
            f"  pro {p['pro_density']:.4f}  cycles {p['prosparsity_cycles']}"
            f" vs {p['bitsparse_cycles']}  latency {p['relative_latency']:.3f}{mark}"
        )
    best = report["best"]
    lines.append(f"best point: m={best['m']} k={best['k']}")
    return "\n".join(lines) + "\n"


def _dse_csv(report: dict) -> str:
    buf = io.StringIO()
    cols = [
        "m",
        "k",
        "bit_density",
        "pro_density",
        "prosparsity_cycles",
        "bitsparse_cycles",
        "relative_latency",
    ]
    writer = csv.DictWriter(buf, fieldnames=cols)
    writer.writeheader()
    for p in report["points"]:
        writer.writerow({c: p[c] for c in cols})
    return buf.getvalue()


@main.command()
@input_options
@click.option(
    "--m-values", callback=_parse_int_list, default="32,64,128,256", show_default=True
)
@click.option("--k-values", callback=_parse_int_list, default="16", show_default=True)
@output_options
@handle_errors
def dse(manifest, spikes, weights, m_values, k_values, fmt, out):
    """Sweep tile shapes and report density and modeled latency."""
    layers = _load_inputs(manifest, spikes, weights)
    if len(layers) != 1:
        raise UsageError("dse operates on a single spike matrix; give one layer")
    for m in m_values:
        if m < 1 or m & (m - 1):
            raise UsageError(f"m values must be powers of two, got {m}")
    _, sp, _, n_total = layers[0]
    points = dse_sweep(sp, m_values, k_values, n_total=n_total)
    sweep_best = best_point(points)
    for k in k_values:
        ordered = [p.pro_density for p in sorted((p for p in points if p.k == k), key=lambda p: p.m)]
        if any(b > a + 1e-12 for a, b in zip(ordered, ordered[1:])):
            raise click.ClickException(
                f"pro_density increased along the m sweep at k={k}; this indicates an engine bug"
            )
    report = {
        "command": "dse",
        "points": [
            {
                "m": p.m,
                "k": p.k,
                "bit_density": p.bit_density,
                "pro_density": p.pro_density,
                "prosparsity_cycles": p.prosparsity_cycles,
                "bitsparse_cycles": p.bitsparse_cycles,
                "relative_latency": p.relative_latency,
                "best": p is sweep_best,
            }
            for p in points
        ],
        "best": {"m": sweep_best.m, "k": sweep_best.k},
        "monotonicity_checked": True,
    }
    _emit(report, fmt, out, _dse_text, _dse_csv)


# --------------------------------------------------------------------------
# oracle


def _oracle_layer(name, sp, tile):
    from .core import tile_ranges

    first_disagreement = None
    rows_checked = 0
    one_bits = 0
    two_bits = 0
    total_bits = sp.rows * sp.cols
    one_links = 0
    two_links = 0
    trees = 0
    max_depth = 0
    for r0, r1 in tile_ranges(sp.rows, tile.m):
        for k0, k1 in tile_ranges(sp.cols, tile.k):
            sub = sp.tile(r0, r1, k0, k1)
            engine_table = prune_prefixes(sub)
            oracle_table = oracle_prefix_select(sub)
            rows_checked += sub.rows
            if first_disagreement is None:
                agree = (engine_table.prefix == oracle_table.prefix) & (
                    engine_table.patterns.packed == oracle_table.patterns.packed
                ).all(axis=1)
                if not agree.all():
                    row = int(np.nonzero(~agree)[0][0])
                    ep = int(engine_table.prefix[row])
                    op = int(oracle_table.prefix[row])
                    first_disagreement = {
                        "row": row + r0,
                        "engine_prefix": None if ep == NO_PREFIX else ep,
                        "oracle_prefix": None if op == NO_PREFIX else op,
                    }
            one_bits += int(oracle_table.patterns.row_popcounts().sum())
            one_links += int(np.count_nonzero(oracle_table.prefix != NO_PREFIX))
            for res in two_prefix_table(sub):
                two_bits += len(res.residual)
                two_links += (res.first is not None) + (res.second is not None)
            stats = forest_stats([int(p) for p in engine_table.prefix])
            trees += stats.trees
            max_depth = max(max_depth, stats.max_depth)
    return {
        "name": name,
        "rows": sp.rows,
        "agreement": first_disagreement is None,
        "first_disagreement": first_disagreement,
        "one_prefix": {
            "pro_density": one_bits / total_bits,
            "prefix_ratio": one_links / rows_checked,
        },
        "two_prefix": {
            "pro_density": two_bits / total_bits,
            "prefix_ratio": two_links / rows_checked,
        },
        "forest": {"trees": trees, "max_depth": max_depth},
    }


def _oracle_text(report: dict) -> str:
    lines = ["oracle cross-check"]
    for lay in report["layers"]:
        verdict = "PASS" if lay["agreement"] else "FAIL"
        lines.append(
            f"  {lay['name']}: {verdict}"
            f"  one-prefix pro {lay['one_prefix']['pro_density']:.4f}"
            f" (ratio {lay['one_prefix']['prefix_ratio']:.3f})"
            f"  two-prefix pro {lay['two_prefix']['pro_density']:.4f}"
            f" (ratio {lay['two_prefix']['prefix_ratio']:.3f})"
            f"  forest trees={lay['forest']['trees']} depth={lay['forest']['max_depth']}"
        )
        if lay["first_disagreement"] is not None:
            d = lay["first_disagreement"]
            lines.append(
                f"    first disagreement at row {d['row']}:"
                f" engine={d['engine_prefix']} oracle={d['oracle_prefix']}"
            )
    lines.append("all layers agree" if report["all_agree"] else "oracle DISAGREEMENT")
    return "\n".join(lines) + "\n"


@main.command()
@input_options
@tile_options
@output_options
@handle_errors
def oracle(manifest, spikes, weights, tile_m, tile_n, tile_k, fmt, out):
    """Cross-check engine prefix selection against the brute-force oracle."""
    tile = TileConfig(m=tile_m, n=tile_n, k=tile_k)
    layers = [
        _oracle_layer(name, sp, tile) for name, sp, _, _ in _load_inputs(manifest, spikes, weights)
    ]
    report = {
        "command": "oracle",
        "layers": layers,
        "all_agree": all(lay["agreement"] for lay in layers),
    }
    _emit(report, fmt, out, _oracle_text)
    if not report["all_agree"]:
        sys.exit(1)


# --------------------------------------------------------------------------
# cost


def _cost_text(report: dict) -> str:
    return (
        f"cost model at m={report['m']} k={report['k']} n={report['n']}"
        f" delta_s={report['delta_s']:.4f}\n"
        f"  search ops {report['tcam_ops']}  sorter {report['sorter_ops']:.0f}"
        f"  pruner {report['pruner_ops']:.2f}\n"
        f"  saved accumulations {report['saved_flops']:.1f}\n"
        f"  benefit/cost ratio {report['ratio']:.4f} (full {report['ratio_full']:.4f})\n"
        f"  break-even delta_s {report['breakeven_delta_s']:.4f}\n"
    )


@main.command()
@click.option("--m", type=int, default=256, show_default=True)
@click.option("--k", type=int, default=16, show_default=True)
@click.option("--n", type=int, default=128, show_default=True)
@click.option("--delta-s", type=float, default=0.1335, show_default=True)
@output_options
@handle_errors
def cost(m, k, n, delta_s, fmt, out):
    """Evaluate the analytic benefit/cost model at one point."""
    rep = cost_report(delta_s, m, k, n)
    report = {
        "command": "cost",
        "m": rep.m,
        "k": rep.k,
        "n": rep.n,
        "delta_s": rep.delta_s,
        "tcam_ops": rep.tcam_ops,
        "sorter_ops": rep.sorter_ops,
        "pruner_ops": rep.pruner_ops,
        "saved_flops": rep.saved_flops,
        "ratio": rep.ratio,
        "ratio_full": rep.ratio_full,
        "breakeven_delta_s": rep.breakeven_delta_s,
    }
    _emit(report, fmt, out, _cost_text)


# --------------------------------------------------------------------------
# gen


def _gen_text(report: dict) -> str:
    spec = report["spec"]
    files = report["files"]
    lines = [
        f"generated {spec['kind']} matrix {spec['m_total']}x{spec['k_total']}"
        f" (density {spec['density']}, seed {spec['seed']})",
        f"  spikes:   {files['spikes']}",
    ]
    if files["weights"] is not None:
        lines.append(f"  weights:  {files['weights']}")
    lines.append(f"  manifest: {files['manifest']}")
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--kind", type=click.Choice(["bernoulli", "clustered"]), default="bernoulli")
@click.option("--m", "m_total", type=int, required=True)
@click.option("--k", "k_total", type=int, required=True)
@click.option("--density", type=float, required=True)
@click.option("--base-patterns", type=int, default=8, show_default=True)
@click.option("--flip-prob", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--name", default="layer0", show_default=True)
@click.option("--weights-cols", type=int, default=128, show_default=True, help="0 disables weights.")
@click.option("--weights-dtype", type=click.Choice(["int8", "f32"]), default="int8")
@click.option(
    "--out-dir", type=click.Path(path_type=Path, file_okay=False), required=True
)
@output_options
@handle_errors
def gen(
    kind,
    m_total,
    k_total,
    density,
    base_patterns,
    flip_prob,
    seed,
    name,
    weights_cols,
    weights_dtype,
    out_dir,
    fmt,
    out,
):
    """Generate a synthetic layer (spike file, weight file, manifest)."""
    spec = SynthSpec(
        kind=kind,
        m_total=m_total,
        k_total=k_total,
        density=density,
        base_pattern_count=base_patterns,
        flip_probability=flip_prob,
        seed=seed,
    )
    matrix = generate(spec)
    out_dir.mkdir(parents=True, exist_ok=True)
    spike_path = out_dir / f"{name}_spikes.prsp"
    save_spike_matrix(spike_path, matrix)
    weight_path = None
    n_cols = weights_cols
    if weights_cols > 0:
        wt = generate_weights(k_total, weights_cols, seed, weights_dtype)
        weight_path = out_dir / f"{name}_weights.prsp"
        save_weight_matrix(weight_path, wt)
    else:
        n_cols = PE_WIDTH
    manifest_path = out_dir / "manifest.json"
    save_manifest(
        manifest_path,
        [
            LayerTrace(
                name=name,
                spikes=spike_path,
                weights=weight_path,
                M=m_total,
                K=k_total,
                N=n_cols,
            )
        ],
    )
    report = {
        "command": "gen",
        "spec": {
            "kind": spec.kind,
            "m_total": spec.m_total,
            "k_total": spec.k_total,
            "density": spec.density,
            "base_pattern_count": spec.base_pattern_count,
            "flip_probability": spec.flip_probability,
            "seed": spec.seed,
        },
        "files": {
            "spikes": str(spike_path),
            "weights": None if weight_path is None else str(weight_path),
            "manifest": str(manifest_path),
        },
    }
    _emit(report, fmt, out, _gen_text)


if __name__ == "__main__":
    main()
