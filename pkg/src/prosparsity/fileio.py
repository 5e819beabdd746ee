"""File formats, synthetic generators, and layer manifests.

The on-disk container is "PRSP v1", a fixed 16-byte header followed by a
raw payload:

========  ====  =====================================================
offset    size  field
========  ====  =====================================================
0         4     magic ``b"PRSP"``
4         1     version, must be 1
5         1     kind: 0 spike bits, 1 int8 weights, 2 float32 weights
6         2     reserved, must be zero
8         4     row count, unsigned little-endian
12        4     column count, unsigned little-endian
16        --    payload
========  ====  =====================================================

Spike payload: each row is ``ceil(cols / 8)`` bytes, bit b of byte t
holding column ``8 t + b`` (LSB first), padding bits zero.  Weight
payloads are row-major: signed bytes for kind 1, little-endian IEEE-754
singles for kind 2.  Malformed files raise
:class:`~prosparsity.errors.FormatError` carrying the byte offset where
the problem was detected.

A *manifest* is a JSON file listing named layers that tie a spike file
to an optional weight file plus declared dimensions; loading validates
every declaration against the file headers.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SpikeMatrix, WeightMatrix, packed_width
from .errors import FormatError, UsageError

MAGIC = b"PRSP"
VERSION = 1
KIND_SPIKE = 0
KIND_INT8 = 1
KIND_FLOAT32 = 2

_HEADER = struct.Struct("<4sBBHII")
HEADER_SIZE = _HEADER.size  # 16


def _pack_header(kind: int, rows: int, cols: int) -> bytes:
    if rows > 0xFFFFFFFF or cols > 0xFFFFFFFF:
        raise UsageError(f"dimensions {rows}x{cols} overflow the 32-bit header fields")
    return _HEADER.pack(MAGIC, VERSION, kind, 0, rows, cols)


def read_header(path: str | Path) -> tuple[int, int, int]:
    """Parse and validate a PRSP header; returns (kind, rows, cols)."""
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_SIZE)
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file too short for a header ({len(raw)} bytes)", offset=0)
    magic, version, kind, reserved, rows, cols = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}, expected {VERSION}", offset=4)
    if kind not in (KIND_SPIKE, KIND_INT8, KIND_FLOAT32):
        raise FormatError(f"unknown kind {kind}", offset=5)
    if reserved != 0:
        raise FormatError(f"reserved field must be zero, got {reserved:#06x}", offset=6)
    if rows == 0:
        raise FormatError("row count must be nonzero", offset=8)
    if cols == 0:
        raise FormatError("column count must be nonzero", offset=12)
    return kind, rows, cols


def _read_payload(path: str | Path, expected: int) -> bytes:
    with open(path, "rb") as fh:
        fh.seek(HEADER_SIZE)
        payload = fh.read()
    if len(payload) < expected:
        raise FormatError(
            f"payload truncated: expected {expected} bytes, got {len(payload)}",
            offset=HEADER_SIZE + len(payload),
        )
    if len(payload) > expected:
        raise FormatError(
            f"trailing data: expected {expected} payload bytes, got {len(payload)}",
            offset=HEADER_SIZE + expected,
        )
    return payload


def save_spike_matrix(path: str | Path, matrix: SpikeMatrix) -> None:
    with open(path, "wb") as fh:
        fh.write(_pack_header(KIND_SPIKE, matrix.rows, matrix.cols))
        fh.write(matrix.packed.tobytes())


def load_spike_matrix(path: str | Path) -> SpikeMatrix:
    kind, rows, cols = read_header(path)
    if kind != KIND_SPIKE:
        raise FormatError(f"expected a spike file (kind 0), got kind {kind}", offset=5)
    width = packed_width(cols)
    payload = _read_payload(path, rows * width)
    packed = np.frombuffer(payload, dtype=np.uint8).reshape(rows, width).copy()
    rem = cols % 8
    if rem:
        bad = packed[:, -1] & np.uint8(0xFF << rem & 0xFF)
        if np.any(bad):
            row = int(np.nonzero(bad)[0][0])
            raise FormatError(
                f"nonzero padding bits in row {row}",
                offset=HEADER_SIZE + row * width + width - 1,
            )
    return SpikeMatrix(rows, cols, packed)


def save_weight_matrix(path: str | Path, weights: WeightMatrix) -> None:
    if weights.data.dtype == np.int8:
        kind, payload = KIND_INT8, weights.data.tobytes()
    elif weights.data.dtype == np.float32:
        kind, payload = KIND_FLOAT32, weights.data.astype("<f4", copy=False).tobytes()
    else:
        raise UsageError(f"no file kind for weight dtype {weights.data.dtype}")
    with open(path, "wb") as fh:
        fh.write(_pack_header(kind, weights.rows, weights.cols))
        fh.write(payload)


def load_weight_matrix(path: str | Path) -> WeightMatrix:
    kind, rows, cols = read_header(path)
    if kind == KIND_INT8:
        dtype, item = np.dtype(np.int8), 1
    elif kind == KIND_FLOAT32:
        dtype, item = np.dtype("<f4"), 4
    else:
        raise FormatError(f"expected a weight file (kind 1 or 2), got kind {kind}", offset=5)
    payload = _read_payload(path, rows * cols * item)
    data = np.frombuffer(payload, dtype=dtype).reshape(rows, cols).copy()
    return WeightMatrix(rows, cols, data.astype(np.float32) if item == 4 else data)


def save_spike_text(path: str | Path, matrix: SpikeMatrix) -> None:
    """Write one row per line as '0'/'1' characters (column 0 first)."""
    with open(path, "w") as fh:
        for i in range(matrix.rows):
            fh.write(matrix.row_string(i) + "\n")


def load_spike_text(path: str | Path) -> SpikeMatrix:
    with open(path) as fh:
        lines = [line.strip() for line in fh]
    rows = [line for line in lines if line]
    if not rows:
        raise FormatError(f"no rows in text spike file {path}")
    try:
        return SpikeMatrix.from_rows(rows)
    except UsageError as exc:
        raise FormatError(f"bad text spike file {path}: {exc}") from exc


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a reproducible synthetic spike matrix.

    ``bernoulli`` draws every bit independently at ``density``.
    ``clustered`` draws ``base_pattern_count`` base rows at ``density``,
    then each output row copies a uniformly chosen base row and flips
    each bit independently with probability ``flip_probability`` --
    high row similarity by construction, which is exactly the structure
    prefix reuse exploits.
    """

    kind: str
    m_total: int
    k_total: int
    density: float
    base_pattern_count: int = 8
    flip_probability: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("bernoulli", "clustered"):
            raise UsageError(f"kind must be 'bernoulli' or 'clustered', got {self.kind!r}")
        if self.m_total < 1 or self.k_total < 1:
            raise UsageError(f"matrix must be at least 1x1, got {self.m_total}x{self.k_total}")
        if not 0.0 <= self.density <= 1.0:
            raise UsageError(f"density must lie in [0, 1], got {self.density}")
        if self.base_pattern_count < 1:
            raise UsageError(f"base_pattern_count must be >= 1, got {self.base_pattern_count}")
        if not 0.0 <= self.flip_probability <= 1.0:
            raise UsageError(f"flip_probability must lie in [0, 1], got {self.flip_probability}")
        if not 0 <= self.seed < 2**64:
            raise UsageError(f"seed must fit in 64 bits, got {self.seed}")


def generate(spec: SynthSpec) -> SpikeMatrix:
    """Draw the spike matrix described by ``spec`` (same spec, same bits)."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "bernoulli":
        dense = rng.random((spec.m_total, spec.k_total)) < spec.density
    else:
        base = rng.random((spec.base_pattern_count, spec.k_total)) < spec.density
        choice = rng.integers(0, spec.base_pattern_count, size=spec.m_total)
        flips = rng.random((spec.m_total, spec.k_total)) < spec.flip_probability
        dense = base[choice] ^ flips
    return SpikeMatrix.from_dense(dense)


def generate_weights(k: int, n: int, seed: int, dtype: str = "int8") -> WeightMatrix:
    """Companion weight generator: int8 in [-64, 64) or float32 in [-1, 1).

    Uses a seed offset so spikes and weights from the same base seed stay
    independent streams.
    """
    rng = np.random.default_rng((seed + 0x9E3779B9) % 2**64)
    if dtype == "int8":
        data = rng.integers(-64, 64, size=(k, n), dtype=np.int64).astype(np.int8)
    elif dtype == "f32":
        data = (rng.random((k, n), dtype=np.float32) * 2 - 1).astype(np.float32)
    else:
        raise UsageError(f"dtype must be 'int8' or 'f32', got {dtype!r}")
    return WeightMatrix.from_array(data)


@dataclass(frozen=True)
class LayerTrace:
    """One manifest entry: named spike/weight files plus declared dims."""

    name: str
    spikes: Path
    weights: Path | None
    M: int
    K: int
    N: int


def load_manifest(path: str | Path) -> list[LayerTrace]:
    """Parse a manifest and validate every layer against its file headers.

    Relative file paths resolve against the manifest's directory.  Raises
    :class:`FormatError` naming the offending layer for duplicate names,
    missing files, or dimension mismatches.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("layers"), list):
        raise FormatError(f"manifest {path} must be an object with a 'layers' list")
    traces: list[LayerTrace] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc["layers"]):
        if not isinstance(entry, dict):
            raise FormatError(f"layer {i} in {path} is not an object")
        try:
            name = entry["name"]
            spikes = entry["spikes"]
            dims = {d: int(entry[d]) for d in ("M", "K", "N")}
        except KeyError as exc:
            raise FormatError(f"layer {i} in {path} is missing field {exc}") from exc
        if name in seen:
            raise FormatError(f"duplicate layer name {name!r} in {path}")
        seen.add(name)
        spike_path = (path.parent / spikes).resolve()
        if not spike_path.is_file():
            raise FormatError(f"layer {name!r}: spike file {spike_path} does not exist")
        kind, rows, cols = read_header(spike_path)
        if kind != KIND_SPIKE:
            raise FormatError(f"layer {name!r}: {spike_path} is not a spike file")
        if (rows, cols) != (dims["M"], dims["K"]):
            raise FormatError(
                f"layer {name!r}: declared M={dims['M']}, K={dims['K']} but "
                f"{spike_path} holds {rows}x{cols}"
            )
        weight_path: Path | None = None
        if entry.get("weights") is not None:
            weight_path = (path.parent / entry["weights"]).resolve()
            if not weight_path.is_file():
                raise FormatError(f"layer {name!r}: weight file {weight_path} does not exist")
            wkind, wrows, wcols = read_header(weight_path)
            if wkind not in (KIND_INT8, KIND_FLOAT32):
                raise FormatError(f"layer {name!r}: {weight_path} is not a weight file")
            if (wrows, wcols) != (dims["K"], dims["N"]):
                raise FormatError(
                    f"layer {name!r}: declared K={dims['K']}, N={dims['N']} but "
                    f"{weight_path} holds {wrows}x{wcols}"
                )
        traces.append(
            LayerTrace(name=name, spikes=spike_path, weights=weight_path, **dims)
        )
    return traces


def save_manifest(path: str | Path, traces: list[LayerTrace]) -> None:
    """Write a manifest; file paths are stored relative to the manifest."""
    path = Path(path)
    layers = []
    for t in traces:
        entry: dict = {
            "name": t.name,
            "spikes": _relative_to(t.spikes, path.parent),
            "M": t.M,
            "K": t.K,
            "N": t.N,
        }
        if t.weights is not None:
            entry["weights"] = _relative_to(t.weights, path.parent)
        layers.append(entry)
    path.write_text(json.dumps({"layers": layers}, indent=2) + "\n")


def _relative_to(target: Path, base: Path) -> str:
    try:
        return str(Path(target).resolve().relative_to(base.resolve()))
    except ValueError:
        return str(Path(target).resolve())


def load_layer(trace: LayerTrace) -> tuple[SpikeMatrix, WeightMatrix | None]:
    spikes = load_spike_matrix(trace.spikes)
    weights = load_weight_matrix(trace.weights) if trace.weights is not None else None
    return spikes, weights
