"""Binary/text formats, synthetic generators, manifests."""

import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosparsity import (
    FormatError,
    SpikeMatrix,
    SynthSpec,
    UsageError,
    WeightMatrix,
    generate,
    generate_weights,
    load_manifest,
    load_spike_matrix,
    load_weight_matrix,
    save_manifest,
    save_spike_matrix,
    save_weight_matrix,
)
from prosparsity.fileio import (
    HEADER_SIZE,
    KIND_SPIKE,
    LayerTrace,
    load_spike_text,
    save_spike_text,
)

from conftest import CANONICAL_ROWS, random_spikes


def test_round_trip_canonical(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    assert load_spike_matrix(path) == canonical


def test_header_layout(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    raw = path.read_bytes()
    magic, version, kind, reserved, rows, cols = struct.unpack("<4sBBHII", raw[:HEADER_SIZE])
    assert (magic, version, kind, reserved, rows, cols) == (b"PRSP", 1, KIND_SPIKE, 0, 6, 4)
    assert len(raw) == HEADER_SIZE + 6  # one byte per 4-column row


def test_single_one_payload(tmp_path):
    path = tmp_path / "one.prsp"
    save_spike_matrix(path, SpikeMatrix.from_rows(["1"]))
    assert path.read_bytes()[HEADER_SIZE:] == b"\x01"


@given(
    rows=st.integers(1, 200),
    cols=st.integers(1, 200),
    density=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_round_trip_random(tmp_path_factory, rows, cols, density, seed):
    path = tmp_path_factory.mktemp("prsp") / "m.prsp"
    matrix = random_spikes(np.random.default_rng(seed), rows, cols, density)
    save_spike_matrix(path, matrix)
    assert load_spike_matrix(path) == matrix


def _corrupt(path, offset: int, value: int) -> None:
    raw = bytearray(path.read_bytes())
    raw[offset] = value
    path.write_bytes(bytes(raw))


def test_bad_magic_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    _corrupt(path, 0, ord("X"))
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 0


def test_bad_version_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    _corrupt(path, 4, 2)
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 4


def test_bad_kind_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    _corrupt(path, 5, 9)
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 5


def test_nonzero_reserved_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    _corrupt(path, 6, 1)
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 6


def test_zero_dimensions_rejected(tmp_path):
    path = tmp_path / "z.prsp"
    path.write_bytes(struct.pack("<4sBBHII", b"PRSP", 1, 0, 0, 0, 4))
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 8
    path.write_bytes(struct.pack("<4sBBHII", b"PRSP", 1, 0, 0, 4, 0))
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 12


def test_truncated_header_rejected(tmp_path):
    path = tmp_path / "t.prsp"
    path.write_bytes(b"PRSP\x01")
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == 0


def test_truncated_payload_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    raw = path.read_bytes()
    path.write_bytes(raw[:-2])
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == len(raw) - 2


def test_trailing_bytes_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError):
        load_spike_matrix(path)


def test_nonzero_padding_rejected(tmp_path, canonical):
    path = tmp_path / "c.prsp"
    save_spike_matrix(path, canonical)
    # 4-column rows use only the low nibble; bit 7 of row 2 is padding
    _corrupt(path, HEADER_SIZE + 2, 0x80 | canonical.packed[2, 0])
    with pytest.raises(FormatError) as err:
        load_spike_matrix(path)
    assert err.value.offset == HEADER_SIZE + 2


def test_weight_round_trip_int8(tmp_path):
    rng = np.random.default_rng(3)
    w = WeightMatrix.from_array(rng.integers(-128, 128, size=(5, 7), dtype=np.int64).astype(np.int8))
    path = tmp_path / "w.prsp"
    save_weight_matrix(path, w)
    assert load_weight_matrix(path) == w


def test_weight_round_trip_float32(tmp_path):
    rng = np.random.default_rng(4)
    w = WeightMatrix.from_array(rng.standard_normal((3, 9)).astype(np.float32))
    path = tmp_path / "w.prsp"
    save_weight_matrix(path, w)
    assert load_weight_matrix(path) == w


def test_weight_float64_has_no_file_kind(tmp_path):
    w = WeightMatrix.from_array(np.zeros((2, 2)))
    with pytest.raises(UsageError):
        save_weight_matrix(tmp_path / "w.prsp", w)


def test_kind_mixups_rejected(tmp_path, canonical):
    spike_path = tmp_path / "s.prsp"
    save_spike_matrix(spike_path, canonical)
    with pytest.raises(FormatError) as err:
        load_weight_matrix(spike_path)
    assert err.value.offset == 5
    weight_path = tmp_path / "w.prsp"
    save_weight_matrix(weight_path, WeightMatrix.from_array(np.zeros((2, 2), dtype=np.int8)))
    with pytest.raises(FormatError):
        load_spike_matrix(weight_path)


def test_text_round_trip(tmp_path, canonical):
    path = tmp_path / "c.txt"
    save_spike_text(path, canonical)
    assert path.read_text().splitlines() == CANONICAL_ROWS
    assert load_spike_text(path) == canonical


def test_text_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("10\n1x\n")
    with pytest.raises(FormatError):
        load_spike_text(path)
    path.write_text("\n\n")
    with pytest.raises(FormatError):
        load_spike_text(path)


def test_generate_is_deterministic():
    spec = SynthSpec(kind="bernoulli", m_total=64, k_total=32, density=0.3, seed=99)
    assert generate(spec) == generate(spec)
    other = SynthSpec(kind="bernoulli", m_total=64, k_total=32, density=0.3, seed=100)
    assert generate(spec) != generate(other)


def test_generate_density_extremes():
    zero = generate(SynthSpec(kind="bernoulli", m_total=10, k_total=10, density=0.0, seed=1))
    assert zero.row_popcounts().sum() == 0
    ones = generate(SynthSpec(kind="bernoulli", m_total=10, k_total=10, density=1.0, seed=1))
    assert ones.row_popcounts().sum() == 100


def test_clustered_without_noise_has_few_distinct_rows():
    spec = SynthSpec(
        kind="clustered",
        m_total=128,
        k_total=16,
        density=0.4,
        base_pattern_count=5,
        flip_probability=0.0,
        seed=7,
    )
    matrix = generate(spec)
    distinct = {matrix.row_string(i) for i in range(matrix.rows)}
    assert len(distinct) <= 5


def test_clustered_noise_changes_rows():
    base = dict(kind="clustered", m_total=64, k_total=32, density=0.4, base_pattern_count=2, seed=5)
    clean = generate(SynthSpec(flip_probability=0.0, **base))
    noisy = generate(SynthSpec(flip_probability=0.4, **base))
    assert clean != noisy


def test_synth_spec_validation():
    with pytest.raises(UsageError):
        SynthSpec(kind="uniform", m_total=4, k_total=4, density=0.5)
    with pytest.raises(UsageError):
        SynthSpec(kind="bernoulli", m_total=4, k_total=4, density=1.5)
    with pytest.raises(UsageError):
        SynthSpec(kind="clustered", m_total=4, k_total=4, density=0.5, base_pattern_count=0)
    with pytest.raises(UsageError):
        SynthSpec(kind="clustered", m_total=4, k_total=4, density=0.5, flip_probability=-0.1)
    with pytest.raises(UsageError):
        SynthSpec(kind="bernoulli", m_total=0, k_total=4, density=0.5)


def test_generate_weights_deterministic_and_typed():
    a = generate_weights(8, 4, seed=11, dtype="int8")
    b = generate_weights(8, 4, seed=11, dtype="int8")
    assert a == b
    assert a.data.dtype == np.int8
    f = generate_weights(8, 4, seed=11, dtype="f32")
    assert f.data.dtype == np.float32
    assert np.all(np.abs(f.data) < 1.0)
    with pytest.raises(UsageError):
        generate_weights(8, 4, seed=11, dtype="f64")


def _write_layer(tmp_path, name="l0", m=6, k=4, n=3, with_weights=True):
    rng = np.random.default_rng(7)
    spikes = random_spikes(rng, m, k, 0.5)
    spike_path = tmp_path / f"{name}_s.prsp"
    save_spike_matrix(spike_path, spikes)
    weight_path = None
    if with_weights:
        w = WeightMatrix.from_array(rng.integers(-9, 9, size=(k, n), dtype=np.int64).astype(np.int8))
        weight_path = tmp_path / f"{name}_w.prsp"
        save_weight_matrix(weight_path, w)
    return LayerTrace(name=name, spikes=spike_path, weights=weight_path, M=m, K=k, N=n)


def test_manifest_round_trip(tmp_path):
    traces = [_write_layer(tmp_path, "a"), _write_layer(tmp_path, "b", with_weights=False)]
    manifest = tmp_path / "manifest.json"
    save_manifest(manifest, traces)
    loaded = load_manifest(manifest)
    assert [t.name for t in loaded] == ["a", "b"]
    assert loaded[0].weights is not None
    assert loaded[1].weights is None
    assert (loaded[0].M, loaded[0].K, loaded[0].N) == (6, 4, 3)


def test_manifest_relative_paths(tmp_path):
    trace = _write_layer(tmp_path, "rel")
    manifest = tmp_path / "manifest.json"
    save_manifest(manifest, [trace])
    doc = json.loads(manifest.read_text())
    assert doc["layers"][0]["spikes"] == "rel_s.prsp"


def test_manifest_duplicate_names(tmp_path):
    trace = _write_layer(tmp_path)
    manifest = tmp_path / "manifest.json"
    save_manifest(manifest, [trace, trace])
    with pytest.raises(FormatError, match="duplicate"):
        load_manifest(manifest)


def test_manifest_missing_file(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps({"layers": [{"name": "x", "spikes": "absent.prsp", "M": 1, "K": 1, "N": 1}]})
    )
    with pytest.raises(FormatError, match="absent.prsp"):
        load_manifest(manifest)


def test_manifest_dimension_mismatch(tmp_path):
    trace = _write_layer(tmp_path)
    manifest = tmp_path / "manifest.json"
    save_manifest(
        manifest,
        [LayerTrace(name="x", spikes=trace.spikes, weights=None, M=9, K=4, N=3)],
    )
    with pytest.raises(FormatError, match="x"):
        load_manifest(manifest)


def test_manifest_weight_dimension_mismatch(tmp_path):
    trace = _write_layer(tmp_path)
    manifest = tmp_path / "manifest.json"
    save_manifest(
        manifest,
        [LayerTrace(name="x", spikes=trace.spikes, weights=trace.weights, M=6, K=4, N=99)],
    )
    with pytest.raises(FormatError, match="N=99"):
        load_manifest(manifest)


def test_manifest_bad_json(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text("{not json")
    with pytest.raises(FormatError):
        load_manifest(manifest)
    manifest.write_text(json.dumps({"nope": []}))
    with pytest.raises(FormatError):
        load_manifest(manifest)
    manifest.write_text(json.dumps({"layers": [{"name": "x"}]}))
    with pytest.raises(FormatError, match="missing field"):
        load_manifest(manifest)
