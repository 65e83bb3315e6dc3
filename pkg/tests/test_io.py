import json
import struct

import numpy as np
import pytest

from eegconn import io as eio
from eegconn.connectivity import ConnectivityMatrix, DifferenceMatrix, MetricKind
from eegconn.dsp import Recording, get_band
from eegconn.errors import (
    DuplicateLabelError,
    HeaderMismatchError,
    InputError,
    RecordingFormatError,
    TruncatedPayloadError,
)
from eegconn.montage import build_region_map

THETA = get_band("theta")


def small_rec():
    data = np.array([[0.0, 1.5, -2.25, 3.0], [0.0009765625, -0.5, 7.0, 0.125]])
    return Recording(["Fz", "Cz"], data, 250.0, "rest")


class TestBinary:
    def test_round_trip_bit_identical(self, tmp_path):
        rec = small_rec()
        p = tmp_path / "r.eegf"
        eio.save_recording(rec, p)
        back = eio.load_recording(p)
        assert back.channels == rec.channels and back.fs == 250.0 and back.condition == "rest"
        # values are float32-representable, so the round trip is exact
        np.testing.assert_array_equal(back.data, rec.data)
        eio.save_recording(back, tmp_path / "again.eegf")
        assert (tmp_path / "again.eegf").read_bytes() == p.read_bytes()

    def test_layout(self):
        blob = eio.encode_recording(small_rec())
        magic, hlen = struct.unpack_from("<8sI", blob)
        assert magic == b"EEGCF32\x00"
        header = json.loads(blob[12:12 + hlen])
        assert header == {"channels": ["Fz", "Cz"], "condition": "rest", "format_version": 1,
                          "fs": 250.0, "n_samples": 4}
        payload = np.frombuffer(blob[12 + hlen:], dtype="<f4")
        np.testing.assert_array_equal(payload, small_rec().data.ravel())

    def test_truncated_payload(self):
        blob = eio.encode_recording(small_rec())[:-6]
        with pytest.raises(TruncatedPayloadError) as info:
            eio.decode_recording(blob)
        assert (info.value.expected, info.value.actual) == (32, 26)
        assert "32" in str(info.value) and "26" in str(info.value)

    def test_extra_payload(self):
        with pytest.raises(HeaderMismatchError):
            eio.decode_recording(eio.encode_recording(small_rec()) + b"\0" * 4)

    def test_bad_magic(self):
        blob = b"NOTMAGIC" + eio.encode_recording(small_rec())[8:]
        with pytest.raises(RecordingFormatError, match="magic"):
            eio.decode_recording(blob)

    def test_short_and_malformed(self):
        with pytest.raises(RecordingFormatError):
            eio.decode_recording(b"EEG")
        bad = struct.pack("<8sI", eio.MAGIC, 3) + b"{x}"
        with pytest.raises(RecordingFormatError, match="malformed"):
            eio.decode_recording(bad)

    def test_header_missing_key(self):
        h = json.dumps({"channels": ["Cz"], "fs": 100.0}).encode()
        with pytest.raises(HeaderMismatchError, match="n_samples"):
            eio.decode_recording(struct.pack("<8sI", eio.MAGIC, len(h)) + h)

    def test_duplicate_labels_in_header(self):
        h = json.dumps({"channels": ["Cz", "Cz"], "fs": 100.0, "n_samples": 0}).encode()
        with pytest.raises(DuplicateLabelError):
            eio.decode_recording(struct.pack("<8sI", eio.MAGIC, len(h)) + h)

    def test_exclusions(self, tmp_path):
        p = tmp_path / "r.eegf"
        eio.save_recording(small_rec(), p)
        assert eio.load_recording(p, exclude=["Cz"]).channels == ("Fz",)
        with pytest.raises(InputError):
            eio.load_recording(p, exclude=["Cz", "Fz"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            eio.load_recording(tmp_path / "nope.eegf")


class TestCSV:
    def test_round_trip(self, tmp_path, rng):
        rec = Recording(["F3", "F4", "Pz"], rng.standard_normal((3, 50)), 500.0)
        p = tmp_path / "r.csv"
        eio.save_recording(rec, p)
        back = eio.load_recording(p, fs=500.0, condition="x")
        np.testing.assert_array_equal(back.data, rec.data)
        assert back.channels == rec.channels and back.condition == "x"

    def test_needs_fs(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("Cz\n1.0\n")
        with pytest.raises(InputError, match="sampling rate"):
            eio.load_recording(p)

    def test_duplicate_label(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("Cz,Fz,Cz\n1,2,3\n")
        with pytest.raises(DuplicateLabelError) as info:
            eio.load_recording(p, fs=100.0)
        assert info.value.labels == ("Cz",)

    def test_ragged_and_non_numeric(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("Cz,Fz\n1,2\n3\n")
        with pytest.raises(RecordingFormatError, match="row 3"):
            eio.load_recording(p, fs=100.0)
        p.write_text("Cz,Fz\n1,abc\n")
        with pytest.raises(RecordingFormatError):
            eio.load_recording(p, fs=100.0)


class TestMatrix:
    def test_plv_grid(self, tmp_path):
        m = ConnectivityMatrix(["F3", "F4"], THETA, "PLV", "a", np.array([[1.0, 0.4], [0.4, 1.0]]))
        text = eio.format_matrix(m)
        lines = text.splitlines()
        assert lines[0].startswith("# ")
        grid = [ln.split(",") for ln in lines[1:]]
        assert len(grid) == 3 and all(len(r) == 3 for r in grid)
        assert grid[0] == ["", "F3", "F4"]
        assert float(grid[1][1]) == 1.0 and float(grid[2][2]) == 1.0

    def test_save_load(self, tmp_path, rng):
        v = np.triu(rng.uniform(0, 1, (4, 4)), 1)
        v = v + v.T + np.eye(4)
        m = ConnectivityMatrix(["Fp1", "Cz", "O1", "T7"], THETA, MetricKind.COH, "a", v)
        p = tmp_path / "m.csv"
        eio.save_matrix(m, p)
        back = eio.load_matrix(p)
        assert isinstance(back, ConnectivityMatrix)
        assert back.channels == m.channels and back.metric is MetricKind.COH
        assert back.band == THETA and back.condition == "a"
        np.testing.assert_allclose(back.values, v, atol=1e-6)

    def test_difference_metadata(self, tmp_path):
        d = DifferenceMatrix(["F3", "F4"], THETA, "PLI", "imagined", "perceived",
                             np.array([[0.0, -0.3], [-0.3, 0.0]]))
        meta = json.loads(eio.format_matrix(d).splitlines()[0][1:])
        assert meta["kind"] == "difference"
        assert (meta["condition_a"], meta["condition_b"]) == ("imagined", "perceived")
        back = eio.parse_matrix(eio.format_matrix(d))
        assert isinstance(back, DifferenceMatrix) and back.condition_a == "imagined"
        np.testing.assert_array_equal(back.values, d.values)

    def test_bad_text(self):
        with pytest.raises(InputError):
            eio.parse_matrix("no metadata\n")
        meta = '# {"band": "theta", "band_lo": 4, "band_hi": 8, "metric": "PLV"}\n'
        with pytest.raises(InputError, match="labels"):
            eio.parse_matrix(meta + ",a,b\nb,1,0\na,0,1\n")


def test_region_map_round_trip(tmp_path):
    rm = build_region_map(["Fp1", "F3", "Cz", "T7", "P3", "O1"], overrides={"Cz": "Parietal"})
    p = tmp_path / "regions.csv"
    eio.save_region_map(rm, p)
    assert p.read_text().splitlines()[0] == "channel,region"
    assert eio.load_region_map(p).assignments == rm.assignments


def test_region_map_bad_header(tmp_path):
    p = tmp_path / "regions.csv"
    p.write_text("a,b\n")
    with pytest.raises(InputError):
        eio.load_region_map(p)


def test_sha256(tmp_path):
    p = tmp_path / "x"
    p.write_bytes(b"abc")
    assert eio.sha256_file(p) == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
