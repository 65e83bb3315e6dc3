"""File formats: recordings, matrices, region maps, summary tables.

Binary recording layout (all integers little-endian)::

    offset 0    8 bytes   magic b"EEGCF32\\x00"
    offset 8    uint32    header length H in bytes
    offset 12   H bytes   UTF-8 JSON object, keys sorted:
                          {"channels": [...], "condition": str|null,
                           "format_version": 1, "fs": float, "n_samples": int}
    offset 12+H payload   float32 little-endian, channel-major
                          (all samples of channel 0, then channel 1, ...)

The CSV alternative has one header row of channel labels and one row per
sample; the sampling rate must be supplied by the caller.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import struct
from pathlib import Path

import numpy as np

from .aggregate import SUMMARY_COLUMNS, RegionPairSummary
from .connectivity import ConnectivityMatrix, DifferenceMatrix, MetricKind
from .dsp import BandDefinition, Recording
from .errors import (
    DuplicateLabelError,
    HeaderMismatchError,
    InputError,
    RecordingFormatError,
    TruncatedPayloadError,
)
from .montage import Region, RegionMap

MAGIC = b"EEGCF32\x00"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sI")


def _dups(labels):
    seen, dups = set(), []
    for c in labels:
        if c in seen and c not in dups:
            dups.append(c)
        seen.add(c)
    return dups


def encode_recording(rec: Recording) -> bytes:
    header = json.dumps(
        {
            "channels": list(rec.channels),
            "condition": rec.condition,
            "format_version": FORMAT_VERSION,
            "fs": rec.fs,
            "n_samples": rec.n_samples,
        },
        sort_keys=True, separators=(",", ":"),
    ).encode("utf-8")
    payload = np.ascontiguousarray(rec.data, dtype="<f4").tobytes()
    return _PREFIX.pack(MAGIC, len(header)) + header + payload


def save_recording(rec: Recording, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(rec.channels)
            for row in rec.data.T:
                w.writerow([repr(float(v)) for v in row])
        return
    path.write_bytes(encode_recording(rec))


def decode_recording(blob: bytes, source="<bytes>") -> Recording:
    if len(blob) < _PREFIX.size:
        raise RecordingFormatError(f"{source}: file too short for header")
    magic, hlen = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise RecordingFormatError(f"{source}: not a recording file (bad magic)")
    start = _PREFIX.size + hlen
    if len(blob) < start:
        raise RecordingFormatError(f"{source}: header truncated")
    try:
        header = json.loads(blob[_PREFIX.size:start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RecordingFormatError(f"{source}: malformed header ({exc})") from None
    for key in ("channels", "fs", "n_samples"):
        if key not in header:
            raise HeaderMismatchError(f"{source}: header lacks {key!r}")
    channels = [str(c) for c in header["channels"]]
    n = int(header["n_samples"])
    dups = _dups(channels)
    if dups:
        raise DuplicateLabelError(dups)
    expected = len(channels) * n * 4
    actual = len(blob) - start
    if actual < expected:
        raise TruncatedPayloadError(source, expected, actual)
    if actual > expected:
        raise HeaderMismatchError(
            f"{source}: header declares {len(channels)} x {n} samples "
            f"({expected} bytes) but payload has {actual} bytes"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=start, count=len(channels) * n)
    data = data.reshape(len(channels), n).astype(np.float64)
    return Recording(channels, data, float(header["fs"]), header.get("condition"))


def _load_csv(path, fs, condition):
    if fs is None:
        raise InputError(f"{path}: CSV recordings need an explicit sampling rate")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise RecordingFormatError(f"{path}: empty CSV")
    labels = [c.strip() for c in rows[0]]
    dups = _dups(labels)
    if dups:
        raise DuplicateLabelError(dups)
    body = rows[1:]
    for k, r in enumerate(body, start=2):
        if len(r) != len(labels):
            raise RecordingFormatError(
                f"{path}: row {k} has {len(r)} fields, expected {len(labels)}"
            )
    try:
        data = np.array(body, dtype=np.float64).T.reshape(len(labels), len(body))
    except ValueError as exc:
        raise RecordingFormatError(f"{path}: non-numeric sample ({exc})") from None
    return Recording(labels, data, fs, condition)


def load_recording(path, exclude=(), fs=None, condition=None) -> Recording:
    """Read a binary or CSV recording, dropping channels listed in ``exclude``."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    if path.suffix.lower() == ".csv":
        rec = _load_csv(path, fs, condition)
    else:
        rec = decode_recording(path.read_bytes(), str(path))
        if condition is not None and rec.condition != condition:
            rec = Recording(rec.channels, rec.data, rec.fs, condition)
    if exclude:
        rec = rec.drop(exclude)
    if rec.n_channels == 0:
        raise InputError(f"{path}: no channels left after exclusions")
    return rec


def _fmt(v):
    return repr(float(v))


def matrix_metadata(m) -> dict:
    meta = {
        "band": m.band.name,
        "band_hi": m.band.hi,
        "band_lo": m.band.lo,
        "metric": str(m.metric),
    }
    if isinstance(m, DifferenceMatrix):
        meta.update(kind="difference", condition_a=m.condition_a, condition_b=m.condition_b)
    else:
        meta.update(kind="connectivity", condition=m.condition)
    return meta


def format_matrix(m) -> str:
    buf = _io.StringIO()
    buf.write("# " + json.dumps(matrix_metadata(m), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(m.channels))
    for label, row in zip(m.channels, m.values):
        w.writerow([label] + [_fmt(v) for v in row])
    return buf.getvalue()


def save_matrix(m, path) -> None:
    """Write a labelled CSV grid preceded by a ``#`` JSON metadata line."""
    try:
        Path(path).write_text(format_matrix(m))
    except OSError as exc:
        raise OSError(f"cannot write matrix to {path}: {exc}") from exc


def parse_matrix(text: str, source="<text>"):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise InputError(f"{source}: missing '#' metadata line")
    try:
        meta = json.loads(lines[0][1:])
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: bad metadata ({exc})") from None
    rows = list(csv.reader(lines[1:]))
    labels = rows[0][1:]
    if [r[0] for r in rows[1:]] != labels:
        raise InputError(f"{source}: row labels do not match column labels")
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64)
    band = BandDefinition(meta["band"], meta["band_lo"], meta["band_hi"])
    metric = MetricKind.parse(meta["metric"])
    if meta.get("kind") == "difference":
        return DifferenceMatrix(labels, band, metric, meta.get("condition_a"),
                                meta.get("condition_b"), values)
    return ConnectivityMatrix(labels, band, metric, meta.get("condition"), values)


def load_matrix(path):
    return parse_matrix(Path(path).read_text(), str(path))


def format_region_map(rm: RegionMap) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["channel", "region"])
    for ch, r in rm.assignments.items():
        w.writerow([ch, str(r)])
    return buf.getvalue()


def save_region_map(rm: RegionMap, path) -> None:
    Path(path).write_text(format_region_map(rm))


def load_region_map(path) -> RegionMap:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["channel", "region"]:
        raise InputError(f"{path}: expected header 'channel,region'")
    return RegionMap({r[0]: Region.parse(r[1]) for r in rows[1:] if r})


def _fmt_weight(v):
    return format(float(v), ".10g")


def format_summary(rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        w.writerow([
            str(r.region_a), str(r.region_b), r.band, str(r.metric),
            int(r.connections), _fmt_weight(r.mean_weight), format(float(r.threshold), "g"),
        ])
    return buf.getvalue()


def write_summary_csv(rows, path) -> None:
    Path(path).write_text(format_summary(rows))


def parse_summary(text: str) -> list:
    reader = csv.reader(_io.StringIO(text))
    header = next(reader)
    if tuple(header) != SUMMARY_COLUMNS:
        raise InputError(f"unexpected summary header {header}")
    out = []
    for r in reader:
        if not r:
            continue
        out.append(RegionPairSummary(
            Region.parse(r[0]), Region.parse(r[1]), r[2], MetricKind.parse(r[3]),
            int(r[4]), float(r[5]), float(r[6]),
        ))
    return out


def read_summary_csv(path) -> list:
    return parse_summary(Path(path).read_text())


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
