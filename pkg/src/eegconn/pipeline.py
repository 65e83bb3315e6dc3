"""End-to-end orchestration: load, filter, epoch, features, connectivity,
summaries, figures, manifest.

Nothing is written until every computation has succeeded; files are then
staged in a temporary directory and moved into ``output_dir``. A failure
in any stage raises PipelineError naming the stage and leaves no partial
outputs behind.
"""
from __future__ import annotations

import csv
import io as _io
import json
import logging
import os
import platform
import shutil
import tempfile
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__, kernels
from . import io as eio
from .aggregate import sweep
from .config import PipelineConfig, synth_channels
from .connectivity import top_pairs
from .dsp import apply_bandpass, apply_notch, band_power, epoch, stft
from .errors import ConfigurationError, EEGConnError, InputError, PipelineError
from .montage import build_region_map
from .render import render_svg
from .synth import CouplingSpec, generate, index_pairs, index_sources

log = logging.getLogger(__name__)

TOP_PAIRS_K = 10


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    log.info("stage %s", name)
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:  # any failure is reported against its stage
        raise PipelineError(name, exc) from exc
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - t0


@dataclass
class RunReport:
    output_dir: Path
    manifest: dict
    rows: list
    files: list = field(default_factory=list)

    @property
    def summary_path(self):
        return self.output_dir / "summary.csv"


def _band_power_csv(channels, bands, feats):
    # feats: (epochs, channels, windows, bands) -> mean per channel and band
    means = feats.mean(axis=(0, 2))
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["channel"] + [b.name for b in bands])
    for ch, row in zip(channels, means):
        w.writerow([ch] + [repr(float(v)) for v in row])
    return buf.getvalue()


def _npy_bytes(a):
    buf = _io.BytesIO()
    np.save(buf, np.ascontiguousarray(a), allow_pickle=False)
    return buf.getvalue()


def _top_pairs_csv(entries):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "band", "rank", "channel_a", "channel_b", "value"])
    for (metric, band), pairs in entries:
        for rank, ((a, b), v) in enumerate(pairs, start=1):
            w.writerow([metric, band, rank, a, b, repr(float(v))])
    return buf.getvalue()


def _commit(files: dict, output_dir: Path):
    """Stage ``files`` (relative path -> bytes) and move them into place."""
    output_dir = Path(output_dir)
    output_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".eegconn-", dir=output_dir.parent))
    moved = []
    try:
        for rel, blob in files.items():
            p = tmp / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_bytes(blob)
        for rel in files:
            dst = output_dir / rel
            dst.parent.mkdir(parents=True, exist_ok=True)
            os.replace(tmp / rel, dst)
            moved.append(dst)
    except BaseException:
        for p in moved:
            p.unlink(missing_ok=True)
        raise
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    timings = {}
    files = {}
    recs = {}
    inputs = {}

    with _stage("load", timings):
        for c in cfg.conditions:
            rec = eio.load_recording(c.path, cfg.exclude_channels, c.fs, c.name)
            recs[c.name] = rec
            inputs[c.name] = {
                "path": str(c.path),
                "sha256": eio.sha256_file(c.path),
                "n_channels": rec.n_channels,
                "n_samples": rec.n_samples,
                "fs": rec.fs,
            }
        first = recs[cfg.conditions[0].name]
        for name, rec in recs.items():
            if rec.channels != first.channels:
                raise InputError(f"condition {name!r} has a different channel list")
            if rec.fs != first.fs:
                raise InputError(f"condition {name!r} has a different sampling rate")

    with _stage("validate", timings):
        fs = first.fs
        cfg.bandpass.validate(fs)
        cfg.notch.validate(fs)
        for b in cfg.bands:
            if b.hi > fs / 2:
                raise ConfigurationError(f"band {b.name!r} extends beyond Nyquist ({fs / 2} Hz)")
        rm = build_region_map(first.channels, cfg.exclude_channels, cfg.region_overrides)

    with _stage("bandpass", timings):
        recs = {k: apply_bandpass(r, cfg.bandpass) for k, r in recs.items()}
    with _stage("notch", timings):
        recs = {k: apply_notch(r, None, cfg.notch) for k, r in recs.items()}
    with _stage("epoch", timings):
        epochs = {k: epoch(r, cfg.epoch_len_s, cfg.epoch_overlap_s, k) for k, r in recs.items()}
        for k, ep in epochs.items():
            inputs[k]["n_epochs"] = len(ep)
    del recs

    with _stage("band_power", timings):
        win = int(round(cfg.stft_window_s * fs))
        hop = max(1, int(round(cfg.stft_hop_s * fs)))
        for k, ep in epochs.items():
            spec = stft(ep.data, fs, win, hop, cfg.stft_window, cfg.stft_nfft)
            feats = band_power(spec, cfg.bands)
            files[f"features/band_power_{k}.npy"] = _npy_bytes(feats)
            files[f"features/band_power_{k}.csv"] = _band_power_csv(
                ep.channels, cfg.bands, feats).encode()

    with _stage("connectivity", timings):
        result = sweep(epochs, cfg.metrics, cfg.bands, rm, cfg.threshold,
                       cfg.connectivity_params, cfg.condition_names)

    with _stage("summary", timings):
        files["summary.csv"] = eio.format_summary(result.rows).encode()
        files["regions.csv"] = eio.format_region_map(rm).encode()
        tp_entries = []
        for (band, metric), d in result.differences.items():
            files[f"matrices/{metric}_{band}_diff.csv"] = eio.format_matrix(d).encode()
            tp_entries.append(((str(metric), band), top_pairs(d, TOP_PAIRS_K, "positive")))
        for (cond, band, metric), m in result.matrices.items():
            files[f"matrices/{metric}_{band}_{cond}.csv"] = eio.format_matrix(m).encode()
        files["top_pairs.csv"] = _top_pairs_csv(tp_entries).encode()

    if cfg.render_enabled:
        with _stage("render", timings):
            for (band, metric), d in result.differences.items():
                files[f"figures/{metric}_{band}_diff.svg"] = render_svg(
                    d, rm, cfg.render_top_k).encode()
            for (cond, band, metric), m in result.matrices.items():
                files[f"figures/{metric}_{band}_{cond}.svg"] = render_svg(
                    m, rm, cfg.render_top_k).encode()

    best = {}
    for r in result.rows:
        key = f"{r.metric}/{r.band}"
        if key not in best:
            best[key] = r.as_row()
    manifest = {
        "package": {"name": "eegconn", "version": __version__},
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "kernel_backend": kernels.BACKEND,
        "config": json.loads(json.dumps(cfg.echo(), default=str)),
        "inputs": inputs,
        "results": {
            "summary_rows": len(result.rows),
            "contrast": list(cfg.condition_names),
            "top_row_by_metric_band": best,
            "top_pairs": {
                f"{m}/{b}": [[a, bb, v] for (a, bb), v in pairs] for (m, b), pairs in tp_entries
            },
        },
        "outputs": sorted(files) + ["manifest.json"],
    }

    with _stage("write", timings):
        manifest["timings_s"] = {k: round(v, 6) for k, v in timings.items()}
        files["manifest.json"] = (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode()
        _commit(files, cfg.output_dir)

    return RunReport(Path(cfg.output_dir), manifest, result.rows, sorted(files))


def condition_seed(base_seed, index):
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def run_synth(cfg: PipelineConfig) -> list:
    """Write synthetic recordings for every condition listed under ``synth``."""
    if cfg.synth is None:
        raise ConfigurationError("config has no 'synth' section")
    s = cfg.synth
    channels = synth_channels(cfg)
    written = []
    for idx, cond in enumerate(cfg.conditions):
        cs = s["conditions"].get(cond.name, {})
        try:
            spec = CouplingSpec(
                pairs=index_pairs(channels, cs.get("pairs", [])),
                noise_sigma=s["noise_sigma"],
                common_source_groups=index_sources(channels, cs.get("common_sources", [])),
                seed=cs.get("seed", condition_seed(cfg.seed, idx)),
                linewidth_hz=s["linewidth_hz"],
                pink_noise=s["pink_noise"],
            )
            rec = generate(spec, len(channels), s["fs"], s["duration_s"], channels, cond.name)
        except EEGConnError as exc:
            raise PipelineError("synth", exc) from exc
        cond.path.parent.mkdir(parents=True, exist_ok=True)
        eio.save_recording(rec, cond.path)
        written.append(cond.path)
    return written
