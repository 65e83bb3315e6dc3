import json

import numpy as np
import pytest

from eegconn import io as eio
from eegconn import pipeline
from eegconn.aggregate import SUMMARY_COLUMNS
from eegconn.config import from_dict, load_config
from eegconn.errors import PipelineError

from conftest import SMALL_CHANNELS, small_config, write_config


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("run")
    cfg = load_config(write_config(tmp, small_config(tmp)))
    written = pipeline.run_synth(cfg)
    return cfg, written, pipeline.run_pipeline(cfg)


def test_synth_writes_inputs(run):
    cfg, written, _ = run
    assert written == [c.path for c in cfg.conditions]
    rec = eio.load_recording(written[0])
    assert rec.channels == tuple(SMALL_CHANNELS) and rec.fs == 500.0
    assert rec.n_samples == 15000 and rec.condition == "imagined"


def test_outputs(run):
    cfg, _, report = run
    out = cfg.output_dir
    assert report.output_dir == out
    for rel in report.files:
        assert (out / rel).is_file(), rel
    assert {"summary.csv", "regions.csv", "top_pairs.csv", "manifest.json",
            "features/band_power_imagined.npy", "matrices/PLV_theta_diff.csv",
            "matrices/COH_gamma_perceived.csv", "figures/PLI_theta_diff.svg"} <= set(report.files)
    assert len([f for f in report.files if f.startswith("figures/")]) == 45
    assert not [p for p in out.parent.iterdir() if p.name.startswith(".eegconn-")]


def test_summary(run):
    cfg, _, report = run
    text = (cfg.output_dir / "summary.csv").read_text()
    assert text.splitlines()[0] == ",".join(SUMMARY_COLUMNS)
    rows = eio.parse_summary(text)
    assert [(r.key, r.band, r.metric, r.connections) for r in rows] == [
        (r.key, r.band, r.metric, r.connections) for r in report.rows]
    for a, b in zip(rows, report.rows):
        assert a.mean_weight == pytest.approx(b.mean_weight, rel=1e-9, abs=1e-12)
    assert {r.band for r in rows} == {"delta", "theta", "alpha", "beta", "gamma"}
    n = len(SMALL_CHANNELS)
    for band in ("delta", "theta"):
        for metric in ("PLV", "PLI", "COH"):
            sel = [r for r in rows if r.band == band and str(r.metric) == metric]
            d = eio.load_matrix(cfg.output_dir / f"matrices/{metric}_{band}_diff.csv")
            iu = np.triu_indices(n, 1)
            assert sum(r.connections for r in sel) == int(np.sum(np.abs(d.values[iu]) > 0.2))
    theta = [r for r in rows if r.band == "theta" and str(r.metric) == "PLV"]
    assert (str(theta[0].region_a), str(theta[0].region_b)) == ("Frontal", "Frontal")


def test_band_power_features(run):
    cfg, _, _ = run
    feats = np.load(cfg.output_dir / "features/band_power_imagined.npy")
    # 20 epochs of 1.5 s, 250 ms windows with 125 ms hop
    assert feats.shape == (20, len(SMALL_CHANNELS), 11, 5)
    assert np.all(feats >= 0)


def test_manifest(run):
    cfg, _, report = run
    m = json.loads((cfg.output_dir / "manifest.json").read_text())
    assert m == json.loads(json.dumps(report.manifest))
    assert m["package"]["name"] == "eegconn"
    assert set(m["versions"]) == {"python", "numpy", "scipy"}
    assert m["kernel_backend"] in ("cython", "python")
    assert m["config"]["threshold"] == 0.2
    assert m["inputs"]["imagined"]["sha256"] == eio.sha256_file(cfg.conditions[0].path)
    assert m["inputs"]["imagined"]["n_epochs"] == 20
    assert m["results"]["contrast"] == ["imagined", "perceived"]
    assert m["results"]["top_pairs"]["PLV/theta"][0][:2] == ["F3", "F4"]
    assert "manifest.json" in m["outputs"]
    assert set(m["timings_s"]) >= {"load", "connectivity", "render"}


def test_validate_stage_error(tmp_path, run):
    cfg, written, _ = run
    doc = dict(cfg.raw)
    doc.pop("synth")
    doc["conditions"] = [{"name": c.name, "path": str(c.path)} for c in cfg.conditions]
    doc["output_dir"] = str(tmp_path / "out")
    doc["bands"] = [{"name": "hi", "lo": 200, "hi": 300}]
    with pytest.raises(PipelineError) as info:
        pipeline.run_pipeline(from_dict(doc, tmp_path))
    assert info.value.stage == "validate" and "Nyquist" in str(info.value)
    assert not (tmp_path / "out").exists()


def test_load_stage_error(tmp_path):
    cfg = from_dict(small_config(tmp_path), tmp_path)
    with pytest.raises(PipelineError) as info:
        pipeline.run_pipeline(cfg)
    assert info.value.stage == "load"
    assert not cfg.output_dir.exists()


def test_render_failure_leaves_no_outputs(tmp_path, run, monkeypatch):
    cfg, _, _ = run
    doc = dict(cfg.raw)
    doc.pop("synth")
    doc["conditions"] = [{"name": c.name, "path": str(c.path)} for c in cfg.conditions]
    doc["output_dir"] = str(tmp_path / "out")
    doc["bands"] = [{"name": "theta", "lo": 4, "hi": 8}]

    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(pipeline, "render_svg", boom)
    with pytest.raises(PipelineError) as info:
        pipeline.run_pipeline(from_dict(doc, tmp_path))
    assert info.value.stage == "render"
    assert not (tmp_path / "out").exists()


def test_commit_rolls_back(tmp_path, monkeypatch):
    real = pipeline.os.replace
    calls = []

    def flaky(src, dst):
        calls.append(dst)
        if len(calls) == 2:
            raise OSError("no space")
        real(src, dst)

    monkeypatch.setattr(pipeline.os, "replace", flaky)
    with pytest.raises(OSError):
        pipeline._commit({"a.txt": b"1", "sub/b.txt": b"2"}, tmp_path / "out")
    assert not (tmp_path / "out" / "a.txt").exists()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".eegconn-")]


def test_synth_errors(tmp_path):
    doc = small_config(tmp_path)
    doc["synth"]["conditions"]["imagined"]["pairs"][0]["b"] = "Oz"
    with pytest.raises(PipelineError) as info:
        pipeline.run_synth(from_dict(doc, tmp_path))
    assert info.value.stage == "synth"


def test_condition_seed():
    assert pipeline.condition_seed(7, 0) == pipeline.condition_seed(7, 0)
    assert pipeline.condition_seed(7, 0) != pipeline.condition_seed(7, 1)
