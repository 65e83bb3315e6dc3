import json

import pytest

from eegconn.config import DEFAULTS, from_dict, load_config, load_schema
from eegconn.connectivity import MetricKind
from eegconn.errors import ConfigurationError

from conftest import small_config, write_config


def minimal():
    return {"conditions": [{"name": "a", "path": "a.eegf"}, {"name": "b", "path": "b.eegf"}],
            "output_dir": "out"}


def test_defaults(tmp_path):
    cfg = from_dict(minimal(), tmp_path)
    assert cfg.condition_names == ("a", "b")
    assert cfg.conditions[0].path == tmp_path / "a.eegf"
    assert cfg.output_dir == tmp_path / "out"
    assert [b.name for b in cfg.bands] == ["delta", "theta", "alpha", "beta", "gamma"]
    assert cfg.metrics == (MetricKind.PLV, MetricKind.PLI, MetricKind.COH)
    assert cfg.threshold == 0.02 and cfg.epoch_len_s == 1.5 and cfg.epoch_overlap_s == 0.0
    assert cfg.bandpass.edges == (0.5, 125.0) and cfg.bandpass.order == 4
    assert cfg.notch.edges == (60.0, 120.0) and cfg.notch.q == 35.0
    assert cfg.welch_segments == 8 and cfg.welch_overlap == 0.5
    assert cfg.phase_filter == "dft" and cfg.synth is None
    json.dumps(cfg.echo())


def test_partial_nested_override(tmp_path):
    doc = minimal()
    doc["filter"] = {"notch": [50.0]}
    cfg = from_dict(doc, tmp_path)
    assert cfg.notch.edges == (50.0,) and cfg.bandpass.edges == (0.5, 125.0)
    assert DEFAULTS["filter"]["notch"] == [60.0, 120.0]


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.update(bandz=[]), "<root>"),
    (lambda d: d.update(filter={"bandpas": [1, 2]}), "filter"),
    (lambda d: d.update(bands=[]), "bands"),
    (lambda d: d.update(metrics=["PLV", "wPLI"]), "metrics/1"),
    (lambda d: d.update(threshold=-0.1), "threshold"),
    (lambda d: d["conditions"].append({"name": "c", "path": "c.eegf"}), "conditions"),
    (lambda d: d["conditions"].pop(), "conditions"),
    (lambda d: d.pop("output_dir"), "<root>"),
])
def test_schema_errors(tmp_path, mutate, where):
    doc = minimal()
    mutate(doc)
    with pytest.raises(ConfigurationError) as info:
        from_dict(doc, tmp_path)
    assert f"at {where}:" in str(info.value)


@pytest.mark.parametrize("mutate, match", [
    (lambda d: d["conditions"][1].update(name="a"), "duplicate condition"),
    (lambda d: d.update(bands=[{"name": "x", "lo": 1, "hi": 4}, {"name": "x", "lo": 4, "hi": 8}]),
     "unique"),
    (lambda d: d.update(bands=[{"name": "x", "lo": 8, "hi": 4}]), "below"),
    (lambda d: d.update(filter={"bandpass": [40, 1]}), "below"),
    (lambda d: d.update(epoch={"length_s": 1.0, "overlap_s": 1.0}), "overlap"),
    (lambda d: d.update(synth={"conditions": {"z": {}}}), "not declared"),
])
def test_semantic_errors(tmp_path, mutate, match):
    doc = minimal()
    mutate(doc)
    with pytest.raises(ConfigurationError, match=match):
        from_dict(doc, tmp_path)


def test_load_yaml(tmp_path):
    p = write_config(tmp_path, small_config(tmp_path))
    cfg = load_config(p)
    assert cfg.synth["fs"] == 500.0 and cfg.synth["noise_sigma"] == 0.5
    assert cfg.render_top_k == 20 and cfg.seed == 3


def test_load_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(tmp_path / "missing.yaml")
    p = tmp_path / "bad.yaml"
    p.write_text("conditions: [\n")
    with pytest.raises(ConfigurationError, match="YAML"):
        load_config(p)
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError, match="mapping"):
        load_config(p)


def test_schema_ships_with_package():
    assert load_schema()["additionalProperties"] is False


def test_demo_config_valid():
    from pathlib import Path

    cfg = load_config(Path(__file__).parent.parent / "configs" / "demo.yaml")
    assert cfg.condition_names == ("imagined", "perceived")
    assert len(cfg.synth["channels"]) == 32
