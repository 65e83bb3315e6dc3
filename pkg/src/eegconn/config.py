"""Pipeline configuration (YAML or JSON), validated against a JSON schema.

Unknown keys anywhere in the document are rejected. Relative paths are
resolved against the directory containing the config file.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import yaml

from .connectivity import ConnectivityParams, MetricKind
from .dsp import CANONICAL_BANDS, BandDefinition, FilterSpec
from .errors import ConfigurationError
from .montage import DEFAULT_EXCLUSIONS, STANDARD_10_5_128

DEFAULTS = {
    "exclude_channels": list(DEFAULT_EXCLUSIONS),
    "filter": {
        "bandpass": [0.5, 125.0],
        "bandpass_order": 4,
        "notch": [60.0, 120.0],
        "notch_q": 35.0,
        "band_order": 4,
        "phase_filter": "dft",
    },
    "epoch": {"length_s": 1.5, "overlap_s": 0.0},
    "stft": {"window_s": 0.25, "hop_s": 0.125, "window": "hann"},
    "welch": {"n_segments": 8, "overlap": 0.5, "window": "hann"},
    "bands": [{"name": b.name, "lo": b.lo, "hi": b.hi} for b in CANONICAL_BANDS],
    "metrics": ["PLV", "PLI", "COH"],
    "threshold": 0.02,
    "region_overrides": {},
    "seed": 0,
    "render": {"enabled": True, "top_k": 200},
}

SYNTH_DEFAULTS = {
    "fs": 1000.0,
    "duration_s": 90.0,
    "channels": "standard_128",
    "noise_sigma": 0.5,
    "linewidth_hz": 2.0,
    "pink_noise": False,
    "conditions": {},
}


def load_schema() -> dict:
    text = resources.files("eegconn").joinpath("config_schema.json").read_text()
    return json.loads(text)


def _merge(defaults, given):
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and out[k]:
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ConditionInput:
    name: str
    path: Path
    fs: float | None = None


@dataclass(frozen=True)
class PipelineConfig:
    conditions: tuple
    output_dir: Path
    exclude_channels: tuple
    bandpass: FilterSpec
    notch: FilterSpec
    band_order: int
    phase_filter: str
    epoch_len_s: float
    epoch_overlap_s: float
    stft_window_s: float
    stft_hop_s: float
    stft_window: str
    stft_nfft: int | None
    welch_segments: int
    welch_overlap: float
    welch_window: str
    bands: tuple
    metrics: tuple
    threshold: float
    region_overrides: dict
    seed: int
    render_enabled: bool
    render_top_k: int
    synth: dict | None
    raw: dict = field(repr=False)
    base_dir: Path = Path(".")

    @property
    def connectivity_params(self):
        return ConnectivityParams(
            filter_order=self.band_order,
            phase_filter=self.phase_filter,
            welch_segments=self.welch_segments,
            welch_overlap=self.welch_overlap,
            welch_window=self.welch_window,
        )

    @property
    def condition_names(self):
        return tuple(c.name for c in self.conditions)

    def echo(self) -> dict:
        """Fully defaulted config as plain JSON-compatible data."""
        return copy.deepcopy(self.raw)


def _resolve(base, p):
    p = Path(p)
    return p if p.is_absolute() else (base / p)


def from_dict(doc: dict, base_dir=".") -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a mapping at top level")
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigurationError(f"config error at {where}: {exc.message}") from None
    raw = _merge(DEFAULTS, doc)
    if "synth" in doc:
        raw["synth"] = _merge(SYNTH_DEFAULTS, doc["synth"])
    base = Path(base_dir)

    names = [c["name"] for c in raw["conditions"]]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"duplicate condition names: {names}")
    conditions = tuple(
        ConditionInput(c["name"], _resolve(base, c["path"]), c.get("fs")) for c in raw["conditions"]
    )
    bands = []
    for b in raw["bands"]:
        if not b["lo"] < b["hi"]:
            raise ConfigurationError(f"band {b['name']!r}: lo must be below hi")
        bands.append(BandDefinition(b["name"], b["lo"], b["hi"]))
    if len({b.name for b in bands}) != len(bands):
        raise ConfigurationError("band names must be unique")
    f = raw["filter"]
    lo, hi = f["bandpass"]
    if not lo < hi:
        raise ConfigurationError("filter.bandpass: low edge must be below high edge")
    ep = raw["epoch"]
    if ep["overlap_s"] >= ep["length_s"]:
        raise ConfigurationError("epoch.overlap_s must be shorter than epoch.length_s")
    synth = raw.get("synth")
    if synth is not None:
        unknown = set(synth["conditions"]) - set(names)
        if unknown:
            raise ConfigurationError(f"synth conditions not declared in conditions: {sorted(unknown)}")
    st = raw["stft"]
    return PipelineConfig(
        conditions=conditions,
        output_dir=_resolve(base, raw["output_dir"]),
        exclude_channels=tuple(raw["exclude_channels"]),
        bandpass=FilterSpec.bandpass(lo, hi, f["bandpass_order"]),
        notch=FilterSpec.notch(f["notch"], f["notch_q"]),
        band_order=f["band_order"],
        phase_filter=f["phase_filter"],
        epoch_len_s=ep["length_s"],
        epoch_overlap_s=ep["overlap_s"],
        stft_window_s=st["window_s"],
        stft_hop_s=st["hop_s"],
        stft_window=st["window"],
        stft_nfft=st.get("nfft"),
        welch_segments=raw["welch"]["n_segments"],
        welch_overlap=raw["welch"]["overlap"],
        welch_window=raw["welch"]["window"],
        bands=tuple(bands),
        metrics=tuple(MetricKind.parse(m) for m in raw["metrics"]),
        threshold=float(raw["threshold"]),
        region_overrides=dict(raw["region_overrides"]),
        seed=raw["seed"],
        render_enabled=raw["render"]["enabled"],
        render_top_k=raw["render"]["top_k"],
        synth=synth,
        raw=raw,
        base_dir=base,
    )


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: invalid YAML ({exc})") from None
    return from_dict(doc, path.parent)


def synth_channels(cfg: PipelineConfig):
    ch = cfg.synth["channels"]
    return list(STANDARD_10_5_128) if ch == "standard_128" else list(ch)
