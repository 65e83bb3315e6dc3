"""Seeded synthetic recordings with known coupling.

Oscillators are cosines whose phase performs a random walk, giving a
Lorentzian line of width ``linewidth_hz`` around the carrier frequency.
Two independent oscillators therefore drift apart in phase, while a
coupled channel receives a phase-shifted copy of its driver:

    b = strength * cos(psi_a - lag) + (1 - strength) * cos(psi_b) + noise

Noise is white Gaussian (or 1/f when ``pink_noise`` is set). Every
channel's noise and every oscillator draw from their own child of the
spec's seed, so output is bit-identical for identical specs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dsp import Recording, epoch
from .errors import ConfigurationError


@dataclass(frozen=True)
class CoupledPair:
    a: int
    b: int
    freq: float = 6.0
    lag: float = np.pi / 4
    strength: float = 1.0


@dataclass(frozen=True)
class CommonSource:
    """One zero-lag source mixed into several channels."""

    channels: tuple
    freq: float = 6.0
    gains: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(int(c) for c in self.channels))
        if self.gains is not None:
            gains = tuple(float(g) for g in self.gains)
            if len(gains) != len(self.channels):
                raise ConfigurationError("common source needs one gain per channel")
            object.__setattr__(self, "gains", gains)


def _as_pair(p):
    if isinstance(p, CoupledPair):
        return p
    if isinstance(p, dict):
        return CoupledPair(**p)
    return CoupledPair(*p)


def _as_source(s):
    if isinstance(s, CommonSource):
        return s
    if isinstance(s, dict):
        return CommonSource(**s)
    return CommonSource(tuple(s))


@dataclass(frozen=True)
class CouplingSpec:
    pairs: tuple = ()
    noise_sigma: float = 0.5
    common_source_groups: tuple = ()
    seed: int = 0
    linewidth_hz: float = 2.0
    pink_noise: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(_as_pair(p) for p in self.pairs))
        object.__setattr__(
            self, "common_source_groups",
            tuple(_as_source(s) for s in self.common_source_groups),
        )
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be non-negative")
        if self.linewidth_hz < 0:
            raise ConfigurationError("linewidth_hz must be non-negative")
        for p in self.pairs:
            if not 0 <= p.strength <= 1:
                raise ConfigurationError(f"coupling strength {p.strength} outside [0, 1]")
            if p.a == p.b:
                raise ConfigurationError(f"pair couples channel {p.a} to itself")

    def validate(self, n_channels, fs):
        nyq = fs / 2
        for p in self.pairs:
            for ch in (p.a, p.b):
                if not 0 <= ch < n_channels:
                    raise ConfigurationError(
                        f"channel index {ch} out of range for {n_channels} channels"
                    )
            if not 0 < p.freq < nyq:
                raise ConfigurationError(f"carrier {p.freq} Hz must lie below Nyquist ({nyq})")
        for s in self.common_source_groups:
            for ch in s.channels:
                if not 0 <= ch < n_channels:
                    raise ConfigurationError(
                        f"channel index {ch} out of range for {n_channels} channels"
                    )
            if not 0 < s.freq < nyq:
                raise ConfigurationError(f"carrier {s.freq} Hz must lie below Nyquist ({nyq})")


def _oscillator_phase(rng, freq, n, fs, linewidth_hz):
    t = np.arange(n) / fs
    psi = 2 * np.pi * freq * t + rng.uniform(-np.pi, np.pi)
    if linewidth_hz > 0:
        step = np.sqrt(2 * np.pi * linewidth_hz / fs)
        psi = psi + np.cumsum(rng.standard_normal(n) * step)
    return psi


def _noise(rng, n, sigma, pink):
    if sigma == 0:
        return np.zeros(n)
    w = rng.standard_normal(n)
    if pink:
        spec = np.fft.rfft(w)
        f = np.arange(spec.size, dtype=np.float64)
        f[0] = np.inf
        w = np.fft.irfft(spec / np.sqrt(f), n)
        w /= w.std()
    return sigma * w


def default_labels(n_channels):
    return [f"ch{i:03d}" for i in range(n_channels)]


def generate(spec: CouplingSpec, n_channels: int, fs: float, duration_s: float,
             channels: Sequence[str] | None = None,
             condition: str | None = None) -> Recording:
    """Synthetic recording realising ``spec``."""
    if n_channels < 1:
        raise ConfigurationError("need at least one channel")
    if fs <= 0 or duration_s <= 0:
        raise ConfigurationError("fs and duration must be positive")
    spec.validate(n_channels, fs)
    if channels is None:
        channels = default_labels(n_channels)
    if len(channels) != n_channels:
        raise ConfigurationError(f"{len(channels)} labels for {n_channels} channels")
    n = int(round(duration_s * fs))

    noise_seeds = np.random.SeedSequence([spec.seed, 0]).spawn(n_channels)
    data = np.stack([
        _noise(np.random.default_rng(s), n, spec.noise_sigma, spec.pink_noise)
        for s in noise_seeds
    ])

    osc_root = np.random.SeedSequence([spec.seed, 1])
    n_osc = 2 * len(spec.pairs) + len(spec.common_source_groups)
    osc_rngs = iter([np.random.default_rng(s) for s in osc_root.spawn(n_osc)])

    drivers = {}
    for p in spec.pairs:
        # Each pair consumes exactly two oscillator streams so later pairs
        # keep their randomness when earlier ones change.
        rng_a, rng_b = next(osc_rngs), next(osc_rngs)
        key = (p.a, p.freq)
        if key not in drivers:
            drivers[key] = _oscillator_phase(rng_a, p.freq, n, fs, spec.linewidth_hz)
            data[p.a] += np.cos(drivers[key])
        psi_a = drivers[key]
        own = _oscillator_phase(rng_b, p.freq, n, fs, spec.linewidth_hz)
        data[p.b] += p.strength * np.cos(psi_a - p.lag) + (1 - p.strength) * np.cos(own)

    for src in spec.common_source_groups:
        psi = _oscillator_phase(next(osc_rngs), src.freq, n, fs, spec.linewidth_hz)
        carrier = np.cos(psi)
        gains = src.gains or (1.0,) * len(src.channels)
        for ch, g in zip(src.channels, gains):
            data[ch] += g * carrier

    return Recording(list(channels), data, fs, condition)


@dataclass(frozen=True)
class SynthLayout:
    channels: tuple
    fs: float = 1000.0
    duration_s: float = 90.0
    epoch_len_s: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))


def generate_condition_pair(spec_a: CouplingSpec, spec_b: CouplingSpec, layout: SynthLayout,
                            names: Sequence[str] = ("a", "b"),
                            layout_b: SynthLayout | None = None):
    """Two epoch sets over one layout, differing only in their coupling specs."""
    if layout_b is not None and layout_b != layout:
        raise ConfigurationError("condition layouts differ")
    out = []
    for spec, name in zip((spec_a, spec_b), names):
        rec = generate(spec, len(layout.channels), layout.fs, layout.duration_s,
                       layout.channels, name)
        out.append(epoch(rec, layout.epoch_len_s, 0.0, name))
    return tuple(out)


def index_pairs(channels: Sequence[str], pairs):
    """Translate label-based pairs ``(label_a, label_b, ...)`` to indices."""
    pos = {c: i for i, c in enumerate(channels)}
    out = []
    for p in pairs:
        p = dict(p) if isinstance(p, dict) else dict(zip(("a", "b", "freq", "lag", "strength"), p))
        for k in ("a", "b"):
            if isinstance(p[k], str):
                if p[k] not in pos:
                    raise ConfigurationError(f"unknown channel {p[k]!r} in coupling spec")
                p[k] = pos[p[k]]
        out.append(CoupledPair(**p))
    return out


def index_sources(channels: Sequence[str], sources):
    pos = {c: i for i, c in enumerate(channels)}
    out = []
    for s in sources:
        s = dict(s)
        idx = []
        for c in s["channels"]:
            if isinstance(c, str):
                if c not in pos:
                    raise ConfigurationError(f"unknown channel {c!r} in common source")
                c = pos[c]
            idx.append(c)
        s["channels"] = tuple(idx)
        out.append(CommonSource(**s))
    return out


__all__ = [
    "CoupledPair", "CommonSource", "CouplingSpec", "SynthLayout",
    "generate", "generate_condition_pair", "index_pairs", "index_sources", "default_labels",
]
