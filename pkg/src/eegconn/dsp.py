"""Signal primitives: recordings, zero-phase filters, epoching, analytic
phase, STFT band power and Welch cross-spectra.

All functions are pure. Arrays held by the containers below are copied on
construction and flagged read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import signal

from .errors import (
    ConfigurationError,
    DegeneratePhaseError,
    DuplicateLabelError,
    EstimationError,
    InputError,
)

WindowLike = Union[str, tuple, np.ndarray, Callable[[int], np.ndarray]]

# Cauchy-Schwarz slack for floating point round-off.
_CS_RTOL = 1e-9


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True, order="C")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Recording:
    """Multichannel time series, ``data`` shaped (n_channels, n_samples)."""

    channels: tuple
    data: np.ndarray
    fs: float
    condition: str | None = None

    def __post_init__(self):
        channels = tuple(str(c) for c in self.channels)
        data = _frozen(self.data)
        if data.ndim != 2:
            raise InputError(f"recording data must be 2-D, got shape {data.shape}")
        if data.shape[0] != len(channels):
            raise InputError(
                f"{len(channels)} channel labels for {data.shape[0]} data rows"
            )
        if data.shape[1] < 2:
            raise InputError("recording needs at least 2 samples")
        if not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise InputError(
                f"non-finite sample in channel {channels[bad[0]]!r} at index {bad[1]}"
            )
        if not np.isfinite(self.fs) or self.fs <= 0:
            raise InputError(f"sampling rate must be positive, got {self.fs}")
        seen, dups = set(), []
        for c in channels:
            if c in seen and c not in dups:
                dups.append(c)
            seen.add(c)
        if dups:
            raise DuplicateLabelError(dups)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def n_channels(self):
        return self.data.shape[0]

    @property
    def n_samples(self):
        return self.data.shape[1]

    @property
    def duration(self):
        return self.n_samples / self.fs

    def with_data(self, data):
        return Recording(self.channels, data, self.fs, self.condition)

    def drop(self, labels):
        """Return a copy without the listed channels (unknown labels ignored)."""
        labels = set(labels)
        keep = [i for i, c in enumerate(self.channels) if c not in labels]
        return Recording(
            [self.channels[i] for i in keep], self.data[keep], self.fs, self.condition
        )


@dataclass(frozen=True)
class FilterSpec:
    """Zero-phase IIR filter design.

    ``kind`` is ``"bandpass"`` (``edges=(lo, hi)``, Butterworth of ``order``)
    or ``"notch"`` (``edges`` = centre frequencies, second-order notch with
    quality factor ``q``).
    """

    kind: str
    edges: tuple = ()
    order: int = 4
    q: float = 35.0

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(float(e) for e in self.edges))
        if self.kind not in ("bandpass", "notch"):
            raise ConfigurationError(f"unknown filter kind {self.kind!r}")
        if int(self.order) != self.order or self.order < 1:
            raise ConfigurationError(f"filter order must be a positive integer, got {self.order}")
        if self.q <= 0:
            raise ConfigurationError(f"notch quality factor must be positive, got {self.q}")

    @classmethod
    def bandpass(cls, lo, hi, order=4):
        return cls("bandpass", (lo, hi), order)

    @classmethod
    def notch(cls, centers=(60.0, 120.0), q=35.0):
        return cls("notch", tuple(centers), 2, q)

    def validate(self, fs):
        nyq = fs / 2.0
        if self.kind == "bandpass":
            if len(self.edges) != 2:
                raise ConfigurationError(f"band-pass needs 2 edges, got {self.edges}")
            lo, hi = self.edges
            if not 0 < lo < hi < nyq:
                raise ConfigurationError(
                    f"band-pass edges must satisfy 0 < {lo} < {hi} < Nyquist ({nyq})"
                )
        else:
            for c in self.edges:
                if not 0 < c < nyq:
                    raise ConfigurationError(
                        f"notch centre {c} Hz must lie in (0, Nyquist={nyq})"
                    )

    def sos(self, fs):
        """Second-order sections for sampling rate ``fs``."""
        self.validate(fs)
        if self.kind == "bandpass":
            return signal.butter(
                self.order, self.edges, btype="bandpass", fs=fs, output="sos"
            )
        sections = [signal.tf2sos(*signal.iirnotch(c, self.q, fs=fs)) for c in self.edges]
        if not sections:
            return np.array([[1.0, 0, 0, 1.0, 0, 0]])
        return np.vstack(sections)


def _min_length(sos):
    # scipy.signal.sosfiltfilt default padlen
    n = 2 * len(sos) + 1 - min((sos[:, 2] == 0).sum(), (sos[:, 5] == 0).sum())
    return 3 * n + 1


def filtfilt(sos, x, axis=-1):
    """Forward-backward filtering along ``axis``.

    Raises InputError when the signal is too short for the edge padding.
    """
    x = np.asarray(x, dtype=np.float64)
    need = _min_length(sos)
    if x.shape[axis] < need:
        raise InputError(
            f"signal of {x.shape[axis]} samples too short for filter "
            f"(needs at least {need})"
        )
    return signal.sosfiltfilt(sos, x, axis=axis)


def apply_bandpass(rec: Recording, spec: FilterSpec) -> Recording:
    if spec.kind != "bandpass":
        raise ConfigurationError(f"apply_bandpass needs a band-pass spec, got {spec.kind!r}")
    return rec.with_data(filtfilt(spec.sos(rec.fs), rec.data))


def apply_notch(rec: Recording, centers: Sequence[float] | None = None,
                spec: FilterSpec | None = None) -> Recording:
    """Remove line noise at ``centers`` (defaults to the spec's own centres)."""
    if spec is None:
        spec = FilterSpec.notch(centers if centers is not None else (60.0, 120.0))
    elif spec.kind != "notch":
        raise ConfigurationError(f"apply_notch needs a notch spec, got {spec.kind!r}")
    elif centers is not None:
        spec = FilterSpec.notch(centers, spec.q)
    if not spec.edges:
        return rec
    return rec.with_data(filtfilt(spec.sos(rec.fs), rec.data))


def bandpass_array(x, fs, lo, hi, order=4, axis=-1):
    """Zero-phase Butterworth band-pass of a plain array."""
    return filtfilt(FilterSpec.bandpass(lo, hi, order).sos(fs), x, axis=axis)


@dataclass(frozen=True, eq=False)
class EpochSet:
    """Equal-length segments, ``data`` shaped (n_epochs, n_channels, n_samples)."""

    data: np.ndarray
    fs: float
    channels: tuple
    epoch_len: float
    condition: str | None = None
    starts: tuple = field(default=())

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 3:
            raise InputError(f"epoch data must be 3-D, got shape {data.shape}")
        channels = tuple(self.channels)
        if data.shape[1] != len(channels):
            raise InputError(f"{len(channels)} labels for {data.shape[1]} channels")
        n = int(round(self.epoch_len * self.fs))
        if data.shape[2] != n:
            raise InputError(
                f"epochs hold {data.shape[2]} samples, expected round(epoch_len*fs) = {n}"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "starts", tuple(int(s) for s in self.starts))

    def __len__(self):
        return self.data.shape[0]

    @property
    def n_samples(self):
        return self.data.shape[2]

    def concatenate(self, other: "EpochSet") -> "EpochSet":
        if other.channels != self.channels or other.fs != self.fs or other.n_samples != self.n_samples:
            raise InputError("cannot concatenate epoch sets with different layouts")
        return EpochSet(
            np.concatenate([self.data, other.data]),
            self.fs,
            self.channels,
            self.epoch_len,
            self.condition,
            self.starts + other.starts,
        )


def epoch(rec: Recording, epoch_len_s: float, overlap_s: float = 0.0,
          condition: str | None = None) -> EpochSet:
    """Cut ``rec`` into fixed-length segments; the trailing remainder is dropped."""
    if epoch_len_s <= 0:
        raise ConfigurationError(f"epoch length must be positive, got {epoch_len_s}")
    length = int(round(epoch_len_s * rec.fs))
    overlap = int(round(overlap_s * rec.fs))
    if overlap < 0 or overlap >= length:
        raise ConfigurationError(
            f"overlap {overlap_s}s must lie in [0, epoch length {epoch_len_s}s)"
        )
    n = rec.n_samples
    if length > n:
        raise InputError(
            f"recording of {n} samples is shorter than one epoch ({length} samples)"
        )
    step = length - overlap
    count = (n - length) // step + 1
    starts = [i * step for i in range(count)]
    data = np.stack([rec.data[:, s:s + length] for s in starts])
    return EpochSet(
        data, rec.fs, rec.channels, epoch_len_s,
        condition if condition is not None else rec.condition, starts,
    )


@dataclass(frozen=True, eq=False)
class BandDefinition:
    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ConfigurationError(
                f"band {self.name!r}: need 0 <= lo < hi, got [{self.lo}, {self.hi})"
            )
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    def __eq__(self, other):
        if not isinstance(other, BandDefinition):
            return NotImplemented
        return (self.name, self.lo, self.hi) == (other.name, other.lo, other.hi)

    def __hash__(self):
        return hash((self.name, self.lo, self.hi))

    def mask(self, freqs):
        """Half-open membership ``lo <= f < hi``."""
        freqs = np.asarray(freqs)
        return (freqs >= self.lo) & (freqs < self.hi)


CANONICAL_BANDS = (
    BandDefinition("delta", 1.0, 4.0),
    BandDefinition("theta", 4.0, 8.0),
    BandDefinition("alpha", 8.0, 12.0),
    BandDefinition("beta", 12.0, 30.0),
    BandDefinition("gamma", 30.0, 45.0),
)


def get_band(name):
    for b in CANONICAL_BANDS:
        if b.name == name:
            return b
    raise ConfigurationError(f"unknown band {name!r}")


@dataclass(frozen=True, eq=False)
class PhaseSeries:
    phases: np.ndarray
    fs: float

    def __post_init__(self):
        p = _frozen(self.phases)
        if p.ndim != 1:
            raise InputError("phase series must be 1-D")
        if not np.all((p > -np.pi) & (p <= np.pi)):
            raise InputError("phases must lie in (-pi, pi]")
        object.__setattr__(self, "phases", p)

    def __len__(self):
        return self.phases.shape[0]


def _analytic_weights(n):
    h = np.zeros(n)
    if n % 2 == 0:
        h[0] = h[n // 2] = 1.0
        h[1:n // 2] = 2.0
    else:
        h[0] = 1.0
        h[1:(n + 1) // 2] = 2.0
    return h


def analytic_signal(x, axis=-1):
    """Analytic signal via the full-length DFT.

    Negative-frequency bins are zeroed and positive ones doubled; DC and (for
    even length) Nyquist keep unit weight.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[axis]
    shape = [1] * x.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(x, axis=axis) * _analytic_weights(n).reshape(shape), axis=axis)


def wrap_phase(phi):
    """Map angles onto (-pi, pi]."""
    phi = np.mod(np.asarray(phi, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    return np.where(phi <= -np.pi, phi + 2 * np.pi, phi)


def check_nonzero(x, axis=-1):
    dead = ~np.any(x != 0, axis=axis)
    if np.any(dead):
        idx = np.argwhere(dead)
        raise DegeneratePhaseError(
            f"all-zero signal at index {tuple(int(i) for i in idx[0])}: phase undefined"
        )


def analytic_phase(x, fs) -> PhaseSeries:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InputError("analytic_phase expects a single-channel epoch")
    if x.shape[0] < 8:
        raise InputError(f"need at least 8 samples, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise InputError("signal contains non-finite samples")
    check_nonzero(x)
    return PhaseSeries(instantaneous_phase(x), fs)


def instantaneous_phase(x, axis=-1):
    """Wrapped phase of the analytic signal for arrays of any rank."""
    z = analytic_signal(x, axis=axis)
    phi = np.angle(z)
    phi[phi <= -np.pi] += 2 * np.pi
    return phi


def unit_phasors(x, axis=-1):
    """``exp(i*phase)`` of the analytic signal, computed without ``angle``.

    Raises DegeneratePhaseError for all-zero rows; isolated zero samples
    get phase 0.
    """
    x = np.asarray(x, dtype=np.float64)
    check_nonzero(x, axis=axis)
    return to_unit(analytic_signal(x, axis=axis))


def bandpass_gain(n, fs, lo, hi, order=4):
    """Squared Butterworth magnitude ``|H(f)|^2`` on an ``n``-point DFT grid.

    This is the response of forward-backward filtering with the same
    design, without its phase (zero) and without edge transients.
    """
    sos = FilterSpec.bandpass(lo, hi, order).sos(fs)
    f = np.abs(np.fft.fftfreq(n, 1.0 / fs))
    _, h = signal.sosfreqz(sos, worN=f, fs=fs)
    return np.abs(h) ** 2


def band_analytic(x, fs, lo, hi, order=4, axis=-1):
    """Analytic signal of ``x`` band-limited to [lo, hi] in one DFT pass.

    The spectrum is weighted by the zero-phase Butterworth response and
    the analytic-signal step weights together, so content that is periodic
    in the window (an integer number of cycles) is treated exactly.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[axis]
    w = bandpass_gain(n, fs, lo, hi, order) * _analytic_weights(n)
    shape = [1] * x.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(x, axis=axis) * w.reshape(shape), axis=axis)


def to_unit(z):
    """Scale to unit modulus; exact zeros map to 1 (phase 0)."""
    mag = np.abs(z)
    zero = mag == 0
    if np.any(zero):
        z = np.where(zero, 1.0, z)
        mag = np.where(zero, 1.0, mag)
    return z / mag


def _window(window_fn: WindowLike, n):
    if callable(window_fn):
        w = np.asarray(window_fn(n), dtype=np.float64)
    elif isinstance(window_fn, (str, tuple)):
        w = signal.get_window(window_fn, n)
    else:
        w = np.asarray(window_fn, dtype=np.float64)
    if w.shape != (n,):
        raise ConfigurationError(f"window must have {n} samples, got shape {w.shape}")
    return w


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """One-sided power; ``power`` is (..., n_windows, n_freqs)."""

    times: np.ndarray
    freqs: np.ndarray
    power: np.ndarray
    fs: float

    def __post_init__(self):
        for name in ("times", "freqs", "power"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.power < 0):
            raise InputError("spectrogram power must be non-negative")
        if self.freqs.size > 1 and np.any(np.diff(self.freqs) <= 0):
            raise InputError("frequencies must be strictly increasing")
        if self.freqs.size and self.freqs[-1] > self.fs / 2 + 1e-9:
            raise InputError("frequencies exceed Nyquist")


def stft(x, fs, window_len=None, hop=None, window_fn: WindowLike = "hann",
         nfft=None) -> Spectrogram:
    """Short-time power spectrum of ``x`` along its last axis.

    Defaults: 250 ms Hann window, 50 % hop, DFT zero-padded to about 1 Hz
    bin spacing. Power is normalised so that the bins of one window sum to
    the energy of the windowed segment, ``sum((w * x) ** 2)``.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if window_len is None:
        window_len = int(round(0.25 * fs))
    window_len = int(window_len)
    if hop is None:
        hop = max(1, window_len // 2)
    hop = int(hop)
    if window_len < 1 or window_len > n:
        raise InputError(f"window of {window_len} samples does not fit a {n}-sample epoch")
    if hop < 1:
        raise ConfigurationError("hop must be at least one sample")
    if nfft is None:
        nfft = max(window_len, int(round(fs)))
    if nfft < window_len:
        raise ConfigurationError("nfft must be at least the window length")
    w = _window(window_fn, window_len)
    frames = np.lib.stride_tricks.sliding_window_view(x, window_len, axis=-1)[..., ::hop, :]
    spec = np.fft.rfft(frames * w, n=nfft, axis=-1)
    power = np.abs(spec) ** 2 / nfft
    if nfft % 2 == 0:
        power[..., 1:-1] *= 2
    else:
        power[..., 1:] *= 2
    starts = np.arange(frames.shape[-2]) * hop
    times = (starts + (window_len - 1) / 2.0) / fs
    freqs = np.fft.rfftfreq(nfft, 1.0 / fs)
    return Spectrogram(times, freqs, power, fs)


def band_power(spec: Spectrogram, bands: Sequence[BandDefinition]) -> np.ndarray:
    """Sum power per band; returns (..., n_windows, n_bands)."""
    cols = []
    for b in bands:
        if b.hi > spec.fs / 2 + 1e-9:
            raise ConfigurationError(f"band {b.name!r} extends beyond Nyquist ({spec.fs / 2} Hz)")
        m = b.mask(spec.freqs)
        if not np.any(m):
            raise ConfigurationError(f"band {b.name!r} [{b.lo}, {b.hi}) contains no frequency bins")
        cols.append(spec.power[..., m].sum(axis=-1))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True, eq=False)
class CrossSpectrum:
    freqs: np.ndarray
    sxy: np.ndarray
    sxx: np.ndarray
    syy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "freqs", _frozen(self.freqs))
        object.__setattr__(self, "sxy", _frozen(self.sxy, np.complex128))
        object.__setattr__(self, "sxx", _frozen(self.sxx))
        object.__setattr__(self, "syy", _frozen(self.syy))
        if np.any(self.sxx < 0) or np.any(self.syy < 0):
            raise EstimationError("auto-spectra must be non-negative")
        bound = self.sxx * self.syy
        if np.any(np.abs(self.sxy) ** 2 > bound * (1 + _CS_RTOL) + 1e-300):
            raise EstimationError("cross-spectrum violates |Sxy|^2 <= Sxx*Syy")


def welch_params(n, n_segments=8, overlap=0.5):
    """Segment length and overlap (samples) giving ``n_segments`` over ``n``."""
    if n_segments < 2:
        raise EstimationError("Welch estimation needs at least 2 segments")
    if not 0 <= overlap < 1:
        raise ConfigurationError(f"segment overlap fraction must lie in [0, 1), got {overlap}")
    seg_len = int(np.floor(n / (1 + (n_segments - 1) * (1 - overlap))))
    seg_overlap = int(round(seg_len * overlap))
    while seg_len > 1 and (n - seg_len) // (seg_len - seg_overlap) + 1 < n_segments:
        seg_len -= 1
        seg_overlap = int(round(seg_len * overlap))
    return seg_len, seg_overlap


def segment_spectra(x, fs, seg_len, seg_overlap, window_fn: WindowLike = "hann"):
    """Scaled windowed segment DFTs, shape (..., n_segments, n_freqs).

    Scaling matches a one-sided density estimate, so that the segment mean
    of ``conj(X) * Y`` is the Welch cross-spectral density.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    seg_len, seg_overlap = int(seg_len), int(seg_overlap)
    if seg_len < 2 or seg_len > n:
        raise InputError(f"segment length {seg_len} does not fit a {n}-sample signal")
    if not 0 <= seg_overlap < seg_len:
        raise ConfigurationError("segment overlap must lie in [0, seg_len)")
    step = seg_len - seg_overlap
    n_seg = (n - seg_len) // step + 1
    if n_seg < 2:
        raise EstimationError(
            f"only {n_seg} segment(s) fit; coherence would be identically 1"
        )
    w = _window(window_fn, seg_len)
    frames = np.lib.stride_tricks.sliding_window_view(x, seg_len, axis=-1)[..., ::step, :]
    spec = np.fft.rfft(frames * w, axis=-1)
    scale = np.full(spec.shape[-1], 1.0 / (fs * np.sum(w ** 2)))
    if seg_len % 2 == 0:
        scale[1:-1] *= 2
    else:
        scale[1:] *= 2
    freqs = np.fft.rfftfreq(seg_len, 1.0 / fs)
    return freqs, spec * np.sqrt(scale)


def cross_spectral_density(x, y, fs, seg_len=None, seg_overlap=None,
                           window_fn: WindowLike = "hann") -> CrossSpectrum:
    """Welch-averaged cross and auto spectra of two equal-length signals."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise InputError(f"need two equal-length 1-D signals, got {x.shape} and {y.shape}")
    if seg_len is None:
        seg_len, default_overlap = welch_params(x.shape[0])
        if seg_overlap is None:
            seg_overlap = default_overlap
    if seg_overlap is None:
        seg_overlap = int(seg_len) // 2
    freqs, xs = segment_spectra(x, fs, seg_len, seg_overlap, window_fn)
    _, ys = segment_spectra(y, fs, seg_len, seg_overlap, window_fn)
    sxy = np.mean(np.conj(xs) * ys, axis=0)
    sxx = np.mean(np.abs(xs) ** 2, axis=0)
    syy = np.mean(np.abs(ys) ** 2, axis=0)
    return CrossSpectrum(freqs, sxy, sxx, syy)
