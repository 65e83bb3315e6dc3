"""Pairwise phase synchrony (PLV, PLI) and band coherence.

Matrices are computed per epoch and averaged across epochs. PLV and PLI
use the analytic phase of the band-passed epoch; coherence uses Welch
spectra of the unfiltered epoch restricted to the band's bins.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .dsp import (
    BandDefinition,
    CrossSpectrum,
    EpochSet,
    PhaseSeries,
    band_analytic,
    bandpass_array,
    check_nonzero,
    segment_spectra,
    to_unit,
    unit_phasors,
    welch_params,
)
from .errors import ConfigurationError, EstimationError, InputError

_SYM_ATOL = 1e-12
PHASE_FILTERS = ("dft", "filtfilt")


class MetricKind(str, Enum):
    PLV = "PLV"
    PLI = "PLI"
    COH = "COH"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text):
        try:
            return cls(str(text).upper())
        except ValueError:
            raise ConfigurationError(f"unknown metric {text!r}") from None

    @property
    def diagonal(self):
        return 0.0 if self is MetricKind.PLI else 1.0


def _check_square(values, channels):
    values = np.array(values, dtype=np.float64)
    n = len(channels)
    if values.shape != (n, n):
        raise InputError(f"matrix shape {values.shape} does not match {n} channels")
    if not np.allclose(values, values.T, rtol=0, atol=_SYM_ATOL):
        raise InputError("connectivity matrix must be symmetric")
    values = (values + values.T) / 2
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ConnectivityMatrix:
    channels: tuple
    band: BandDefinition
    metric: MetricKind
    condition: str | None
    values: np.ndarray

    def __post_init__(self):
        channels = tuple(self.channels)
        metric = MetricKind.parse(self.metric)
        values = np.array(_check_square(self.values, channels))
        off = ~np.eye(len(channels), dtype=bool)
        if np.any(values[off] < -1e-9) or np.any(values[off] > 1 + 1e-9):
            raise InputError("connectivity values must lie in [0, 1]")
        np.clip(values, 0.0, 1.0, out=values)
        np.fill_diagonal(values, metric.diagonal)
        values.setflags(write=False)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class DifferenceMatrix:
    """Elementwise ``condition_a - condition_b``."""

    channels: tuple
    band: BandDefinition
    metric: MetricKind
    condition_a: str | None
    condition_b: str | None
    values: np.ndarray

    def __post_init__(self):
        channels = tuple(self.channels)
        values = _check_square(self.values, channels)
        if np.any(np.abs(values) > 1 + 1e-9):
            raise InputError("difference values must lie in [-1, 1]")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class ConnectivityParams:
    """Estimation settings shared by all metrics.

    ``filter_order`` is the Butterworth order of the per-band filter applied
    before phase extraction. ``phase_filter`` selects how it is applied:
    ``"dft"`` weights the epoch's DFT by the zero-phase response inside the
    analytic-signal step, ``"filtfilt"`` runs forward-backward filtering on
    each epoch first. The Welch settings drive coherence.
    """

    filter_order: int = 4
    welch_segments: int = 8
    welch_overlap: float = 0.5
    welch_window: str = "hann"
    tie_tol: float = kernels.TIE_TOL
    phase_filter: str = "dft"

    def __post_init__(self):
        if self.phase_filter not in PHASE_FILTERS:
            raise ConfigurationError(
                f"phase_filter must be one of {PHASE_FILTERS}, got {self.phase_filter!r}"
            )


def _phases(p):
    if isinstance(p, PhaseSeries):
        return p.phases
    return np.asarray(p, dtype=np.float64)


def _pair(px, py):
    a, b = _phases(px), _phases(py)
    if a.ndim != 1 or a.shape != b.shape:
        raise InputError(f"phase series lengths differ: {a.shape} vs {b.shape}")
    if a.shape[0] < 1:
        raise InputError("phase series must be non-empty")
    return a, b


def plv(px, py) -> float:
    """Phase locking value ``|mean(exp(i*(phi_x - phi_y)))|``."""
    a, b = _pair(px, py)
    return float(min(1.0, np.abs(np.mean(np.exp(1j * (a - b))))))


def pli(px, py, tie_tol=kernels.TIE_TOL) -> float:
    """Phase lag index ``|mean(sgn(sin(phi_x - phi_y)))|``.

    ``|sin|`` at or below ``tie_tol`` counts as zero so that round-off
    between identical phases does not register as a lag.
    """
    a, b = _pair(px, py)
    d = np.sin(a - b)
    sgn = (d > tie_tol).astype(np.int64) - (d < -tie_tol).astype(np.int64)
    return float(abs(sgn.sum()) / a.shape[0])


def coherence_band(cs: CrossSpectrum, band: BandDefinition) -> float:
    """Mean magnitude-squared coherence over the band's bins.

    Bins with zero auto-spectral power are skipped.
    """
    m = band.mask(cs.freqs)
    if not np.any(m):
        raise ConfigurationError(f"band {band.name!r} contains no frequency bins")
    denom = cs.sxx[m] * cs.syy[m]
    ok = denom > 0
    if not np.any(ok):
        raise EstimationError(f"all bins in band {band.name!r} have zero power")
    coh = np.abs(cs.sxy[m][ok]) ** 2 / denom[ok]
    return float(min(1.0, np.mean(coh)))


def band_phasors(ep: EpochSet, band: BandDefinition, params: ConnectivityParams | None = None):
    """Unit analytic phasors of the band-passed epochs, (n_epochs, n_ch, n_samples)."""
    params = params or ConnectivityParams()
    if params.phase_filter == "filtfilt":
        x = bandpass_array(ep.data, ep.fs, band.lo, band.hi, params.filter_order)
        return unit_phasors(x)
    check_nonzero(ep.data)
    return to_unit(band_analytic(ep.data, ep.fs, band.lo, band.hi, params.filter_order))


def coherence_values(ep: EpochSet, band: BandDefinition,
                     params: ConnectivityParams | None = None) -> np.ndarray:
    """Epoch-averaged band coherence for all channel pairs."""
    params = params or ConnectivityParams()
    seg_len, seg_overlap = welch_params(ep.n_samples, params.welch_segments, params.welch_overlap)
    freqs = np.fft.rfftfreq(seg_len, 1.0 / ep.fs)
    m = band.mask(freqs)
    if not np.any(m):
        raise ConfigurationError(
            f"band {band.name!r} contains no frequency bins at "
            f"{ep.fs / seg_len:.3g} Hz resolution"
        )
    n_ch = len(ep.channels)
    acc = np.zeros((n_ch, n_ch))
    for e in range(len(ep)):
        _, spec = segment_spectra(ep.data[e], ep.fs, seg_len, seg_overlap, params.welch_window)
        xb = spec[..., m]  # (channels, segments, bins)
        sxy = np.einsum("ckb,dkb->cdb", np.conj(xb), xb) / xb.shape[1]
        auto = np.real(np.einsum("ckb,ckb->cb", np.conj(xb), xb)) / xb.shape[1]
        denom = auto[:, None, :] * auto[None, :, :]
        ok = denom > 0
        n_ok = ok.sum(axis=-1)
        if np.any(n_ok == 0):
            i, j = np.argwhere(n_ok == 0)[0]
            raise EstimationError(
                f"channels {ep.channels[i]!r}/{ep.channels[j]!r} have no power in band {band.name!r}"
            )
        coh = np.where(ok, np.abs(sxy) ** 2 / np.where(ok, denom, 1.0), 0.0)
        acc += coh.sum(axis=-1) / n_ok
    acc /= len(ep)
    np.clip(acc, 0.0, 1.0, out=acc)
    np.fill_diagonal(acc, 1.0)
    return (acc + acc.T) / 2


def connectivity_matrices(ep: EpochSet, metrics: Iterable, band: BandDefinition,
                          params: ConnectivityParams | None = None,
                          backend: str | None = None) -> dict:
    """Several metrics for one band, sharing the filtering and phase work."""
    params = params or ConnectivityParams()
    metrics = [MetricKind.parse(m) for m in metrics]
    if len(ep) == 0:
        raise InputError("epoch set is empty")
    out = {}
    if MetricKind.PLV in metrics or MetricKind.PLI in metrics:
        z = band_phasors(ep, band, params)
        plv_v, pli_v = kernels.phase_sync(z, params.tie_tol, backend=backend)
        out[MetricKind.PLV] = plv_v
        out[MetricKind.PLI] = pli_v
    if MetricKind.COH in metrics:
        out[MetricKind.COH] = coherence_values(ep, band, params)
    return {
        m: ConnectivityMatrix(ep.channels, band, m, ep.condition, out[m]) for m in metrics
    }


def connectivity_matrix(ep: EpochSet, metric, band: BandDefinition,
                        params: ConnectivityParams | None = None,
                        backend: str | None = None) -> ConnectivityMatrix:
    metric = MetricKind.parse(metric)
    return connectivity_matrices(ep, [metric], band, params, backend)[metric]


def condition_difference(a: ConnectivityMatrix, b: ConnectivityMatrix) -> DifferenceMatrix:
    if a.channels != b.channels:
        raise InputError("matrices have different channel lists")
    if a.band != b.band:
        raise InputError(f"band mismatch: {a.band.name} vs {b.band.name}")
    if a.metric != b.metric:
        raise InputError(f"metric mismatch: {a.metric} vs {b.metric}")
    return DifferenceMatrix(
        a.channels, a.band, a.metric, a.condition, b.condition, a.values - b.values
    )


_SIGN_KEYS = {
    "positive": lambda v: -v,
    "negative": lambda v: v,
    "absolute": lambda v: -abs(v),
}


def top_pairs(d, k: int, sign: str = "absolute") -> list:
    """The ``k`` most extreme channel pairs as ``((a, b), value)``.

    Each unordered pair appears once with its labels in lexicographic
    order; ties are broken by that label pair.
    """
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    try:
        key = _SIGN_KEYS[sign]
    except KeyError:
        raise ConfigurationError(f"sign must be one of {sorted(_SIGN_KEYS)}, got {sign!r}") from None
    values = d.values
    channels = d.channels
    iu, ju = np.triu_indices(len(channels), 1)
    rows = []
    for i, j in zip(iu.tolist(), ju.tolist()):
        a, b = sorted((channels[i], channels[j]))
        v = float(values[i, j])
        rows.append((key(v), a, b, v))
    rows.sort()
    return [((a, b), v) for _, a, b, v in rows[:k]]


def metric_names(metrics: Sequence) -> list:
    return [str(MetricKind.parse(m)) for m in metrics]
