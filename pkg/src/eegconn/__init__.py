"""Multichannel EEG functional connectivity.

Zero-phase filtering, epoching, STFT band power, phase locking value,
phase lag index and magnitude-squared coherence, with 10-5 region mapping
and region-pair summaries of condition differences.
"""
from .connectivity import (
    ConnectivityMatrix,
    ConnectivityParams,
    DifferenceMatrix,
    MetricKind,
    coherence_band,
    condition_difference,
    connectivity_matrices,
    connectivity_matrix,
    pli,
    plv,
    top_pairs,
)
from .dsp import (
    CANONICAL_BANDS,
    BandDefinition,
    CrossSpectrum,
    EpochSet,
    FilterSpec,
    PhaseSeries,
    Recording,
    Spectrogram,
    analytic_phase,
    apply_bandpass,
    apply_notch,
    band_power,
    cross_spectral_density,
    epoch,
    stft,
)
from .kernels import BACKEND
from .montage import Region, RegionMap, build_region_map, parse_label, region_of

__version__ = "0.1.0"
