"""Region-pair summaries of condition-difference matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .connectivity import (
    ConnectivityParams,
    DifferenceMatrix,
    MetricKind,
    condition_difference,
    connectivity_matrices,
)
from .dsp import BandDefinition, EpochSet
from .errors import ConfigurationError, InputError
from .montage import REGION_ORDER, Region, RegionMap

SUMMARY_COLUMNS = (
    "region_a", "region_b", "band", "metric", "connections", "mean_weight", "threshold",
)

DEFAULT_THRESHOLD = 0.02


@dataclass(frozen=True)
class RegionPairSummary:
    """One row: channel pairs between two regions surviving the threshold.

    ``n_pairs`` is the number of channel pairs the region pair spans
    before thresholding. A row with no surviving pairs has ``empty`` set
    and ``mean_weight == 0``.
    """

    region_a: Region
    region_b: Region
    band: str
    metric: MetricKind
    connections: int
    mean_weight: float
    threshold: float
    n_pairs: int = 0

    @property
    def empty(self):
        return self.connections == 0

    @property
    def key(self):
        return (self.region_a, self.region_b)

    def as_row(self):
        return {
            "region_a": str(self.region_a),
            "region_b": str(self.region_b),
            "band": self.band,
            "metric": str(self.metric),
            "connections": self.connections,
            "mean_weight": self.mean_weight,
            "threshold": self.threshold,
        }


def canonical_pair(a: Region, b: Region):
    return (a, b) if a.rank <= b.rank else (b, a)


def restrict(d: DifferenceMatrix, channels: Sequence[str]) -> DifferenceMatrix:
    """Sub-matrix over ``channels`` (kept in the matrix's own order)."""
    wanted = set(channels)
    keep = [i for i, c in enumerate(d.channels) if c in wanted]
    return DifferenceMatrix(
        [d.channels[i] for i in keep], d.band, d.metric, d.condition_a, d.condition_b,
        d.values[np.ix_(keep, keep)],
    )


def region_pair_summary(d: DifferenceMatrix, rm: RegionMap,
                        threshold: float = DEFAULT_THRESHOLD) -> list:
    """Count channel pairs with ``|weight| > threshold`` per unordered region pair."""
    if threshold < 0 or not math.isfinite(threshold):
        raise ConfigurationError(f"threshold must be a finite value >= 0, got {threshold}")
    missing = rm.missing(d.channels)
    if missing:
        raise InputError(f"channels without a region: {', '.join(missing)}")
    rank = np.array([rm[c].rank for c in d.channels], dtype=np.int64)
    iu, ju = np.triu_indices(len(d.channels), 1)
    lo = np.minimum(rank[iu], rank[ju])
    hi = np.maximum(rank[iu], rank[ju])
    vals = d.values[iu, ju]
    survive = np.abs(vals) > threshold
    n_reg = len(REGION_ORDER)
    code = lo * n_reg + hi
    rows = []
    for c in np.unique(code):
        in_pair = code == c
        sel = vals[in_pair & survive]
        n = int(sel.size)
        # exact rational sum, so the mean is correctly rounded
        mean = float(sum(map(Fraction, sel.tolist()), Fraction(0)) / n) if n else 0.0
        rows.append(RegionPairSummary(
            REGION_ORDER[c // n_reg], REGION_ORDER[c % n_reg], d.band.name, d.metric,
            n, mean, float(threshold), int(in_pair.sum()),
        ))
    return rows


@dataclass
class SweepResult:
    rows: list
    matrices: dict = field(default_factory=dict)       # (condition, band, metric) -> ConnectivityMatrix
    differences: dict = field(default_factory=dict)    # (band, metric) -> DifferenceMatrix


def sort_rows(rows, bands: Sequence[BandDefinition], metrics: Sequence):
    band_idx = {b.name: i for i, b in enumerate(bands)}
    metric_idx = {MetricKind.parse(m): i for i, m in enumerate(metrics)}
    return sorted(rows, key=lambda r: (
        band_idx.get(r.band, len(band_idx)), metric_idx.get(r.metric, 0),
        -r.connections, r.region_a.rank, r.region_b.rank,
    ))


def sweep(epochs: Mapping[str, EpochSet], metrics: Sequence, bands: Sequence[BandDefinition],
          rm: RegionMap, threshold: float = DEFAULT_THRESHOLD,
          params: ConnectivityParams | None = None,
          conditions: Sequence[str] | None = None) -> SweepResult:
    """Per band: matrices per condition, difference, region-pair summary.

    The difference is ``conditions[0] - conditions[1]`` (default: the first
    two keys of ``epochs``).
    """
    if conditions is None:
        conditions = list(epochs)[:2]
    if len(conditions) != 2:
        raise InputError(f"need two conditions to compare, got {list(conditions)}")
    for c in conditions:
        if c not in epochs:
            raise InputError(f"condition {c!r} has no epochs")
    if not bands:
        raise ConfigurationError("no bands given")
    metrics = [MetricKind.parse(m) for m in metrics]
    if not metrics:
        raise ConfigurationError("no metrics given")
    ca, cb = conditions
    excluded = set(rm.exclusions)
    channels = [c for c in epochs[ca].channels if c not in excluded]
    for c in conditions:
        if epochs[c].channels != epochs[ca].channels:
            raise InputError("conditions have different channel layouts")
    result = SweepResult(rows=[])
    for band in bands:
        per_cond = {c: connectivity_matrices(epochs[c], metrics, band, params) for c in conditions}
        for m in metrics:
            for c in conditions:
                result.matrices[(c, band.name, m)] = per_cond[c][m]
            diff = restrict(condition_difference(per_cond[ca][m], per_cond[cb][m]), channels)
            result.differences[(band.name, m)] = diff
            result.rows.extend(region_pair_summary(diff, rm, threshold))
    result.rows = sort_rows(result.rows, bands, metrics)
    return result


def band_sweep(epochs: Mapping[str, EpochSet], metrics: Sequence, bands: Sequence[BandDefinition],
               rm: RegionMap, threshold: float = DEFAULT_THRESHOLD,
               params: ConnectivityParams | None = None) -> list:
    """Summary table (rows sorted by band, metric, then descending count)."""
    return sweep(epochs, metrics, bands, rm, threshold, params).rows
