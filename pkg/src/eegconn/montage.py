"""10-5 electrode labels and their cortical regions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import ClassificationError, InputError, LabelParseError


class Region(str, Enum):
    PREFRONTAL = "Prefrontal"
    FRONTAL = "Frontal"
    CENTRAL = "Central"
    TEMPORAL = "Temporal"
    PARIETAL = "Parietal"
    OCCIPITAL = "Occipital"

    def __str__(self):
        return self.value

    @property
    def rank(self):
        return REGION_ORDER.index(self)

    @classmethod
    def parse(cls, text):
        for r in cls:
            if r.value.lower() == str(text).strip().lower():
                return r
        raise InputError(f"unknown region {text!r}")


REGION_ORDER = tuple(Region)

# Anterior-posterior rule table keyed by upper-case prefix.
PREFIX_REGIONS = {
    "FP": Region.PREFRONTAL,
    "AFP": Region.PREFRONTAL,
    "AF": Region.FRONTAL,
    "F": Region.FRONTAL,
    "AFF": Region.FRONTAL,
    "FFC": Region.FRONTAL,
    "FC": Region.CENTRAL,
    "C": Region.CENTRAL,
    "CP": Region.CENTRAL,
    "FCC": Region.CENTRAL,
    "CCP": Region.CENTRAL,
    "T": Region.TEMPORAL,
    "FT": Region.TEMPORAL,
    "TP": Region.TEMPORAL,
    "FTT": Region.TEMPORAL,
    "TTP": Region.TEMPORAL,
    "TPP": Region.TEMPORAL,
    "FFT": Region.TEMPORAL,
    "P": Region.PARIETAL,
    "CPP": Region.PARIETAL,
    "PPO": Region.PARIETAL,
    "PO": Region.OCCIPITAL,
    "O": Region.OCCIPITAL,
    "POO": Region.OCCIPITAL,
    "I": Region.OCCIPITAL,
    "OI": Region.OCCIPITAL,
}

# Mixed-case spellings used by the 10-5 nomenclature.
_CANONICAL_PREFIX = {"FP": "Fp", "AFP": "AFp"}

_LABEL_RE = re.compile(r"^([A-Za-z]+?)(10|[1-9]|[zZ])(h)?$")

# 128-channel high-density 10-5 layout (reference FCz and ground Fpz are
# not recorded channels).
STANDARD_10_5_128 = tuple(
    """
    Fp1 Fp2 AFp1 AFp2
    AF7 AF3 AFz AF4 AF8
    AFF5h AFF1h AFF2h AFF6h
    F9 F7 F5 F3 F1 Fz F2 F4 F6 F8 F10
    FFT9h FFT7h FFC5h FFC3h FFC1h FFC2h FFC4h FFC6h FFT8h FFT10h
    FT9 FT7 FC5 FC3 FC1 FC2 FC4 FC6 FT8 FT10
    FTT9h FTT7h FCC5h FCC3h FCC1h FCC2h FCC4h FCC6h FTT8h FTT10h
    T7 C5 C3 C1 Cz C2 C4 C6 T8
    TTP7h CCP5h CCP3h CCP1h CCP2h CCP4h CCP6h TTP8h
    TP9 TP7 CP5 CP3 CP1 CPz CP2 CP4 CP6 TP8 TP10
    TPP9h TPP7h CPP5h CPP3h CPP1h CPP2h CPP4h CPP6h TPP8h TPP10h
    P9 P7 P5 P3 P1 Pz P2 P4 P6 P8 P10
    PPO9h PPO5h PPO1h PPO2h PPO6h PPO10h
    PO9 PO7 PO3 POz PO4 PO8 PO10
    POO9h POO1 POO2 POO10h
    O1 Oz O2
    OI1h OI2h I1 Iz I2
    """.split()
)

DEFAULT_EXCLUSIONS = ("FCz", "Fpz")


@dataclass(frozen=True)
class ElectrodeLabel:
    raw: str
    prefix: str
    index: str
    modifier: str = ""

    def recompose(self):
        return f"{self.prefix}{self.index}{self.modifier}"

    @property
    def is_midline(self):
        return self.index == "z"


def parse_label(raw: str) -> ElectrodeLabel:
    """Split a 10-5 label into prefix, index (1-10 or z) and ``h`` modifier.

    >>> parse_label("FFT8h")
    ElectrodeLabel(raw='FFT8h', prefix='FFT', index='8', modifier='h')
    """
    text = str(raw).strip()
    m = _LABEL_RE.match(text)
    if not text or m is None:
        raise LabelParseError(raw)
    letters, index, modifier = m.group(1), m.group(2), m.group(3) or ""
    key = letters.upper()
    prefix = _CANONICAL_PREFIX.get(key, key)
    return ElectrodeLabel(text, prefix, index.lower(), modifier)


def recompose(label: ElectrodeLabel) -> str:
    return label.recompose()


def region_of(label: ElectrodeLabel | str) -> Region:
    """Region implied by the label prefix alone."""
    if isinstance(label, str):
        label = parse_label(label)
    try:
        return PREFIX_REGIONS[label.prefix.upper()]
    except KeyError:
        raise ClassificationError([label.prefix], [label.raw]) from None


@dataclass(frozen=True)
class RegionMap:
    """Channel -> region assignment; ``assignments`` keeps channel order."""

    assignments: Mapping[str, Region]
    exclusions: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "assignments", dict(self.assignments))
        object.__setattr__(self, "exclusions", tuple(self.exclusions))

    def __contains__(self, label):
        return label in self.assignments

    def __getitem__(self, label):
        return self.assignments[label]

    def __len__(self):
        return len(self.assignments)

    @property
    def channels(self):
        return tuple(self.assignments)

    def channels_in(self, region):
        return tuple(c for c, r in self.assignments.items() if r == region)

    def missing(self, channels):
        return [c for c in channels if c not in self.assignments]


def build_region_map(channels: Iterable[str], exclusions: Iterable[str] = (),
                     overrides: Mapping[str, str | Region] | None = None) -> RegionMap:
    """Assign a region to every non-excluded channel.

    ``overrides`` maps channel labels to regions and bypasses the prefix
    rule (useful for other atlases). All unclassifiable labels are reported
    together in one ClassificationError.
    """
    channels = list(channels)
    if len(set(channels)) != len(channels):
        dups = sorted({c for c in channels if channels.count(c) > 1})
        raise InputError(f"duplicate channel labels: {', '.join(dups)}")
    excluded = set(exclusions)
    overrides = {k: Region.parse(v) if not isinstance(v, Region) else v
                 for k, v in (overrides or {}).items()}
    assignments = {}
    bad_prefixes, bad_labels = [], []
    for ch in channels:
        if ch in excluded:
            continue
        if ch in overrides:
            assignments[ch] = overrides[ch]
            continue
        try:
            assignments[ch] = region_of(parse_label(ch))
        except LabelParseError:
            bad_prefixes.append(ch)
            bad_labels.append(ch)
        except ClassificationError as exc:
            for p in exc.prefixes:
                if p not in bad_prefixes:
                    bad_prefixes.append(p)
            bad_labels.append(ch)
    if bad_labels:
        raise ClassificationError(bad_prefixes, bad_labels)
    return RegionMap(assignments, tuple(c for c in channels if c in excluded))
