import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

FS = 1000.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tone(freq, n, fs=FS, phase=0.0, amp=1.0):
    t = np.arange(n) / fs
    return amp * np.cos(2 * np.pi * freq * t + phase)


def rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def interior(x, fs=FS, edge_s=1.0):
    """Drop ``edge_s`` seconds at each end to avoid filter start-up transients."""
    k = int(edge_s * fs)
    return x[..., k:-k]


SMALL_CHANNELS = ["Fp1", "Fp2", "F3", "F4", "Fz", "C3", "C4", "T7", "T8", "P3", "P4", "O1"]


def small_config(tmp_path, **overrides):
    """Two-condition synthetic config, small enough for a few-second run."""
    doc = {
        "conditions": [{"name": "imagined", "path": "data/imagined.eegf"},
                       {"name": "perceived", "path": "data/perceived.eegf"}],
        "output_dir": "out",
        "threshold": 0.2,
        "seed": 3,
        "render": {"top_k": 20},
        "synth": {
            "fs": 500.0,
            "duration_s": 30.0,
            "channels": SMALL_CHANNELS,
            "conditions": {
                "imagined": {"pairs": [{"a": "F3", "b": "F4", "freq": 6.0,
                                        "lag": 0.785398, "strength": 0.9}]},
            },
        },
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="config.yaml"):
    import yaml

    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc, sort_keys=False))
    return p


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
