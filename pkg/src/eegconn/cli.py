"""Command-line entry point.

    eegconn run CONFIG              full pipeline, outputs under output_dir
    eegconn synth CONFIG            write synthetic inputs named in CONFIG
    eegconn inspect RECORDING       print channels, rate, duration
    eegconn render MATRIX REGIONS   circular diagram of a saved matrix
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from . import io as eio
from .config import load_config
from .errors import EEGConnError, PipelineError
from .montage import build_region_map, region_of
from .render import render_circular

log = logging.getLogger("eegconn")


def _cmd_run(args):
    from .pipeline import run_pipeline

    cfg = load_config(args.config)
    report = run_pipeline(cfg)
    print(f"wrote {len(report.files)} files to {report.output_dir}")
    for r in report.rows[: args.show]:
        print(f"  {r.band:6s} {str(r.metric):3s} {str(r.region_a):10s} {str(r.region_b):10s} "
              f"connections={r.connections} mean={r.mean_weight:+.4f}")
    return 0


def _cmd_synth(args):
    from .pipeline import run_synth

    cfg = load_config(args.config)
    for p in run_synth(cfg):
        print(f"wrote {p}")
    return 0


def _cmd_inspect(args):
    rec = eio.load_recording(args.recording, fs=args.fs)
    info = {
        "path": str(args.recording),
        "condition": rec.condition,
        "fs": rec.fs,
        "n_channels": rec.n_channels,
        "n_samples": rec.n_samples,
        "duration_s": rec.duration,
    }
    if args.json:
        info["channels"] = list(rec.channels)
        print(json.dumps(info, indent=2))
        return 0
    for k, v in info.items():
        print(f"{k}: {v}")
    regions = {}
    for c in rec.channels:
        try:
            regions.setdefault(str(region_of(c)), []).append(c)
        except EEGConnError:
            regions.setdefault("unclassified", []).append(c)
    for name, chans in regions.items():
        print(f"{name} ({len(chans)}): {' '.join(chans)}")
    return 0


def _cmd_render(args):
    m = eio.load_matrix(args.matrix)
    rm = eio.load_region_map(args.regions) if args.regions else build_region_map(m.channels)
    out = Path(args.output) if args.output else Path(args.matrix).with_suffix(".svg")
    render_circular(m, rm, args.top_k, out)
    print(f"wrote {out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="eegconn", description="EEG functional connectivity pipeline")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the pipeline described by a config file")
    r.add_argument("config")
    r.add_argument("--show", type=int, default=10, help="summary rows to print (default 10)")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("synth", help="generate synthetic recordings for a config")
    s.add_argument("config")
    s.set_defaults(func=_cmd_synth)

    i = sub.add_parser("inspect", help="describe a recording file")
    i.add_argument("recording")
    i.add_argument("--fs", type=float, default=None, help="sampling rate for CSV input")
    i.add_argument("--json", action="store_true")
    i.set_defaults(func=_cmd_inspect)

    d = sub.add_parser("render", help="draw a saved matrix as a circular diagram")
    d.add_argument("matrix")
    d.add_argument("regions", nargs="?", default=None, help="channel,region CSV")
    d.add_argument("-o", "--output", default=None)
    d.add_argument("--top-k", type=int, default=200)
    d.set_defaults(func=_cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"eegconn: error in stage '{exc.stage}': {exc.cause}", file=sys.stderr)
        return 2
    except EEGConnError as exc:
        print(f"eegconn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"eegconn: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
