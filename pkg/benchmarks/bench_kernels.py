"""Compare the compiled and NumPy phase-lag kernels.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --channels 32 128 --epochs 60 --repeat 3

Times ``phase_sync`` (PLV and PLI matrices from unit phasors) for each
available backend and checks that both give identical results.
"""
import argparse
import json
import time

import numpy as np

from eegconn import kernels


def available_backends():
    names = ["python"]
    try:
        kernels.get_backend("cython")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def phasors(n_ep, n_ch, m, seed=0):
    g = np.random.default_rng(seed)
    return np.exp(1j * g.uniform(-np.pi, np.pi, (n_ep, n_ch, m)))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--channels", type=int, nargs="+", default=[32, 128])
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--samples", type=int, default=1500)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true", help="print results as JSON")
    args = p.parse_args(argv)

    backends = available_backends()
    results = []
    for n_ch in args.channels:
        z = phasors(args.epochs, n_ch, args.samples)
        ref = None
        row = {"channels": n_ch, "epochs": args.epochs, "samples": args.samples}
        for name in backends:
            out = kernels.phase_sync(z, backend=name)
            if ref is None:
                ref = out
            else:
                row["identical"] = all(np.array_equal(a, b) for a, b in zip(ref, out))
            row[name] = best_of(lambda: kernels.phase_sync(z, backend=name), args.repeat)
        if len(backends) == 2:
            row["speedup"] = row["python"] / row["cython"]
        results.append(row)

    if args.json:
        print(json.dumps({"active": kernels.BACKEND, "results": results}, indent=2))
        return 0
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'channels':>8} {'epochs':>6} " + " ".join(f"{b + ' s':>10}" for b in backends)
          + ("    speedup  identical" if len(backends) == 2 else ""))
    for r in results:
        line = f"{r['channels']:>8} {r['epochs']:>6} " + " ".join(
            f"{r[b]:>10.3f}" for b in backends)
        if "speedup" in r:
            line += f" {r['speedup']:>9.1f}x  {r['identical']}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
