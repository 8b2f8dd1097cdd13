"""Time the simulation kernels under each available backend.

The compiled backend pays a one-off JIT cost on first call, so every
configuration is warmed up before timing. Reported numbers are the best
of --repeats wall-clock runs (min is the right statistic for throughput).
"""

import argparse
import json
import time

from mg1tail import ExponentialIntegrated, ParetoIntegratedTail
from mg1tail import kernels
from mg1tail.kernels import available_backends, set_backend

MODELS = {
    "pareto-it:alpha=3.5": ParetoIntegratedTail(alpha=3.5),
    "exp:rate=1": ExponentialIntegrated(rate=1.0),
}


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(nreps, repeats):
    rows = []
    for backend in available_backends():
        set_backend(backend)
        for name, model in MODELS.items():
            jobs = {
                "ak_batch": lambda m=model: kernels.ak_batch(m, 0.8, 10.0, 1, 0, nreps),
                "crude_batch": lambda m=model: kernels.crude_batch(m, 0.8, 10.0, 1, 0, nreps),
                "sample_batch": lambda m=model: kernels.sample_batch(m, 0.8, 1, 0, nreps),
            }
            for kernel, fn in jobs.items():
                fn()  # warm-up (JIT compile + caches)
                secs = time_call(fn, repeats)
                rows.append({
                    "backend": backend,
                    "model": name,
                    "kernel": kernel,
                    "nreps": nreps,
                    "seconds": secs,
                    "reps_per_sec": nreps / secs,
                })
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nreps", type=int, default=1_000_000,
                    help="replications per timed call (default 1e6)")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timed runs per configuration; best is kept")
    ap.add_argument("--json", metavar="PATH", help="also dump rows as JSON")
    args = ap.parse_args(argv)

    rows = run(args.nreps, args.repeats)
    width = max(len(r["model"]) for r in rows)
    print(f"{'backend':8} {'model':{width}} {'kernel':12} "
          f"{'seconds':>10} {'reps/sec':>12}")
    for r in rows:
        print(f"{r['backend']:8} {r['model']:{width}} {r['kernel']:12} "
              f"{r['seconds']:10.4f} {r['reps_per_sec']:12.3e}")

    by_key = {}
    for r in rows:
        by_key.setdefault((r["model"], r["kernel"]), {})[r["backend"]] = r["seconds"]
    for (model, kernel), t in sorted(by_key.items()):
        if "numba" in t and "numpy" in t:
            print(f"speedup numba/numpy {model} {kernel}: "
                  f"{t['numpy'] / t['numba']:.2f}x")

    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
