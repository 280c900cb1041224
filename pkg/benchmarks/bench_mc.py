"""Monte Carlo kernel timing: numba vs pure numpy.

    python3 benchmarks/bench_mc.py [--samples N] [--repeat K]

The numpy path is the one used when ``CLUSTERX_DISABLE_NUMBA=1``.
"""
import argparse
import time

import numpy as np

from clusterx import _kernels
from clusterx._accel import USING_NUMBA
from clusterx.montecarlo import McSettings, mc_estimate, protocol_params
from clusterx.protocol import ExperimentConfig


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    cfg = ExperimentConfig(r=0.35, gain=0.95, means=(0.5, -0.3, 1.2, 0.7))
    params = protocol_params(cfg)
    z = np.random.default_rng(0).standard_normal((args.samples, 12))
    backends = ["numpy"] + (["numba"] if USING_NUMBA else [])

    for b in backends:  # warm up (numba compile)
        _kernels.batch_moments(_kernels.protocol_outputs(z[:100], params, b), b)

    print(f"{args.samples} samples, best of {args.repeat}")
    kernel = {}
    for b in backends:
        kernel[b] = best_of(lambda: _kernels.batch_moments(_kernels.protocol_outputs(z, params, b), b), args.repeat)
        print(f"  kernel  {b:6s} {kernel[b] * 1e3:9.2f} ms")
    full = {}
    for b in backends:
        full[b] = best_of(lambda: mc_estimate(cfg, McSettings(args.samples, 1), backend=b), args.repeat)
        print(f"  mc_estimate {b:6s} {full[b] * 1e3:9.2f} ms")
    if "numba" in kernel:
        print(f"speedup: kernel x{kernel['numpy'] / kernel['numba']:.2f}, end to end x{full['numpy'] / full['numba']:.2f}")
    else:
        print("numba disabled; numpy only")


if __name__ == "__main__":
    main()
