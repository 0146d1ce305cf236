"""Time the numba and pure-numpy kernel paths on the default grids.

    python benchmarks/bench_kernels.py [--repeat 3] [--threads N]

Prints one row per (operation, backend) with the best wall time, and checks
that both backends agree.
"""
import argparse
import time

import numpy as np

from wavelet_qm import (EvolutionConfig, MinimalPacketWavelet, PhysicalParams, PotentialModel,
                        ScalePositionGrid, SpatialGrid, calibrate_frame, evaluate_wavelet,
                        evolve_reference, forward_cwt, inverse_cwt)
from wavelet_qm import _kernels


def best_of(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    params = PhysicalParams()
    w = MinimalPacketWavelet(1.0, 5.0)
    x = SpatialGrid(-40.0, 40.0, 2048)
    grid = ScalePositionGrid(0.25, 8.0, 32, x)
    probe = evaluate_wavelet(w, params, x)
    field = forward_cwt(probe, w, grid, params)
    cal = calibrate_frame(w, grid, params, probe)
    cn_grid = SpatialGrid(-40.0, 40.0, 8192)
    cn_psi = evaluate_wavelet(w, params, cn_grid)
    cn_cfg = EvolutionConfig(1e-3, 200, "crank_nicolson")

    ops = {
        "forward_cwt 32x2048": lambda: forward_cwt(probe, w, grid, params).coefficients,
        "inverse_cwt 32x2048": lambda: inverse_cwt(field, w, cal, params, x).values,
        "crank_nicolson 8192 pts x 200": lambda: evolve_reference(
            cn_psi, PotentialModel.zero(), params, cn_cfg).values,
    }
    backends = ["numpy"] + (["numba"] if _kernels.HAS_NUMBA else [])
    if args.threads is not None and _kernels.HAS_NUMBA:
        _kernels.set_threads(args.threads)

    print(f"{'operation':32s} {'backend':8s} {'best [s]':>10s} {'speed-up':>9s}")
    for name, fn in ops.items():
        results = {}
        for b in backends:
            _kernels.set_backend(b)
            fn()  # warm-up, includes JIT compilation
            results[b] = best_of(fn, args.repeat)
        base = results["numpy"][0]
        for b, (t, _) in results.items():
            print(f"{name:32s} {b:8s} {t:10.4f} {base / t:8.1f}x")
        if len(results) == 2:
            diff = np.abs(results["numba"][1] - results["numpy"][1]).max()
            print(f"{'':32s} max |numba - numpy| = {diff:.2e}")


if __name__ == "__main__":
    main()
