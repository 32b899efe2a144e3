"""Compare the compiled and the numpy DTW kernels.

    python benchmarks/bench_dtw.py [--length 120] [--channels 6] [--pairs 200] [--window 100]

Times single-pair distances for both backends on the same random series,
checks that they agree bit for bit, then times a full pairwise matrix on the
default synthetic corpus through the public API (which uses whichever backend
is active; set WARPKNN_DISABLE_NUMBA=1 to force numpy).
"""
import argparse
import time

import numpy as np

from warpknn import BACKEND, SynthSpec, WarpConfig, normalize, pairwise_matrix, synth_dataset
from warpknn import _jit, _kernels
from warpknn.series import LabeledInstance


def timed(fn, pairs, band):
    start = time.perf_counter()
    out = [fn(S, T, band) for S, T in pairs]
    return time.perf_counter() - start, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=120)
    ap.add_argument("--channels", type=int, default=6)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--window", type=int, default=100)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    pairs = [(rng.normal(size=(args.length, args.channels)), rng.normal(size=(args.length, args.channels)))
             for _ in range(args.pairs)]
    band = _kernels.effective_band(args.length, args.length, args.window)

    print(f"{args.pairs} pairs of {args.length}x{args.channels}, band {band}")
    t_np, v_np = timed(_kernels.dtw_value_numpy, pairs, band)
    print(f"  numpy wavefront : {t_np:8.3f}s  ({1e3 * t_np / args.pairs:.3f} ms/pair)")
    if _jit.HAS_NUMBA:
        _kernels.dtw_value_nb(*pairs[0], band)  # compile outside the timing
        t_nb, v_nb = timed(_kernels.dtw_value_nb, pairs, band)
        print(f"  numba           : {t_nb:8.3f}s  ({1e3 * t_nb / args.pairs:.3f} ms/pair)  speedup x{t_np / t_nb:.1f}")
        print(f"  identical values: {v_nb == v_np}")
    else:
        print("  numba not installed")

    data = [LabeledInstance(normalize(x.series), x.label, instance_id=x.instance_id)
            for x in synth_dataset(SynthSpec())]
    for workers in (1, args.workers):
        start = time.perf_counter()
        pairwise_matrix(data, WarpConfig(window=args.window), workers=workers)
        print(f"pairwise matrix, {len(data)} instances, backend={BACKEND}, workers={workers}: "
              f"{time.perf_counter() - start:.3f}s")


if __name__ == "__main__":
    main()
