"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py --dim 6 --triples 100000
"""
import argparse
import time

import numpy as np

from cpdist import kernels
from cpdist._accel import HAVE_NUMBA
from cpdist.harness import random_distance_matrix
from cpdist.semimetrics import WedgeOperatorQ
from cpdist.wedge import haar_unitary, orthonormal_triples


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=6)
    ap.add_argument("--triples", type=int, default=100_000)
    ap.add_argument("--starts", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    n = args.dim
    D = random_distance_matrix(n, rng)
    d2 = np.ascontiguousarray(D.d ** 2)
    Q = np.ascontiguousarray(WedgeOperatorQ.from_dmat(D, haar_unitary(n, rng)).Q)
    I, J = kernels.pair_indices(n)
    X, Y, Z = orthonormal_triples(args.triples, n, rng)
    X0, Y0, Z0 = (a[: args.starts].copy() for a in (X, Y, Z))

    cases = [
        ("diag_deficits", lambda f: f(d2, X, Y, Z),
         kernels.diag_deficits_nb, kernels.diag_deficits_np),
        ("dense_deficits", lambda f: f(Q, I, J, X, Y, Z),
         kernels.dense_deficits_nb, kernels.dense_deficits_np),
        ("descend", lambda f: f(Q, I, J, X0, Y0, Z0, 200, 1e-9),
         kernels.descend_nb, kernels.descend_np),
    ]
    print(f"n={n} triples={args.triples} starts={args.starts}")
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, call, nb, npf in cases:
        call(nb)  # compile
        t_nb = best_of(lambda: call(nb), args.repeat)
        t_np = best_of(lambda: call(npf), args.repeat)
        print(f"{name:<16}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
