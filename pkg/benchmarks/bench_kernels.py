"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from meanking import _kernels_py
from meanking.designs import oa_mols, oa_trivial
from meanking.mub import mub_auto
from meanking.protocol import _cdf, assemble, build_states, overlap_matrix

try:
    from meanking import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    for k, d in [(5, 4), (6, 5), (4, 16)]:
        rows = oa_trivial(k, d).rows
        yield f"pair_counts OA_trivial({k},{d}) rows={rows.shape[0]}", "pair_counts", (rows, d)

    for d, k, oa in [(9, 10, oa_mols(9)), (3, 4, oa_trivial(4, 3)), (5, 3, oa_trivial(3, 5))]:
        inst = build_states(mub_auto(d, k), oa)
        seed = np.ascontiguousarray(inst.hat_list())
        yield f"complete_basis N={inst.dim} seeds={seed.shape[0]}", "complete_basis", (seed, inst.dim, 1e-8)

    inst = assemble(mub_auto(3, 4), oa_trivial(4, 3))
    k, d, N = inst.k, inst.d, inst.dim
    p_I = (np.abs(overlap_matrix(inst)) ** 2).T.reshape(k, d, N)
    args = (_cdf(np.full(k, 1 / k)), _cdf(np.full((k, d), 1 / d)), _cdf(p_I),
            np.ascontiguousarray(inst.estimation))
    for rounds in (10_000, 200_000):
        u = np.random.default_rng(0).random((rounds, 3))
        yield f"sample_rounds rounds={rounds} N={N}", "sample_rounds", (u,) + args


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'case':50s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, name, fargs in cases():
        t_py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(*fargs), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:50s} {t_py * 1e3:10.2f} {'-':>10s} {'-':>8s}")
            continue
        t_cy = min(timeit.repeat(lambda: getattr(_compiled, name)(*fargs), number=1, repeat=args.repeat))
        print(f"{label:50s} {t_py * 1e3:10.2f} {t_cy * 1e3:10.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
