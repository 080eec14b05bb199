"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--level 6] [--jacobi-size 200] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from interpconst import _kernels
from interpconst.geometry import make_triangle, uniform_refine


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--jacobi-size", type=int, default=200)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    impls = {"python": _kernels.fallback}
    if _kernels.compiled is not None:
        impls["compiled"] = _kernels.compiled
    else:
        print("compiled core not built; timing the fallback only")

    verts = uniform_refine(make_triangle(-0.5, 0.8), args.level).element_vertices()
    rng = np.random.default_rng(0)
    G = rng.standard_normal((args.jacobi_size, args.jacobi_size))
    S = G + G.T

    cases = {
        f"fm_local_batch ({len(verts)} elements)": lambda impl: impl.fm_local_batch(verts),
        f"jacobi_eigh ({args.jacobi_size}x{args.jacobi_size})": lambda impl: impl.jacobi_eigh(S),
    }
    print(f"{'kernel':<36}" + "".join(f"{name:>12}" for name in impls) + "     speedup")
    for label, call in cases.items():
        times = {name: best_of(lambda: call(impl), args.repeat) for name, impl in impls.items()}
        row = f"{label:<36}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if len(times) == 2:
            row += f"  {times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
