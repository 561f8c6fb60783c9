"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--N 50,200,500] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from fomlab import _fallback
from fomlab.certificate import dual_certificate
from fomlab.schedule import theta_sequence

try:
    from fomlab import _kernels
except ImportError:
    _kernels = None


def cases(N):
    t = theta_sequence("ogmg", N).values
    H = _fallback.ogmg_triangle(t)
    c = dual_certificate("ogmg", N)
    S = _fallback.assemble_s(H, c.a, c.b, c.c)
    tol = 1e-10 * max(1.0, float(np.linalg.norm(S)))
    return {
        "ogmg_triangle": lambda impl: impl.ogmg_triangle(t),
        "ogmg_alt_triangle": lambda impl: impl.ogmg_alt_triangle(t),
        "tail_sums": lambda impl: impl.tail_sums(H),
        "assemble_s": lambda impl: impl.assemble_s(H, c.a, c.b, c.c),
        "pivoted_cholesky": lambda impl: impl.pivoted_cholesky(S, tol),
    }


def best(fn, impl, repeat):
    number = 1
    while timeit.timeit(lambda: fn(impl), number=number) < 0.05 and number < 10**5:
        number *= 4
    return min(timeit.repeat(lambda: fn(impl), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--N", default="50,200,500")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':<20}{'N':>6}{'python [ms]':>14}{'compiled [ms]':>15}{'speedup':>10}")
    for N in (int(v) for v in args.N.split(",")):
        for name, fn in cases(N).items():
            py = best(fn, _fallback, args.repeat)
            if _kernels is None:
                print(f"{name:<20}{N:>6}{py * 1e3:>14.3f}{'-':>15}{'-':>10}")
                continue
            cc = best(fn, _kernels, args.repeat)
            print(f"{name:<20}{N:>6}{py * 1e3:>14.3f}{cc * 1e3:>15.3f}{py / cc:>10.1f}")


if __name__ == "__main__":
    main()
