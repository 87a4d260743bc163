"""Compare update-kernel throughput across ring sizes.

Prints a table of steps per second for the scalar and bit-parallel kernels
and their ratio. The bit-parallel advantage grows with n because its cost
per step is dominated by a fixed number of word operations.
"""

import argparse
import sys

from nedpca import ModelParams, kernel_throughput


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 64, 256])
    parser.add_argument("-m", type=int, default=3)
    parser.add_argument("--p1", type=float, default=0.3)
    parser.add_argument("--p2", type=float, default=0.5)
    parser.add_argument("--steps", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    print(f"{'n':>6} {'scalar steps/s':>16} {'bitparallel steps/s':>20} {'ratio':>8}")
    for n in args.sizes:
        params = ModelParams(n, args.m, args.p1, args.p2)
        # the scalar kernel is slow; keep its sample proportionate
        scalar_steps = max(500, args.steps // 10)
        slow = kernel_throughput(params, "scalar", scalar_steps, seed=args.seed)
        fast = kernel_throughput(params, "bitparallel", args.steps, seed=args.seed)
        print(f"{n:>6} {slow:>16,.0f} {fast:>20,.0f} {fast / slow:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
