"""Dump the complete transition graphs of the n=3 chain for m=2 and m=3.

One CSV per window length, columns alpha,beta,prob, listing every positive-
probability transition between the eight configurations. Small enough to
inspect by eye and diff against hand calculations.
"""

import argparse
import sys

from nedpca import ModelParams, transition_edges


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p1", type=float, default=0.3)
    parser.add_argument("--p2", type=float, default=0.5)
    parser.add_argument("--prefix", default="transition_edges_n3")
    args = parser.parse_args(argv)

    for m in (2, 3):
        params = ModelParams(3, m, args.p1, args.p2)
        path = f"{args.prefix}_m{m}.csv"
        edges = transition_edges(params)
        with open(path, "w") as fh:
            fh.write("alpha,beta,prob\n")
            for alpha, beta, prob in edges:
                fh.write(f"{alpha},{beta},{prob!r}\n")
        print(f"wrote {len(edges)} edges to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
