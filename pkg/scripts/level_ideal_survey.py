"""How often random words give a proper level ideal, by word length."""

import argparse
import collections

from spbound.rings import Ring
from spbound.reduction import level_ideal, level_ideal_7n_split
from spbound.symplectic import random_sp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mod", type=int, default=210)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--lengths", type=int, nargs="+", default=[1, 2, 3, 5, 10, 20])
    ap.add_argument("--samples", type=int, default=50)
    args = ap.parse_args()

    R = Ring(args.mod)
    print("length,generators (count),max split size")
    for length in args.lengths:
        gens = collections.Counter()
        split_max = 0
        for s in range(args.samples):
            A = random_sp(args.n, R, length, s)
            gens[level_ideal(A).ideal.canonical] += 1
            split_max = max(split_max, len(level_ideal_7n_split(A)))
        print(length, dict(sorted(gens.items())), split_max)


if __name__ == "__main__":
    main()
