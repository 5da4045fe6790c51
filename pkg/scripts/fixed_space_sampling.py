"""Distribution of fixed-space dimensions for short products of transvections."""

import argparse
import collections

import numpy as np

from spbound.bounds import batch_fixed_space_dim, random_transvection_products


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("length,dims (dim: count)")
    for length in range(1, 2 * args.n + 1):
        M = random_transvection_products(args.n, args.p, args.samples, np.full(args.samples, length), rng)
        counts = collections.Counter(batch_fixed_space_dim(M, args.p).tolist())
        print(length, dict(sorted(counts.items())))


if __name__ == "__main__":
    main()
