"""Word lengths from the end-to-end pipeline over Z/m for a range of k."""

import argparse
import statistics

from spbound.bounds import crt_generating_set
from spbound.decomposition import RootCertifier, theorem_b1_pipeline
from spbound.rings import Ring
from spbound.symplectic import random_sp
from spbound.words import eval_word


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mod", type=int, default=210)
    ap.add_argument("--ks", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--targets", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    R = Ring(args.mod)
    print("k,route,bound,min_len,mean_len,max_len,all_correct")
    for k in args.ks:
        S = crt_generating_set(R, k).set
        cert = RootCertifier(S)
        lengths, ok = [], True
        bound = None
        for t in range(args.targets):
            A = random_sp(3, R, 40, args.seed + 1000 * k + t)
            res = theorem_b1_pipeline(A, S, certifier=cert)
            bound = res.bound
            lengths.append(len(res.word))
            ok &= eval_word(res.word, S) == A
        print(f"{k},{cert.route},{bound},{min(lengths)},{statistics.mean(lengths):.1f},{max(lengths)},{ok}")


if __name__ == "__main__":
    main()
