"""Ball sizes of Cayley graphs of small Sp_2n(F_p) w.r.t. one conjugacy class."""

import argparse

from spbound.search import GroupSpec, bfs_balls
from spbound.symplectic import Long, root_element


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("groups", nargs="*", default=["sp4f2", "sp4f3", "sp6f2"])
    ap.add_argument("--cutoff", type=int, default=None)
    args = ap.parse_args()

    for name in args.groups:
        G = GroupSpec.parse(name)
        S = [root_element(G.n, Long(1), 1, G.ring)]
        rep = bfs_balls(S, G, cutoff=args.cutoff)
        diam = rep.diameter if rep.diameter is not None else f"> {len(rep.radii) - 1}"
        print(f"{G.name}: |G| = {G.order}, class size {rep.generator_count}, diameter {diam}")
        print("  balls:", rep.radii)


if __name__ == "__main__":
    main()
