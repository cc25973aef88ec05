"""Fisher information along the OU flow and the entropy it integrates to."""
import argparse

import numpy as np

from wishart_lab.calculus1d import debruijn_entropy, ou_fisher
from wishart_lab.distributions import parse_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dist", nargs="+",
                    default=["uniform", "laplace", "exponential_power:1.5"])
    ap.add_argument("--times", type=float, nargs="+",
                    default=[0.02, 0.05, 0.1, 0.25, 0.5, 1, 2, 4, 8])
    args = ap.parse_args()

    for name in args.dist:
        dist = parse_distribution(name)
        print(f"{dist.name}")
        for t in args.times:
            print(f"  t={t:<5g} J(P_t nu) - 1 = {ou_fisher(dist, t) - 1:.6e}")
        ent = debruijn_entropy(dist)
        print(f"  integral of (J - 1) = {ent:.8f}, closed form {dist.rel_ent_gaussian:.8f}, "
              f"error {abs(ent - dist.rel_ent_gaussian):.1e}\n")


if __name__ == "__main__":
    np.seterr(all="ignore")
    main()
