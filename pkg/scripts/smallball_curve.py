"""Empirical P(lambda_min < s) for (1/d) X X^T against the net and one-direction bounds."""
import argparse

import numpy as np

from wishart_lab.bounds import lambda_min_net, paouris_smallball
from wishart_lab.distributions import parse_distribution
from wishart_lab.errors import DomainError
from wishart_lab.estimators import DataMatrixSource, McConfig, tail_curve
from wishart_lab.rng import derive_seed
from wishart_lab.spectra import lambda_min_floored


def _maybe(fn, args):
    try:
        return f"{fn(args):.3e}"
    except DomainError:
        return "n/a"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--d", type=int, nargs="+", default=[4, 8, 16, 64])
    ap.add_argument("--replicas", type=int, default=20000)
    ap.add_argument("--dist", default="gaussian")
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    dist = parse_distribution(args.dist)
    s = np.geomspace(1e-4, 0.5, 10)

    for d in args.d:
        cfg = McConfig(args.replicas, derive_seed(args.seed, "smallball", args.n, d))
        curve = tail_curve(DataMatrixSource(dist, args.n, d), lambda_min_floored, s, cfg)
        print(f"n={args.n} d={d} dist={dist.name}")
        for si, p in zip(curve.thresholds, curve.probabilities):
            net = _maybe(lambda_min_net, {"s": si, "n": args.n, "d": d, "c": args.c})
            one = _maybe(paouris_smallball, {"eps": np.sqrt(si), "d": d, "c": args.c})
            print(f"  s={si:.2e}  p_hat={p:.4f}  net={net:>10}  one-direction={one:>10}")
        print()


if __name__ == "__main__":
    main()
