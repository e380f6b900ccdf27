#!/usr/bin/env python3
"""Tail probability of the restricted distance against its Markov-style bound.

Sweeps the distance threshold and prints the empirical probability that two
Haar-random encodings from the first algebra remain distinguishable to the
observer algebra, next to the analytic tail bound.

Usage:
    python scripts/markov_grid.py [--samples 500] [--state-samples 16]
"""

import argparse

from manlab.algebras import diagonal_masa, full_algebra, lattice_algebra
from manlab.protocols import markov_bound_check
from manlab.rng import RngStream


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--state-samples", type=int, default=16)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    cases = [
        ("masa vs full qubit", diagonal_masa(2), full_algebra(2)),
        ("factor vs its commutant", lattice_algebra([2, 2], {0}), lattice_algebra([2, 2], {1})),
        ("factor vs full two-qubit", lattice_algebra([2, 2], {0}), full_algebra(4)),
    ]
    for name, a, b in cases:
        print(f"\n=== {name}: S = {markov_bound_check(a, b, 1.0, 1, 1, RngStream(0)).S:.4f}")
        print(f"{'epsilon':>8} {'Pr[d >= eps]':>14} {'bound':>12} {'violated':>9}")
        for eps in (0.2, 0.4, 0.8, 1.2, 1.6):
            rep = markov_bound_check(
                a, b, epsilon=eps, samples=args.samples,
                state_samples=args.state_samples, rng=RngStream(args.seed),
            )
            print(f"{eps:>8.2f} {rep.probability:>10.4f} ± {rep.probability_se:<5.3f}"
                  f" {min(rep.bound, 99.0):>10.3f} {str(rep.violated):>9}")


if __name__ == "__main__":
    main()
