"""Sample heterodyne outcomes through the isometry and bin their phases.

Compares the empirical phase histogram with exact bin probabilities of the
ideal phase distribution and prints TV distance and chi-square p-value.

    python scripts/phase_histogram.py --samples 100000 --bins 64 --seed 2024
"""

import argparse

import numpy as np
from scipy import stats

from idealphase import Superposition, make_state, radial_profile, sample_heterodyne
from idealphase.verify import phase_bin_probabilities


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--bins", type=int, default=64)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    rho = make_state(Superposition(((0, 1), (1, 1))), 2)
    z = sample_heterodyne(radial_profile("gaussian"), rho, args.samples, seed=args.seed).samples
    counts, edges = np.histogram(np.mod(np.angle(z), 2 * np.pi), bins=args.bins, range=(0, 2 * np.pi))
    probs = phase_bin_probabilities(rho, args.bins)
    print("bin_left,count,expected")
    for left, c, p in zip(edges[:-1], counts, probs):
        print(f"{left:.6f},{c},{p * args.samples:.3f}")
    tv = 0.5 * np.abs(counts / args.samples - probs).sum()
    p = stats.chisquare(counts, args.samples * probs / probs.sum()).pvalue
    print(f"# tv: {tv:.5f}")
    print(f"# chi2_pvalue: {p:.4f}")


if __name__ == "__main__":
    main()
