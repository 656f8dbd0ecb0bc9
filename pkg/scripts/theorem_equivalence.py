"""Compare the Fock-space and permanent amplitudes on Haar-random unitaries."""

import argparse
import itertools

from lopath.fock import amplitude_fock, amplitude_permanent, enumerate_basis
from lopath.sampling import haar_unitary


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for m, n in itertools.product((2, 3, 4), (1, 2, 3)):
        basis = enumerate_basis(m, n)
        worst = 0.0
        for k in range(args.samples):
            U = haar_unitary(m, args.seed * 10**6 + 1000 * m + 100 * n + k)
            for I, J in itertools.product(basis, repeat=2):
                worst = max(worst, abs(amplitude_fock(U, I, J) - amplitude_permanent(U, I, J)))
        print(f"m={m} n={n}: max deviation {worst:.2e}")


if __name__ == "__main__":
    main()
