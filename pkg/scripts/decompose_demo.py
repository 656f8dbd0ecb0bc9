"""Decompose Haar-random unitaries into MZI meshes and report errors and depths."""

import argparse

import numpy as np

from lopath.circuits import classical_matrix, clements_decompose, mesh_depth, mesh_params, with_phases
from lopath.sampling import haar_unitary


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-modes", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print(f"{'m':>3} {'method':>9} {'MZIs':>5} {'depth':>6} {'error':>10}")
    for m in range(2, args.max_modes + 1):
        U = haar_unitary(m, args.seed + m)
        for method in ("clements", "reck"):
            circuit, phases = clements_decompose(U, method=method)
            err = np.max(np.abs(classical_matrix(with_phases(circuit, phases)) - U))
            mzis = mesh_params(circuit)
            print(f"{m:>3} {method:>9} {len(mzis):>5} {mesh_depth(mzis, m):>6} {err:10.2e}")


if __name__ == "__main__":
    main()
