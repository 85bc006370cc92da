"""Orthogonality of scalar and d-tensor harmonics as the quadrature is refined.

    python scripts/gram_report.py --lmax 3 --kmax 2
"""
import argparse
from math import pi

import numpy as np

from dtharmonics import dtensor as dt
from dtharmonics import scalar as sc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lmax", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=2)
    args = ap.parse_args()

    lmax = args.lmax
    print(f"{'rank':>4} {'count':>6} {'quadrature':>12} {'max |G/8pi^2 - I|':>20}")
    for k in range(args.kmax + 1):
        sigs = dt.signatures(k, lmax)
        for extra in (0, 2, 8):
            q = sc.QuadratureSpec(lmax + 2 + extra, 2 * lmax + 2 + extra, 2 * lmax + 2 + extra)
            G = dt.gram_matrix(sigs, q) / (8 * pi**2)
            err = np.abs(G - np.eye(len(sigs))).max()
            print(f"{k:>4} {len(sigs):>6} {q.n_theta:>3}x{q.n_phi}x{q.n_beta:<4} {err:>20.3e}")


if __name__ == "__main__":
    main()
