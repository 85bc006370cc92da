"""Closed tensor-product decomposition of two harmonic d-tensors, checked pointwise.

    python scripts/product_table.py "1|1;0,1;c" "2|1;1,-1;v"
"""
import argparse

import numpy as np

from dtharmonics import dtensor as dt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("left")
    ap.add_argument("right")
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    a, b = dt.HarmonicSignature.parse(args.left), dt.HarmonicSignature.parse(args.right)
    closed = dt.tensor_product_closed(a, b)
    oracle = dt.tensor_product_oracle(a, b)
    for s, c in sorted(closed.items()):
        print(f"{str(s):<28} {c.real:+.12f} {c.imag:+.12f}i")

    rng = np.random.default_rng(args.seed)
    p = (rng.uniform(0, np.pi, args.points), rng.uniform(0, 2 * np.pi, args.points), rng.uniform(0, 2 * np.pi, args.points))
    ea, eb = dt.evaluate(a, p).components, dt.evaluate(b, p).components
    ref = np.stack([np.multiply.outer(ea[i], eb[i]) for i in range(args.points)])
    print(f"terms: {len(closed)}")
    print(f"closed vs expansion oracle: {closed.max_abs_diff(oracle):.3e}")
    print(f"closed vs pointwise product: {np.abs(closed.evaluate(p).components - ref).max():.3e}")


if __name__ == "__main__":
    main()
