"""Harmonic coefficients of a Finsler metric along a ray of directions.

Sweeps the angle between velocity and position at fixed speed and prints the
l0 = 0 and l0 = 2 coefficients together with the Hessian-oracle mismatch.

    python scripts/finsler_table.py --model randers --r 1.0 --steps 9
"""
import argparse

import numpy as np

from dtharmonics import finsler as fs
from dtharmonics import geometry as geo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="randers", help="built-in name or expression in r, rho, z")
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=9)
    args = ap.parse_args()

    model = fs.builtin_model(args.model) if args.model in fs.BUILTIN_MODELS else fs.LagrangianModel.from_expression(args.model)
    g = fs.finsler_metric(model)
    print(f"{'alpha':>7} {'rhobar':>8} {'zbar':>8} {'c(0|1,0;0,0)':>14} {'c(2|1,0;0,0)':>14} {'|g - hess|':>11}")
    for alpha in np.linspace(0.15, np.pi - 0.15, args.steps):
        rho, z = np.sin(alpha), np.cos(alpha)
        coefs = {str(s): c for s, c in g.bind(args.r, rho, z).items()}
        p = geo.cylindrical_to_cartesian(geo.CylindricalChart(args.r, 1.0, 0.3, rho, z, 0.7))
        err = np.abs(g.evaluate(p) - fs.hessian_oracle(model, p).components).max()
        c0 = coefs.get("0|1,0;0,0;c,c", 0).real
        c2 = coefs.get("2|1,0;0,0;c,c", 0).real
        print(f"{alpha:7.3f} {rho:8.4f} {z:8.4f} {c0:14.8f} {c2:14.8f} {err:11.2e}")


if __name__ == "__main__":
    main()
