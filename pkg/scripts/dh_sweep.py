"""Stationary-phase check on S^2 over a grid of speeds t and ratios c = |Y|/|X|.

Prints the quadrature value, the fixed-point value, the hand-computed
closed form 2 pi (e^a - e^-a)/a with a = t(1 + ic), and both residuals.
"""

import argparse
import cmath
import math

from equiloc import scenarios, symplectic


def closed_form(a):
    return 2 * math.pi * (cmath.exp(a) - cmath.exp(-a)) / a


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t", type=float, nargs="+", default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--c", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    p.add_argument("--eps", type=float, default=0.0, help="metric perturbation")
    args = p.parse_args()
    print(f"{'t':>5} {'c':>5} {'lhs':>34} {'rel(lhs,rhs)':>13} {'rel(lhs,closed)':>16} literal")
    for t in args.t:
        for c in args.c:
            if c == 0.0:
                sc = scenarios.builtin("sphere2_rotation", t=t, eps=args.eps)
            else:
                sc = scenarios.builtin("sphere2_two_rotations", t=t, c=c, eps=args.eps)
            rep = symplectic.verify_dh(sc)
            a = t * (1 + 2 * args.eps / 3) * (1 + 1j * c)
            ref = closed_form(a) * (1 + 2 * args.eps / 3)
            rel = abs(rep.lhs - ref) / abs(ref)
            print(f"{t:5.2f} {c:5.2f} {rep.lhs:34.12f} {rep.rel_residual:13.2e} {rel:16.2e} "
                  f"{rep.notes['literal_matches']}")


if __name__ == "__main__":
    main()
