"""Search F_p for curve points whose tangency quartic splits.

    python3 scripts/find_split_points.py "y^2*z - x^3 + x*z^2" 17 --count 3
"""

import argparse

from cremona_inertia.algebra import Field, Form
from cremona_inertia.curve import CubicCurve, curve_points, split_generators


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("equation")
    ap.add_argument("p", type=int)
    ap.add_argument("--count", type=int, default=3, help="generators to pick greedily")
    args = ap.parse_args()

    C = CubicCurve(Form.parse(args.equation, Field(args.p)))
    pts = curve_points(C)
    split = []
    for a in pts:
        try:
            roots, residual = C.rational_tangency_points(a)
        except Exception as exc:  # repeated root, i.e. a degenerate point
            print(f"{a}: skipped ({type(exc).__name__})")
            continue
        if residual.degree == 0:
            split.append(a)
            print(f"{a}: splits, tangency points {', '.join(map(str, roots))}")
    print(f"\n{len(split)} of {len(pts)} points split")

    chosen = split_generators(C, args.count)
    print("generators:", " ".join(map(str, chosen)))


if __name__ == "__main__":
    main()
