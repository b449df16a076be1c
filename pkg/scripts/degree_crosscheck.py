"""Compare symbolic degrees of sigma words with lattice predictions.

Enumerates every reduced word up to ``--max-len`` in the chosen generators,
composes the maps exactly and prints both degrees.

    python3 scripts/degree_crosscheck.py --prime 17 --max-len 3
"""

import argparse
import time

from cremona_inertia.algebra import Field, Form
from cremona_inertia.curve import CubicCurve, marked_set_build, split_generators
from cremona_inertia.maps import sigma, map_compose
from cremona_inertia.picard import PicLattice, predicted_degree, reduced_words


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--equation", default="y^2*z - x^3 + x*z^2")
    ap.add_argument("--prime", type=int, default=17)
    ap.add_argument("--generators", type=int, default=3)
    ap.add_argument("--relation-free", action="store_true")
    ap.add_argument("--max-len", type=int, default=3)
    args = ap.parse_args()

    C = CubicCurve(Form.parse(args.equation, Field(args.prime)))
    gens = split_generators(C, args.generators, relation_free=args.relation_free)
    ms = marked_set_build(C, gens)
    lat = PicLattice(ms)
    sigmas = {g: sigma(C, a) for g, a in zip(ms.generators, gens)}

    t0 = time.perf_counter()
    maps = {(): None}
    bad = 0
    for w in reduced_words(lat.generators, args.max_len):
        w = tuple(w)
        if not w:
            continue
        prev = maps[w[:-1]]
        phi = sigmas[w[-1]] if prev is None else map_compose(prev, sigmas[w[-1]])
        maps[w] = phi
        pred = predicted_degree(lat, list(w))
        bad += phi.degree != pred
        print(f"{' '.join(map(str, w)):<16} symbolic {phi.degree:>4}  lattice {pred:>4}"
              f"{'' if phi.degree == pred else '  MISMATCH'}")
    print(f"\n{len(maps) - 1} words, {bad} mismatches, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
