"""Run the free-product certificate on an abstract or exact configuration.

    python3 scripts/run_certificate.py --abstract 4 --max-len 9 --workers 4
    python3 scripts/run_certificate.py --equation "y^2*z - x^3 + x*z^2" --prime 17 --generators 3
"""

import argparse
import time

from cremona_inertia.algebra import Field, Form
from cremona_inertia.curve import CubicCurve, MarkedPointSet, marked_set_build, split_generators
from cremona_inertia.picard import PicLattice, certify_free_product, count_reduced_words


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--abstract", type=int, help="number of generic generators")
    ap.add_argument("--inflexion", type=int, nargs="*", default=(), help="abstract generators that are inflexions")
    ap.add_argument("--equation")
    ap.add_argument("--prime", type=int)
    ap.add_argument("--generators", type=int, default=3)
    ap.add_argument("--max-len", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", help="write the certificate JSON here")
    args = ap.parse_args()

    if args.abstract:
        ms = MarkedPointSet.abstract(args.abstract, inflexion=tuple(args.inflexion))
    else:
        C = CubicCurve(Form.parse(args.equation, Field(args.prime)))
        gens = split_generators(C, args.generators)
        print("generators:", *gens)
        ms = marked_set_build(C, gens)
    lat = PicLattice(ms)
    print(f"lattice rank {lat.size}, {len(lat.generators)} generators, "
          f"{count_reduced_words(len(lat.generators), args.max_len)} maximal words")

    t0 = time.perf_counter()
    cert = certify_free_product(lat, args.max_len, workers=args.workers, raise_on_failure=False)
    print(f"{cert.status}: {cert.words_checked} maximal / {cert.words_total} total words, "
          f"max coefficient {cert.max_coeff_bits} bits, {time.perf_counter() - t0:.1f}s")
    if cert.counterexample:
        print("counterexample:", cert.counterexample)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(cert.dumps())


if __name__ == "__main__":
    main()
