"""T2 under the Gauss measure.

Two points are compared: a Lebesgue-random real, represented by a random
rational with a ``--bits``-bit denominator (its leading CF digits are those
of a typical point), and the quadratic irrational sqrt(2) - 1 whose digits
are all 2.
"""

import argparse
import random

from hotspot import CFQuadraticPeriodic, CFRational, DigitStream, ExpSqrtLog, Gauss, VerdictParams, theorem_verdict


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eta", type=float, default=1.0)
    args = ap.parse_args()

    den = 1 << args.bits
    num = random.Random(args.seed).getrandbits(args.bits) | 1
    typical = DigitStream(CFRational(num, den))
    n = typical.length - 2
    params = VerdictParams(depth=2, cutoff=3, n=n, escape_cutoffs=(16, 64, 256), etas=(args.eta, 2 * args.eta))
    gauge = ExpSqrtLog(args.eta)
    for label, stream in (("random real", typical), ("sqrt(2) - 1", DigitStream(CFQuadraticPeriodic((), (2,))))):
        v = theorem_verdict("T2", stream, Gauss(), gauge, params)
        print(f"--- {label}")
        print(v.to_text(), end="")


if __name__ == "__main__":
    main()
