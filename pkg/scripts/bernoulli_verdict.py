"""T3 on i.i.d. digit streams: one seeded run per ratio.

Heavier tails (ratio near 1) need larger N before the conclusion settles.
"""

import argparse

from hotspot import Bernoulli, DigitStream, Geometric, IID, Power, VerdictParams, theorem_verdict


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--ratios", default="1/2,3/4")
    ap.add_argument("--eta", type=float, default=0.1, help="gauge is t**(1 - eta)")
    args = ap.parse_args()

    gauge = Power(1 - args.eta)
    for ratio in args.ratios.split(","):
        pv = Geometric(ratio)
        params = VerdictParams(depth=2, cutoff=4, n=args.N, escape_cutoffs=(8, 16, 32), eta0s=(0.25, 0.5))
        v = theorem_verdict("T3", DigitStream(IID(pv, args.seed)), Bernoulli(pv), gauge, params)
        print(f"--- geometric ratio {ratio}")
        print(v.to_text(), end="")


if __name__ == "__main__":
    main()
