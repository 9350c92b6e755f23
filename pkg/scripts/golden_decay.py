#!/usr/bin/env python3
"""Brute-force golden values for the H_phi decay scan.

Setting: cylinder [1], delta = 0.4, Bernoulli geometric(1/2) measure, gauge
t -> t**0.9, digits <= 2, ell in {2, 4, 6, 8}.

Deliberately shares no code with the package: words are enumerated with
itertools, window counts are done by direct comparison, and H_phi is the
minimum over every subset of prefix-tree nodes that covers the target, with
the gauge evaluated in 50-digit mpmath.

    python scripts/golden_decay.py > tests/golden/decay_power09.json
"""

import itertools
import json
from fractions import Fraction

import mpmath

mpmath.mp.dps = 50

WORD = (1,)
DELTA = Fraction(2, 5)
M = 2
ELLS = [2, 4, 6, 8]
EXPONENT = mpmath.mpf(9) / 10


def p(a):
    return Fraction(1, 2**a)


def mu(word):
    out = Fraction(1)
    for a in word:
        out *= p(a)
    return out


def deviation_set(ell):
    depth = ell + len(WORD) - 1
    target = mu(WORD)
    out = []
    for w in itertools.product(range(1, M + 1), repeat=depth):
        s = sum(1 for i in range(ell) if w[i:i + len(WORD)] == WORD)
        if abs(Fraction(s, ell) - target) > DELTA:
            out.append(w)
    return out


def phi(t):
    return (mpmath.mpf(t.numerator) / t.denominator) ** EXPONENT


def brute_h(target):
    nodes = sorted({w[:j] for w in target for j in range(len(w) + 1)})
    best = None
    for mask in range(1, 1 << len(nodes)):
        chosen = [nodes[i] for i in range(len(nodes)) if mask >> i & 1]
        if not all(any(w[:len(c)] == c for c in chosen) for w in target):
            continue
        cost = sum(phi(mu(c)) for c in chosen)
        if best is None or cost < best:
            best = cost
    return best


def main():
    rows = []
    for ell in ELLS:
        target = deviation_set(ell)
        value = brute_h(target)
        rows.append({
            "ell": ell,
            "members": [",".join(map(str, w)) for w in target],
            "H": mpmath.nstr(value, 30),
        })
    print(json.dumps({
        "cylinder": "1", "delta": "2/5", "M": M, "measure": "geometric 1/2",
        "gauge": "t**0.9", "rows": rows,
    }, indent=2))


if __name__ == "__main__":
    main()
