"""Match & Round against First-Fit and plain IRR on planted pairs.

Each instance hides n/2 perfectly complementary pairs, so OPT = n/2 and the
matching step has something to find. Prints per-seed bin counts and the
means at the end.

    python demos/match_round_pairs.py [n] [seeds]
"""

import sys

import numpy as np

from vbplab.cli import generate
from vbplab.core import first_fit
from vbplab.irr import IrrParams, run_irr
from vbplab.match_round import run_match_round


def main(n=40, seeds=10):
    delta = 0.1
    rows = []
    print(f"{'seed':>4} {'MLP':>7} {'|M|':>4} {'M&R':>4} {'IRR':>4} {'FF':>4} {'n/2':>4}")
    for s in range(seeds):
        inst = generate("pairs", n, 2, s)
        pk, rep = run_match_round(inst, delta, np.random.default_rng(s))
        irr = run_irr(inst, None, IrrParams(delta, s))[0].size
        ff = first_fit(inst).size
        rows.append((pk.size, irr, ff))
        print(f"{s:>4} {rep.mlp_value:>7.2f} {rep.matched:>4} {pk.size:>4} {irr:>4} {ff:>4} {n // 2:>4}")
        for w in rep.warnings:
            print("     warning:", w)
    mr, irr, ff = np.mean(rows, axis=0)
    print(f"\nmeans: Match & Round {mr:.2f}, IRR {irr:.2f}, First-Fit {ff:.2f}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
