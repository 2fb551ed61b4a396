"""Iterative randomized rounding, one round at a time.

Packs a random 2-dimensional instance and prints, for every round, the LP
value on the residual items, how many configurations were sampled and how
many items survive. The last column compares the survival fraction with
(1 - delta)^j.

    python demos/irr_walkthrough.py [n] [seed]
"""

import sys

from vbplab.cli import generate
from vbplab.config_lp import solve_config_lp
from vbplab.core import first_fit, volume_lower_bound
from vbplab.irr import IrrParams, run_irr


def main(n=120, seed=1):
    delta = 0.1
    inst = generate("uniform", n, 2, seed)
    params = IrrParams(delta, seed)
    packing, trace = run_irr(inst, None, params)
    _, lp = solve_config_lp(inst, None, delta)

    print(f"instance {inst.name}: alpha={params.alpha:.4f}, k={params.k} rounds")
    print(f"{'j':>3} {'z_j':>9} {'rho_j':>6} {'left':>5} {'frac':>7} {'(1-d)^j':>8}")
    for j, rec in enumerate(trace.iterations, start=1):
        left = len(trace.residuals[j])
        print(f"{j:>3} {rec.z:>9.3f} {rec.rho:>6} {left:>5} {left / n:>7.3f} {(1 - delta) ** j:>8.3f}")

    print(f"\nsampled bins {trace.sampled_total}, First-Fit on the residual {trace.rho_star}")
    print(f"after dedup: {packing.size} bins")
    print(f"First-Fit alone: {first_fit(inst).size} bins, FFD: {first_fit(inst, decreasing=True).size}")
    print(f"config LP {lp:.3f}, volume bound {volume_lower_bound(inst)}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
