"""
Algebraic rates for a non-smooth source
=======================================

With a source x^mu exp(-x^2) cos t the solution is only as smooth as
|x|^mu at the origin, and convergence slows from exponential to a power
of N.  No closed form exists, so errors are measured against a finer
run; the fitted H1 rate should be near 11/12 for mu = 1/3 and near
17/12 for mu = 4/3.

The default is a small version (reference N=128, T=0.1); ``--full`` uses
reference N=256 and T=0.5.
"""

import sys

from hermwave.diagnostics import fit_rate
from hermwave.runner import config_from_dict, run_convergence

full = "--full" in sys.argv
N_list, ref, T = ([32, 48, 64, 96, 128], 256, 0.5) if full else ([16, 24, 32, 48, 64], 128, 0.1)

for mu, expected in ((1 / 3, 11 / 12), (4 / 3, 17 / 12)):
    cfg = config_from_dict({"scenario": "EX3", "N_list": N_list, "reference_N": ref, "dt": 1e-4, "T_final": T,
                            "params": {"mu": mu}, "threads": 3})
    reps = run_convergence(cfg, write=False)
    print(f"\nmu = {mu:.4f}")
    for r in reps:
        print(f"  N={r.N:4d}  L2 {r.l2_error:.3e}  H1 {r.h1_error:.3e}")
    print(f"  fitted H1 rate {fit_rate([(r.N, r.h1_error) for r in reps]):.3f}   (expected {expected:.3f})")
