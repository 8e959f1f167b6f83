"""
Spectral convergence in one dimension
=====================================

Both smooth 1D cases with closed-form solutions, run through the same
driver the CLI uses.  Errors drop faster than any power of N, and the
pairwise rate keeps climbing until the time-stepping error takes over.

Pass ``--full`` for N up to 50 at dt = 1e-4 (a minute or two); the default
is a quicker run at dt = 1e-3.
"""

import sys

from hermwave.runner import config_from_dict, run_convergence

full = "--full" in sys.argv
dt = 1e-4 if full else 1e-3
N_list = [10, 20, 30, 40, 50] if full else [10, 20, 30, 40]

for sid in ("EX1_I", "EX1_II"):
    cfg = config_from_dict({"scenario": sid, "N_list": N_list, "dt": dt, "T_final": 1.0, "threads": 2})
    print(f"\n{sid}, dt = {dt:g}, T = 1")
    print("  N     L2 error    rate     Linf error   rate")
    for r in run_convergence(cfg, write=False):
        rl2 = f"{r.rate_l2:6.2f}" if r.rate_l2 else "      "
        rli = f"{r.rate_linf:6.2f}" if r.rate_linf else "      "
        print(f"{r.N:4d}   {r.l2_error:.3e}  {rl2}   {r.linf_error:.3e}  {rli}")
