"""
Two dimensions with Kronecker-structured operators
==================================================

The 2D problems use tensor products of the 1D basis.  Nothing is stored
at size (N+1)^2 x (N+1)^2: every operator is a short sum of 1D factors
applied along each axis.
"""

import time

import numpy as np

from hermwave.dvwe import assemble
from hermwave.runner import config_from_dict, run_convergence
from hermwave.scenarios import get_scenario, make_basis

# How the operator is stored.
p = get_scenario("EX2_I").build(make_basis(2, 30, 0.0, 1.0), 1e-4, 0.5, 2.0, {})
sys_ = assemble(p)
print("A is a sum of", len(sys_.A.terms), "Kronecker terms; B of", len(sys_.B.terms))
C = np.random.default_rng(0).standard_normal((31, 31))
t = time.perf_counter()
for _ in range(1000):
    sys_.B.matvec(C)
print(f"1000 applications of B at N=30: {time.perf_counter() - t:.3f} s")

# A short convergence run (T = 0.1 keeps it under a minute).
cfg = config_from_dict({"scenario": "EX2_I", "N_list": [10, 20, 30], "dt": 1e-4, "T_final": 0.1, "threads": 3})
print("\nEX2_I, T = 0.1")
for r in run_convergence(cfg, write=False):
    print(f"N={r.N:3d}  L2 {r.l2_error:.3e}  Linf {r.linf_error:.3e}  rate {r.rate_l2 or float('nan'):.2f}")
