"""Three ways to enforce the wheel-bridge contact constraint.

The coupled vehicle-bridge system is an index-3 DAE: the contact forces are
algebraic unknowns tied to a displacement-level constraint. This script runs
the default crossing three ways and prints what each choice costs:

  A  constraint at displacement level, generalized-alpha (rho_inf = 0.9)
  B  constraint at acceleration level, Newmark -> displacement drift
  C  Newmark + per-step velocity/acceleration projection

Run:  python3 demos/strategy_comparison.py      (about 15 s)
"""
import numpy as np

from vtsi.metrics import oscillation_index
from vtsi.scenario import parse_scenario
from vtsi.simulate import run_simulation

HORIZON = 0.9

runs = {
    "A (gen-alpha 0.9)": {"strategy": "A", "horizon": HORIZON},
    "A (plain Newmark)": {"strategy": "A", "newmark": True,
                          "horizon": HORIZON},
    "B (acc constraint)": {"strategy": "B", "horizon": HORIZON},
    "C (projected)": {"strategy": "C", "horizon": HORIZON},
}

print("%-20s %12s %12s %12s %14s" % ("run", "res_disp", "res_acc",
                                     "drift(end)", "osc idx at2"))
for label, overrides in runs.items():
    hist = run_simulation(parse_scenario({"run": overrides}))
    print("%-20s %12.2e %12.2e %12.2e %14.3e"
          % (label,
             np.max(hist.res_disp), np.max(hist.res_acc),
             abs(hist.res_disp[-1]),
             oscillation_index(hist.at[:, 1], hist.dt)))

print()
print("Reading the table:")
print(" - Strategy A holds the displacement constraint to machine precision")
print("   but, without numerical dissipation (plain Newmark), the wheel")
print("   acceleration rings at the sampling frequency: the oscillation")
print("   index jumps by orders of magnitude.")
print(" - Strategy B holds the acceleration constraint instead; the")
print("   unenforced displacement constraint drifts slowly and smoothly.")
print(" - Strategy C keeps Newmark usable by projecting velocities and")
print("   accelerations back onto the constraint after every step.")
