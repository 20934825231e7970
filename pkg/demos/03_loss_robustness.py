"""Loss robustness: distributed entanglement and steering versus efficiency.

Both the scan tables the CLI produces and the closed-form steering curves;
entanglement (PPT < 1) survives down to arbitrarily small efficiency, and
the one-way steering degrades smoothly but never flips direction.
"""

import numpy as np

from cvsteer.cli import RunConfig, cmd_scan
from cvsteer import closed_form_steering_two_user
from cvsteer.protocol import ProtocolParams

config = RunConfig(scenario="two_user", eta_start=0.1, eta_stop=1.0, eta_steps=10)
result = cmd_scan(config)

print("two users: entanglement and one-way steering vs channel efficiency")
print(f"{'eta':>5} {'PPT_A':>8} {'G_A->B':>8} {'G_B->A':>8}")
for row in result.rows:
    print(f"{row['eta']:>5.1f} {row['PPT_A']:>8.4f} {row['G_A_to_B']:>8.4f} "
          f"{row['G_B_to_A']:>8.4f}")

closed = [closed_form_steering_two_user(
    ProtocolParams(users="two", eta_sb=float(e), eta_ab=float(e)))
    for e in result.column("eta")]
gap = np.abs(np.array(closed) - result.column("G_A_to_B")).max()
print(f"closed-form curve agrees with the table to {gap:.1e}")

config = RunConfig(scenario="three_user", eta_start=0.1, eta_stop=1.0, eta_steps=10)
result = cmd_scan(config)

print("\nthree users: collective steering dominates the individual ones")
print(f"{'eta':>5} {'PPT_A':>8} {'PPT_B':>8} {'PPT_D':>8} "
      f"{'G_A->BD':>8} {'G_A->B':>8} {'G_A->D':>8} {'G_B->D':>7}")
for row in result.rows:
    print(f"{row['eta']:>5.1f} {row['PPT_A']:>8.4f} {row['PPT_B']:>8.4f} "
          f"{row['PPT_D']:>8.4f} {row['G_A_to_BD']:>8.4f} {row['G_A_to_B']:>8.4f} "
          f"{row['G_A_to_D']:>8.4f} {row['G_B_to_D']:>7.1f}")

print("\nall PPT values < 1 at every efficiency: the distributed entanglement")
print("is robust against loss; G_B->D stays exactly 0 (steering monogamy).")
