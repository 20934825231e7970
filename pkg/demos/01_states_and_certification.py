"""Build Gaussian states from elementary operations and certify them.

Covariance matrices are vacuum-normalized: the vacuum has variance 1 on both
quadratures, every physicality and separability threshold sits at 1.
"""

import numpy as np

from cvsteer import (
    Partition,
    beam_splitter,
    db_to_variance,
    full_report,
    is_physical,
    ppt_min,
    squeezed_mode,
    steerability,
    symplectic_eigenvalues,
    tensor,
)

np.set_printoptions(precision=4, suppress=True)

# -- sources ----------------------------------------------------------------
# a -3 dB / +5.5 dB squeezed mode (impure: v_s * v_a > 1, like a real source)
v_s = db_to_variance(3.0, "squeezed")
v_a = db_to_variance(5.5, "antisqueezed")
print(f"squeezed variance  {v_s:.4f}   antisqueezed {v_a:.4f}")

mode_x = squeezed_mode(v_s, v_a, "x_squeezed", label="sx")
mode_p = squeezed_mode(v_s, v_a, "p_squeezed", label="sp")
print("x-squeezed covariance:\n", mode_x.cov)
print("symplectic eigenvalue:", symplectic_eigenvalues(mode_x.cov))
print("physical:", is_physical(mode_x))

# -- entangle two squeezed modes on a balanced beam splitter -----------------
pair = beam_splitter(tensor(mode_p, mode_x), "sp", "sx", 0.5)
print("\nafter balanced beam splitter:\n", pair.cov)

ppt = ppt_min(pair, ["sp"])
print(f"\nmin PPT eigenvalue: {ppt:.4f}  ->", "entangled" if ppt < 1 else "separable")

g_fwd = steerability(pair, Partition((0,), (1,)))
g_bwd = steerability(pair, Partition((1,), (0,)))
print(f"steering sp->sx: {g_fwd:.4f}   sx->sp: {g_bwd:.4f}")

# -- full report over chosen splits ------------------------------------------
report = full_report(pair, [Partition((0,), (1,))])
print("\nfull report")
for split, value in report.ppt_by_split.items():
    print(f"  PPT {split}: {value:.4f}  [{report.verdicts[split]}]")
for direction, value in report.steer_by_direction.items():
    print(f"  G {direction}: {value:.4f}")
