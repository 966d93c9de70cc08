"""
From authentication to conclusive identification
================================================

Relabel the leaves of a perfect authentication protocol: "yes" becomes
"it is psi_k" and "no" becomes "inconclusive". Under a uniform prior the
result never mislabels and succeeds with probability 1/N.
"""

from lrauth import lra

scn = lra.bell_triple()
for k, tree in lra.bell_strategy().items():
    res = lra.lra_to_conclusive(scn, k, tree)
    print(f"question {k} ({scn.name(k)}): success {res.success_probability:.6f},"
          f" mislabel {res.mislabel_probability:.1e}")
    print("   ", res.detail)

# the qutrit set with psi4: both parties project on level 2
qutrit = lra.qutrit_bell_psi4_set()
res = lra.evaluate_conclusive(qutrit, lra.level_click_tree(2, "psi4"))
print(f"\npsi4 identified with probability {res.success_probability:.6f} (1/12 = {1 / 12:.6f})")
