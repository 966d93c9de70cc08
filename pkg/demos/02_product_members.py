"""
Product members are always authenticable
========================================

If psi_k is a product of local states, every party projects onto its own
factor and the answer is "yes" only when all projectors click. This works
whatever the other (entangled) members look like, as long as they are
orthogonal to psi_k.
"""

import numpy as np

from lrauth import lra, qcore

rng = np.random.default_rng(7)

layout = qcore.PartyLayout((2, 3, 2))
target = qcore.random_product_state(layout, rng)
basis = qcore.orthonormal_completion([target.amplitudes], rng)
scn = lra.LraScenario([qcore.PureState(layout, basis[:, c]) for c in range(6)])

print("single-party Schmidt ranks of each member")
for k in range(1, len(scn) + 1):
    ranks = [qcore.schmidt_rank(scn.state(k), qcore.Bipartition(layout, {p})) for p in range(3)]
    print(f"  member {k}: {ranks}")

tree = lra.product_authentication_protocol(scn, 1)
v = lra.verify_authentication(scn, 1, tree)
print("\nyes-probabilities:", {n: round(p, 12) for n, p in v.evidence["yes_probabilities"].items()})
print("authenticated:", v.passed)

# the same protocol turned into unambiguous identification succeeds with 1/N
res = lra.lra_to_conclusive(scn, 1, tree)
print(f"conclusive success {res.success_probability:.6f} (1/N = {1 / len(scn):.6f}),"
      f" mislabel {res.mislabel_probability:.1e}")
