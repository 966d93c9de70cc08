"""
Authenticating three Bell states with local Pauli measurements
==============================================================

The set {phi+, phi-, psi+} cannot be told apart perfectly by local
operations and classical communication. Yet each yes/no question
"is it psi_k?" can be answered perfectly: both parties measure the same
Pauli observable and the product of outcomes settles the question.
"""

import numpy as np

from lrauth import lra, simulate

scn = lra.bell_triple()
strategy = lra.bell_strategy()  # question 1 -> YY, 2 -> XX, 3 -> ZZ

# yes-probability for every (question, state) pair
table = np.array([[simulate(strategy[k], s)[1] for s in scn.states] for k in (1, 2, 3)])
print("P(yes | question, state)")
print(" " * 15 + "  ".join(f"{n:>9}" for n in scn.names))
for k, row in zip((1, 2, 3), table):
    print(f"q={k} ({scn.name(k):>9})" + "  ".join(f"{p:9.3f}" for p in row))

verdict = lra.verify_complete_lra(scn, strategy)
print("\nverdict:", verdict.kind, "pass" if verdict.passed else "fail")

# a single round is not enough for the psi- member: adding it breaks the XX test
four = lra.bell_basis()
print("\nXX test on the full Bell basis:",
      {n: round(simulate(strategy[2], s)[1], 3) for n, s in zip(four.names, four.states)})
