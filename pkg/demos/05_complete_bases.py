"""
Complete bases: no product member, no authentication
====================================================

For a complete orthonormal basis, only fully product members can be
locally authenticated. A basis made only of entangled states admits no
local authentication of any member.
"""

import math

import numpy as np

from lrauth import lra, qcore

cases = {
    "Bell basis": lra.bell_basis(),
    "computational basis 2x3": lra.computational_basis((2, 3)),
    "Bell triple (incomplete)": lra.bell_triple(),
}

# three qubits: |000>, |111> plus six GHZ-type states
e = np.eye(8)
vecs = [e[0], e[7]] + [(e[i] + s * e[7 - i]) / math.sqrt(2) for i in (1, 2, 3) for s in (1, -1)]
names = ["ket000", "ket111"] + [f"ghz{i}{'pm'[j]}" for i in (1, 2, 3) for j in (0, 1)]
cases["GHZ-completed 3 qubits"] = lra.LraScenario([qcore.PureState((2, 2, 2), v) for v in vecs], names)

for title, scn in cases.items():
    v = lra.classify_complete_basis(scn)
    print(f"{title:26s} -> {v.kind}")
    if "authenticatable" in v.evidence:
        print(f"{'':29s}authenticatable: {v.evidence['authenticatable']}")
