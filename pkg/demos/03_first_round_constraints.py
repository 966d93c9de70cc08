"""
Which first measurements keep the members orthogonal?
=====================================================

Any perfect protocol for question k must start with effects H on the first
party that satisfy <psi_j| H x I |psi_k> = 0 for every other member j.
These H form a real vector space that always contains the identity. When
it contains nothing else, that party cannot make an informative first move.
"""

import numpy as np

from lrauth import lra

np.set_printoptions(precision=3, suppress=True)

for title, scn in (("{phi+, phi-, |01>}", lra.bell_product_triple()),
                   ("{phi+, phi-, psi+}", lra.bell_triple())):
    print(title)
    for party in (0, 1):
        space = lra.orthogonality_constraint_space(scn, 1, party)
        print(f"  question 1, party {party}: dimension {space.dimension}, trivial={space.trivial}")
        for H in space.basis[1:]:
            print("    extra direction:\n", H)

# the extra direction for the Bell triple is sigma_y, which is the YY test of the Pauli strategy
