"""
Two copies of the qutrit set and an entanglement bound
======================================================

With two copies of {phi+, phi-, psi+, psi4} the parties could use one copy
as a resource to teleport the other, if enough entanglement could be
distilled. A conclusive protocol identifies psi4 with probability 1/12,
and psi4 carries log2(3) bits, so at least (1/4) log2 3 = 0.396 bits would
be needed. The relative entropy to a separable sigma bounds what the
mixture of the two-copy states offers.
"""

import math

from lrauth.ent import prop2_report

r = prop2_report()
print(f"conclusive probability for psi4      {r.conclusive_probability:.6f}")
print(f"entanglement of psi4 (bits)          {r.entanglement_entropy_psi4:.6f}")
print(f"required, (1/4) log2 3               {r.log3_quarter:.6f}")
print(f"bound, computed on supp(sigma)       {r.computed_bound:.6f}   (8/9 log2 5 - 2 = {8 / 9 * math.log2(5) - 2:.6f})")
print(f"bound, printed closed form           {r.paper_bound:.6f}   (37/36 log2 5 - 2)")
print(f"strict S(rho||sigma)                 {r.strict.value}  support violation: {r.strict.support_violation}")
print(f"support weight of psi4 x psi4        {r.projected.support_weights['psi4']:.6f}")
print(f"sigma spectrum on its support        {[round(x, 6) for x in r.sigma_spectrum]}")
print("\nchecks:")
for name, ok in r.checks.items():
    print(f"  {'ok ' if ok else 'BAD'} {name}")
