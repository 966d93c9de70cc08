"""Simulation of local random authentication (LRA) for orthogonal multipartite states."""

from .qcore import (
    Bipartition,
    DensityOperator,
    PartyLayout,
    PureState,
    is_fully_product,
    named_state,
    partial_trace,
    phi_plus,
    schmidt_decomposition,
    tensor,
)
from .measure import POVM, Instrument, born_probabilities, embed_local, pauli_measurement, validate_povm
from .locc import INCONCLUSIVE, Label, Leaf, Node, answer_probability, simulate, validate_locc_structure
from .lra import (
    LraScenario,
    Verdict,
    bell_strategy,
    classify_complete_basis,
    lra_to_conclusive,
    orthogonality_constraint_space,
    product_authentication_protocol,
    verify_authentication,
    verify_complete_lra,
)
from .ent import (
    entanglement_entropy,
    prop2_report,
    relative_entropy_strict,
    relative_entropy_support_projected,
    von_neumann_entropy,
)

__version__ = "0.1.0"
