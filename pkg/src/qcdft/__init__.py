"""Mean-field simulation of quantum circuits through single-qubit probabilities."""
from .circuit import (
    Circuit,
    CircuitBuilder,
    CircuitSyntaxError,
    Gate,
    InvalidCircuit,
    Kind,
    Violation,
    gate,
    gate_matrix,
    parse_circuit,
    parse_grcs,
    serialize_circuit,
    validate,
)
from .generators import (
    CircuitFamily,
    CliffordTLayout,
    gen_bell,
    gen_boixo_like,
    gen_bv,
    gen_clifford_t,
    gen_nonrandom_scaling,
    gen_rx_product,
    random_secret,
)
from .lpa import evolve_lpa, lpa_apply_1q, lpa_apply_cnot, lpa_apply_cz
from .mga import MgaFunctional, MgaRule, builtin_functional, evolve_mga, load_functional, mga_value
from .rdm import evolve_rdm, rdm_apply_1q, rdm_apply_2q, rdm_sqp
from .statevector import StateVector, apply_gate, exact_rdm, exact_sqp, init_state, simulate

__version__ = "0.1.0"
