"""Exact computations on towers of ramified graph coverings.

Voltage graphs over Z_p x G with per-vertex inertia generate towers of
coverings.  At each layer the Jacobian and spanning-tree count are found
by exact integer linear algebra; across layers the Iwasawa invariants are
fitted and Kida's formula is checked.
"""

from .families import make_cycle, make_section5_voltage, make_Y
from .graphs import (
    CoveringMorphism,
    Divisor,
    Graph,
    check_functoriality_diagram,
    covering_degree,
    jacobian,
    kappa,
    kappa_bruteforce,
    laplacian_matrix,
    picard_group,
    pushforward,
    validate_covering,
    validate_graph,
)
from .groups import InertiaGenerator, ProfiniteSpec, SubgroupSpec
from .iwasawa import fit_invariants, kida_check, limit_ramification, reproduce_table1, tower_report
from .jobspec import load_jobspec, parse_jobspec
from .linalg import IntMatrix, cokernel, determinant, smith_normal_form
from .voltage import (
    VoltageGraph,
    cross_covering,
    derive,
    groupring_laplacian_check,
    layer_covering,
    quotient_voltage,
    voltage_from_covering,
)

__version__ = "0.1.0"

__all__ = [
    "make_cycle",
    "make_section5_voltage",
    "make_Y",
    "CoveringMorphism",
    "Divisor",
    "Graph",
    "check_functoriality_diagram",
    "covering_degree",
    "jacobian",
    "kappa",
    "kappa_bruteforce",
    "laplacian_matrix",
    "picard_group",
    "pushforward",
    "validate_covering",
    "validate_graph",
    "InertiaGenerator",
    "ProfiniteSpec",
    "SubgroupSpec",
    "fit_invariants",
    "kida_check",
    "limit_ramification",
    "reproduce_table1",
    "tower_report",
    "load_jobspec",
    "parse_jobspec",
    "IntMatrix",
    "cokernel",
    "determinant",
    "smith_normal_form",
    "VoltageGraph",
    "cross_covering",
    "derive",
    "groupring_laplacian_check",
    "layer_covering",
    "quotient_voltage",
    "voltage_from_covering",
]
