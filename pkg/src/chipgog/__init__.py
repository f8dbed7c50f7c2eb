"""Chip-firing on graphs of groups: quotients by group actions, weighted
Laplacians and Jacobians, maps between covers and quotients, and double-cover
voltage Laplacians."""

from .covers import CoverContext, induced_jacobian_maps, pullback_divisor, pushforward_divisor, verify_cover, voltage_jacobian
from .double_cover import (
    analyze_double_cover,
    cauchy_binet_sum,
    enumerate_ogods,
    kirchhoff_ogod_check,
    voltage_laplacian_explicit,
)
from .errors import ConsistencyError, InputError
from .gog import (
    GraphOfGroups,
    adjugate_check,
    fire_vertex,
    gog_laplacian,
    jacobian_order_matrixtree,
    jacobian_structure,
    tau_weighted,
    zeta_expansion,
)
from .graph import (
    GraphMorphism,
    HalfEdgeGraph,
    check_harmonic,
    enumerate_spanning_trees,
    graph_laplacian,
    harmonic_pullback,
    harmonic_pushforward,
    validate_graph,
)
from .group import GraphAction, PermGroup, assemble_cover, quotient_graph, quotient_graph_of_groups, validate_action
from .io import parse_action, parse_graph, read_action, read_graph, write_action, write_graph, write_quotient
from .lattice import FiniteAbelianGroup, cokernel, lattice_index, lattice_quotient, smith_normal_form
from .version import __version__
