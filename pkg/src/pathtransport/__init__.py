"""Transports along paths in vector bundles: integration, parallel-transport axioms, holonomy and tensor lifts."""
from .catalog import CATALOG, CatalogEntry, get_entry
from .errors import (
    CompositionError,
    DomainError,
    GroupInvariantError,
    JunctionError,
    LoopError,
    NonFiniteError,
    NumericalError,
    RankError,
    SingularMatrixError,
    TransportError,
)
from .gauge import GaugePotential, GroupElement, check_group_laws, group_transport, infinitesimal_check, wilson_loop
from .linear import (
    ChartConnection,
    ConnectionTransport,
    FrameTransport,
    IntegratorConfig,
    derivation,
    integrate_transport,
    transport_matrix,
)
from .parallel import ParallelTransportRule, check_axioms, rule_from_transport, segment_form, to_transport
from .paths import Interval, PathSpec, Reparameterization
from .report import LawReport, LawRow
from .tensor import STransport, STransportMap, Tensor, contract, lift
from .transport import TransportFamily, TransportMatrix, check_groupoid, check_reparam, check_restriction

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "ChartConnection",
    "CompositionError",
    "ConnectionTransport",
    "DomainError",
    "FrameTransport",
    "GaugePotential",
    "GroupElement",
    "GroupInvariantError",
    "IntegratorConfig",
    "Interval",
    "JunctionError",
    "LawReport",
    "LawRow",
    "LoopError",
    "NonFiniteError",
    "NumericalError",
    "ParallelTransportRule",
    "PathSpec",
    "RankError",
    "Reparameterization",
    "STransport",
    "STransportMap",
    "SingularMatrixError",
    "Tensor",
    "TransportError",
    "TransportFamily",
    "TransportMatrix",
    "check_axioms",
    "check_group_laws",
    "check_groupoid",
    "check_reparam",
    "check_restriction",
    "contract",
    "derivation",
    "get_entry",
    "group_transport",
    "infinitesimal_check",
    "integrate_transport",
    "lift",
    "rule_from_transport",
    "segment_form",
    "to_transport",
    "transport_matrix",
    "wilson_loop",
]
