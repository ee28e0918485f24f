"""Scattering matrices on quantum graphs and their composition by the generalized star product."""
from .errors import QgsError
from .glue import GlueSpec, compose_smatrices, merge_graphs, verify_composition
from .graphs import MetricGraph, PointInteraction, validate_self_adjoint
from .scatter import scattering_matrix
from .starprod import star, star_inverse, star_unit
from .transfer import TransferMatrix, compose_transfer, transfer_from_smatrix
from .tolerance import Tolerance, default_tolerance

__all__ = [
    "GlueSpec", "MetricGraph", "PointInteraction", "QgsError", "Tolerance", "TransferMatrix",
    "compose_smatrices", "compose_transfer", "default_tolerance", "merge_graphs",
    "scattering_matrix", "star", "star_inverse", "star_unit", "transfer_from_smatrix",
    "validate_self_adjoint", "verify_composition",
]
