"""Exactly solvable models: matrix dynamics, scalar flows, the harmonic lattice chain."""

from .flows import DensityFlowModel, FlowAction, RieszProductModel, build_density_flow, build_riesz_product
from .lattice import (FockVector, LatticeFieldModel, LatticeSpaceAction, LatticeSpacetimeAction,
                      LatticeTimeAction, QuadForm, build_lattice_model)
from .matrix import MatrixModel, MatrixTimeAction, build_matrix_model

__all__ = ["MatrixModel", "MatrixTimeAction", "build_matrix_model", "DensityFlowModel",
           "RieszProductModel", "FlowAction", "build_density_flow", "build_riesz_product",
           "LatticeFieldModel", "LatticeSpaceAction", "LatticeTimeAction", "LatticeSpacetimeAction",
           "QuadForm", "FockVector", "build_lattice_model"]
