"""
Модели галереи на пластине и эталонные задачи
"""
from evinc.gallery.catalog import CATALOG, CatalogEntry, catalog_names, catalog_problem, exact_solution
from evinc.gallery.coefficients import Coefficient, ThermoplasticCoefficients, ViscoplasticCoefficients
from evinc.gallery.slab import SlabGrid, SpatialOperators, build_slab_operators
from evinc.gallery.system import GalleryLoad, GallerySystem, default_rho, gallery_forcing, to_problem
from evinc.gallery.thermoplasticity import (
    assemble_thermoplasticity,
    build_thermoplasticity,
    thermoplastic_m0,
)
from evinc.gallery.viscoplasticity import (
    assemble_viscoplasticity,
    build_viscoplasticity,
    internal_basis,
    viscoplastic_m0,
)

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "catalog_names",
    "catalog_problem",
    "exact_solution",
    "Coefficient",
    "ThermoplasticCoefficients",
    "ViscoplasticCoefficients",
    "SlabGrid",
    "SpatialOperators",
    "build_slab_operators",
    "GalleryLoad",
    "GallerySystem",
    "default_rho",
    "gallery_forcing",
    "to_problem",
    "assemble_thermoplasticity",
    "build_thermoplasticity",
    "thermoplastic_m0",
    "assemble_viscoplasticity",
    "build_viscoplasticity",
    "internal_basis",
    "viscoplastic_m0",
]
