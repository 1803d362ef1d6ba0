"""Number fields, embeddings and unit lattices."""

from .number_field import AlgebraicNumber, NumberField, build_field, embed, min_poly, norm
from .units import UnitSystem, admissibility_check, dirichlet_rank_check, log_map, unit_search

__all__ = [
    'AlgebraicNumber', 'NumberField', 'build_field', 'embed', 'min_poly', 'norm',
    'UnitSystem', 'admissibility_check', 'dirichlet_rank_check', 'log_map', 'unit_search',
]
