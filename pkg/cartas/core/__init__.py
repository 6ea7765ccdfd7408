"""
Núcleo matemático: cuerpos finitos, geometría afín, coloreados y factibilidad
"""

from cartas.core.finite_geometry import (
    AffineSpace,
    Field,
    Line,
    Point,
    affine_space,
    all_lines,
    field_for_order,
    field_make,
    sigma,
)
from cartas.core.colouring import Colouring, CriticalWitness, lines_meeting

__all__ = [
    'AffineSpace',
    'Field',
    'Line',
    'Point',
    'affine_space',
    'all_lines',
    'field_for_order',
    'field_make',
    'sigma',
    'Colouring',
    'CriticalWitness',
    'lines_meeting',
]
