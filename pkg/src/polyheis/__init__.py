"""Polygonal sub-Finsler geometry on the Heisenberg group."""

from .distance import (
    GeodesicPath,
    d_e,
    d_e_array,
    distance,
    fd_directional,
    geodesic,
    oracle_distance,
    pansu_derivative,
    pansu_derivatives,
)
from .errors import PolyheisError
from .heisenberg import balayage_area, dilate, inverse, lift, multiply, project, theta
from .horo import (
    Linear,
    NormType,
    TwoPiece,
    act,
    blow_up_family_at,
    bounded_difference,
    evaluate,
    is_busemann,
    orbit_class,
    planar_horofunction,
    two_piece,
    two_piece_from_threshold,
)
from .polygon import PolygonNormData, build_geometry, gauge_norm, hexagon, square, symplectic, symplectic_dual
from .sphere import (
    PanelCoords,
    SpherePointClass,
    ceiling_height,
    classify_sphere_point,
    locate_panel,
    panel_endpoint,
    panel_height,
    unit_ball_contains,
    wall_bound,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
