"""Sobolev homeomorphic extensions of Jordan-curve parametrizations.

Library layout:
  geometry        planar primitives and exact hyperbolic geometry
  metrics         grid quasihyperbolic fields and the L^q criterion
  conformal       numerical Riemann maps (geodesic zipper) and Koebe checks
  crosscuts       dyadic arc families, crosscut systems, series test
  extension       Whitney-cell candidate extension and W^{1,p} energy
  counterexample  the tree-like domain showing optimality at q = 1
  cli             command-line entry point
"""

from .errors import InconclusiveError, NumericalError, ValidationError
from .geometry import (
    BoundaryParam,
    DiskGeodesic,
    JordanDomain,
    MobiusTransform,
    Point,
    disk_automorphism,
    disk_geodesic,
    dist_to_boundary,
    hyperbolic_dist_disk,
    hyperbolic_dist_halfplane,
    l_shape,
    mobius_for_endpoints,
    point_in_domain,
    rectangle,
    regular_polygon,
    unit_square,
)

__version__ = "0.1.0"
