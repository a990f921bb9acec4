"""Liouville currents under real and complex earthquakes along finite laminations."""

from .currents import Box, TestFunction, bump_test_function, functional_dyadic, liouville_box, quad_weighted, tent_test_function
from .deriv import d1_lamination, d1_quakebend, d2_lamination, decay_profile, kj_stabilization
from .earthquake import PiecewiseMobiusMap, elementary_earthquake, iterated_earthquake, simple_earthquake
from .hyp_core import BoundaryPoint, Geodesic, MobiusMap, as_point, cos_angle, cosh_complex_distance, cross_ratio
from .lamination import FiniteLamination, orbit_lamination, pushforward, restrict_to_disk, validate

__version__ = "0.1.0"
